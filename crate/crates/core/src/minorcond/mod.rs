//! Minor conditions: finite sets of height-one identities `f(x,y) = g(y,x,x)`.
//!
//! A condition is satisfied in a clone when every symbol can be replaced by
//! an operation of the clone so that each identity holds for all values of
//! its variables. [`satisfiable_in_pol`] decides this for `Pol(S)` with the
//! table-entry instance from [`galois`](crate::galois), turning each identity
//! into one union-find merge per valuation.

mod builtins;
mod decide;
mod parse;
mod witness;

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::Operation;
use crate::error::{Error, Result};

pub use builtins::{builtin, builtin_key, builtin_label, BUILTIN_KEYS};
pub use decide::{check_witness, satisfiable_in_pol, Indicator, MinorSat, SatOptions, WitnessCheck};
pub use parse::parse_condition;
pub use witness::{parse_witness, Expr, WitnessDef, WitnessFile};

/// One side of an identity: a symbol applied to variables (repeats allowed).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinorTerm {
    pub symbol: String,
    pub vars: Vec<String>,
}

impl MinorTerm {
    pub fn new(symbol: impl Into<String>, vars: &[&str]) -> Self {
        MinorTerm {
            symbol: symbol.into(),
            vars: vars.iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: MinorTerm,
    pub rhs: MinorTerm,
}

impl Identity {
    /// Distinct variables of both sides in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in self.lhs.vars.iter().chain(&self.rhs.vars) {
            if !out.contains(&v.as_str()) {
                out.push(v);
            }
        }
        out
    }
}

/// Symbols with arities (in order of first use) and identities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MinorCondition {
    symbols: Vec<(String, usize)>,
    identities: Vec<Identity>,
}

/// Symbol name to operation.
pub type WitnessAssignment = BTreeMap<String, Operation>;

impl MinorCondition {
    pub fn new() -> Self {
        Self::default()
    }

    fn declare(&mut self, t: &MinorTerm) -> Result<()> {
        match self.arity(&t.symbol) {
            Some(a) if a != t.vars.len() => Err(Error::ArityMismatch {
                expected: a,
                found: t.vars.len(),
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.push((t.symbol.clone(), t.vars.len()));
                Ok(())
            }
        }
    }

    /// Adds `lhs = rhs`, declaring new symbols and checking arities of known ones.
    pub fn add(&mut self, lhs: MinorTerm, rhs: MinorTerm) -> Result<()> {
        self.declare(&lhs)?;
        self.declare(&rhs)?;
        self.identities.push(Identity { lhs, rhs });
        Ok(())
    }

    /// Adds `t1 = t2 = .. = tn` as identities of each later term against the first.
    pub fn add_chain(&mut self, terms: Vec<MinorTerm>) -> Result<()> {
        let mut it = terms.into_iter();
        let Some(first) = it.next() else {
            return Ok(());
        };
        self.declare(&first)?;
        for t in it {
            self.add(first.clone(), t)?;
        }
        Ok(())
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().find(|(s, _)| s == symbol).map(|&(_, a)| a)
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    /// Same identity set after renaming symbols along `rename`.
    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> MinorCondition {
        let mut out = MinorCondition::new();
        for (s, a) in &self.symbols {
            out.symbols.push((rename(s), *a));
        }
        for id in &self.identities {
            out.identities.push(Identity {
                lhs: MinorTerm {
                    symbol: rename(&id.lhs.symbol),
                    vars: id.lhs.vars.clone(),
                },
                rhs: MinorTerm {
                    symbol: rename(&id.rhs.symbol),
                    vars: id.rhs.vars.clone(),
                },
            });
        }
        out
    }

    /// Whether every identity of `self` is an identity of `other` up to variable renaming.
    pub fn is_subset_of(&self, other: &MinorCondition) -> bool {
        let canon = |id: &Identity| {
            let vars = id.variables();
            let pos = |v: &String| vars.iter().position(|w| w == v).expect("own variable");
            (
                id.lhs.symbol.clone(),
                id.lhs.vars.iter().map(pos).collect::<Vec<_>>(),
                id.rhs.symbol.clone(),
                id.rhs.vars.iter().map(pos).collect::<Vec<_>>(),
            )
        };
        let theirs: Vec<_> = other
            .identities
            .iter()
            .flat_map(|id| {
                let flipped = Identity {
                    lhs: id.rhs.clone(),
                    rhs: id.lhs.clone(),
                };
                [canon(id), canon(&flipped)]
            })
            .collect();
        self.identities.iter().all(|id| theirs.contains(&canon(id)))
    }
}

impl fmt::Display for MinorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.symbol, self.vars.join(","))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// One identity per line; parses back to an equal condition.
impl fmt::Display for MinorCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for id in &self.identities {
            writeln!(f, "{id}")?;
        }
        Ok(())
    }
}
