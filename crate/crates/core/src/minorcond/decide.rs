use super::{MinorCondition, WitnessAssignment};
use crate::algebra::tuple::{encode, table_len, Tuples};
use crate::algebra::{Operation, Structure};
use crate::csp::{default_node_cap, CspBuilder, CspInstance, CspOutcome, Domain, Status};
use crate::error::{Error, Result};
use crate::galois::{has_cycle, merge_c3_quotient, post_preservation, register, MAX_POL_ARITY};

/// Result of checking a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessCheck {
    Holds,
    /// The first failing identity (by index) and valuation (variable, value).
    Fails {
        identity: usize,
        valuation: Vec<(String, u8)>,
        lhs: u8,
        rhs: u8,
    },
}

impl WitnessCheck {
    pub fn holds(&self) -> bool {
        matches!(self, WitnessCheck::Holds)
    }
}

/// Verifies every identity of `cond` under every valuation of its variables.
pub fn check_witness(cond: &MinorCondition, w: &WitnessAssignment) -> Result<WitnessCheck> {
    let mut d = None;
    for (sym, arity) in cond.symbols() {
        let f = w
            .get(sym)
            .ok_or_else(|| Error::Invalid(format!("no operation assigned to `{sym}`")))?;
        if f.arity() != *arity {
            return Err(Error::ArityMismatch {
                expected: *arity,
                found: f.arity(),
            });
        }
        match d {
            None => d = Some(f.domain_size()),
            Some(d0) if d0 != f.domain_size() => return Err(Error::DomainMismatch(d0, f.domain_size())),
            _ => {}
        }
    }
    let Some(d) = d else {
        return Ok(WitnessCheck::Holds);
    };
    for (i, id) in cond.identities().iter().enumerate() {
        let vars = id.variables();
        let pos = |v: &String| vars.iter().position(|w| w == v).expect("own variable");
        let lpos: Vec<usize> = id.lhs.vars.iter().map(pos).collect();
        let rpos: Vec<usize> = id.rhs.vars.iter().map(pos).collect();
        let (f, g) = (&w[&id.lhs.symbol], &w[&id.rhs.symbol]);
        let mut la = vec![0u8; lpos.len()];
        let mut ra = vec![0u8; rpos.len()];
        for val in Tuples::new(d, vars.len()) {
            lpos.iter().zip(la.iter_mut()).for_each(|(&p, a)| *a = val[p]);
            rpos.iter().zip(ra.iter_mut()).for_each(|(&p, a)| *a = val[p]);
            let (l, r) = (f.at(encode(d, &la)), g.at(encode(d, &ra)));
            if l != r {
                return Ok(WitnessCheck::Fails {
                    identity: i,
                    valuation: vars.iter().map(|v| v.to_string()).zip(val.iter().copied()).collect(),
                    lhs: l,
                    rhs: r,
                });
            }
        }
    }
    Ok(WitnessCheck::Holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SatOptions {
    /// Fold the cyclic shift into the tables; requires the 3-cycle in the structure.
    pub c3_quotient: bool,
    pub node_cap: u64,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions {
            c3_quotient: false,
            node_cap: default_node_cap(),
        }
    }
}

/// Outcome of a decision, with the witness read off a satisfying assignment.
#[derive(Debug, Clone)]
pub struct MinorSat {
    pub outcome: CspOutcome,
    pub witness: Option<WitnessAssignment>,
}

impl MinorSat {
    pub fn is_sat(&self) -> bool {
        self.outcome.is_sat()
    }

    pub fn is_unsat(&self) -> bool {
        self.outcome.is_unsat()
    }

    pub fn is_capped(&self) -> bool {
        self.outcome.is_capped()
    }
}

/// The instance whose solutions are the witnesses of a condition in `Pol(S)`:
/// one variable per table entry of each symbol.
#[derive(Debug, Clone)]
pub struct Indicator {
    inst: CspInstance,
    d: usize,
    /// Symbol, arity and first table variable.
    tables: Vec<(String, usize, usize)>,
    structure: Structure,
    condition: MinorCondition,
}

impl Indicator {
    pub fn new(s: &Structure, cond: &MinorCondition, c3_quotient: bool) -> Result<Self> {
        if c3_quotient && !has_cycle(s) {
            return Err(Error::Invalid("the c3 quotient needs the 3-cycle among the relations".into()));
        }
        let d = s.domain_size();
        let mut b = CspBuilder::new(d)?;
        let rels = register(&mut b, s)?;
        let mut tables = Vec::new();
        for (sym, arity) in cond.symbols() {
            if *arity > MAX_POL_ARITY {
                return Err(Error::Limit(format!("symbol `{sym}` has arity {arity} (at most {MAX_POL_ARITY})")));
            }
            let first = b.add_vars(table_len(d, *arity)?);
            post_preservation(&mut b, s, &rels, *arity, first)?;
            if c3_quotient {
                merge_c3_quotient(&mut b, *arity, first);
            }
            tables.push((sym.clone(), *arity, first));
        }
        let first_of = |sym: &str| tables.iter().find(|t| t.0 == sym).expect("declared").2;
        for id in cond.identities() {
            let vars = id.variables();
            let pos = |v: &String| vars.iter().position(|w| w == v).expect("own variable");
            let lpos: Vec<usize> = id.lhs.vars.iter().map(pos).collect();
            let rpos: Vec<usize> = id.rhs.vars.iter().map(pos).collect();
            let (lf, rf) = (first_of(&id.lhs.symbol), first_of(&id.rhs.symbol));
            for val in Tuples::new(d, vars.len()) {
                let la: Vec<u8> = lpos.iter().map(|&p| val[p]).collect();
                let ra: Vec<u8> = rpos.iter().map(|&p| val[p]).collect();
                b.merge(lf + encode(d, &la), rf + encode(d, &ra));
            }
        }
        Ok(Indicator {
            inst: b.build(),
            d,
            tables,
            structure: s.clone(),
            condition: cond.clone(),
        })
    }

    pub fn instance(&self) -> &CspInstance {
        &self.inst
    }

    /// The variable holding `symbol(args)`.
    pub fn var(&self, symbol: &str, args: &[u8]) -> Option<usize> {
        let (_, arity, first) = self.tables.iter().find(|t| t.0 == symbol)?;
        if args.len() != *arity || args.iter().any(|&a| a as usize >= self.d) {
            return None;
        }
        Some(first + encode(self.d, args))
    }

    /// Arc consistency after fixing table entries; `None` when refuted.
    pub fn propagate_assuming(&self, fixed: &[(&str, &[u8], u8)]) -> Result<Option<Vec<Domain>>> {
        let fixed = self.resolve(fixed)?;
        Ok(self.inst.propagate_assuming(&fixed))
    }

    fn resolve(&self, fixed: &[(&str, &[u8], u8)]) -> Result<Vec<(usize, u8)>> {
        fixed
            .iter()
            .map(|&(sym, args, v)| {
                self.var(sym, args)
                    .map(|x| (x, v))
                    .ok_or_else(|| Error::Invalid(format!("no table entry {sym}{args:?}")))
            })
            .collect()
    }

    pub fn solve(&self, node_cap: u64) -> Result<MinorSat> {
        self.solve_assuming(&[], node_cap)
    }

    /// Searches for a witness; a found witness is re-verified against the
    /// identities and the relations before it is returned.
    pub fn solve_assuming(&self, fixed: &[(&str, &[u8], u8)], node_cap: u64) -> Result<MinorSat> {
        let fixed = self.resolve(fixed)?;
        let outcome = self.inst.solve_one_assuming(&fixed, node_cap);
        let witness = match &outcome.status {
            Status::Sat(a) => {
                let mut w = WitnessAssignment::new();
                for (sym, arity, first) in &self.tables {
                    let len = table_len(self.d, *arity)?;
                    w.insert(sym.clone(), Operation::new(self.d, *arity, a[*first..first + len].to_vec())?);
                }
                assert!(
                    check_witness(&self.condition, &w)?.holds(),
                    "solver witness violates an identity"
                );
                for f in w.values() {
                    for (name, rel) in self.structure.relations() {
                        assert!(f.preserves(rel)?.holds(), "solver witness violates relation {name}");
                    }
                }
                Some(w)
            }
            _ => None,
        };
        Ok(MinorSat { outcome, witness })
    }
}

/// Decides whether `cond` is satisfiable in `Pol(s)`.
pub fn satisfiable_in_pol(s: &Structure, cond: &MinorCondition, opts: &SatOptions) -> Result<MinorSat> {
    Indicator::new(s, cond, opts.c3_quotient)?.solve(opts.node_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::minorcond::builtin;

    fn w1(sym: &str, f: Operation) -> WitnessAssignment {
        let mut w = WitnessAssignment::new();
        w.insert(sym.into(), f);
        w
    }

    #[test]
    fn r4_is_guarded_cyclic() {
        let c = builtin("gSigma3", &[]).unwrap();
        let w = w1("r", catalog::operation("r4").unwrap());
        assert!(check_witness(&c, &w).unwrap().holds());
    }

    #[test]
    fn plus_is_quasi_minority() {
        let c = builtin("QMinority", &[]).unwrap();
        let w = w1("f", catalog::operation("plus").unwrap());
        assert!(check_witness(&c, &w).unwrap().holds());
    }

    #[test]
    fn failing_witness_reports_valuation() {
        let c = builtin("Sigma2", &[]).unwrap();
        let w = w1("f", Operation::projection(3, 2, 0).unwrap());
        match check_witness(&c, &w).unwrap() {
            WitnessCheck::Fails { identity, valuation, lhs, rhs } => {
                assert_eq!(identity, 0);
                assert_ne!(lhs, rhs);
                assert_eq!(valuation.len(), 2);
            }
            WitnessCheck::Holds => panic!("projection is not symmetric"),
        }
        let bad = w1("f", Operation::projection(3, 3, 0).unwrap());
        assert!(matches!(check_witness(&c, &bad), Err(Error::ArityMismatch { .. })));
        assert!(check_witness(&c, &WitnessAssignment::new()).is_err());
    }

    #[test]
    fn symmetric_in_l3_not_in_t() {
        let c = builtin("Sigma2", &[]).unwrap();
        let l3 = catalog::structure("L3").unwrap();
        let res = satisfiable_in_pol(&l3, &c, &SatOptions::default()).unwrap();
        assert!(res.is_sat());
        // 2x+2y is symmetric on (C3, T); keeping {0,1} as well rules symmetry out.
        let t = catalog::structure("T").unwrap();
        let res = satisfiable_in_pol(&t, &c, &SatOptions::default()).unwrap();
        let f = &res.witness.unwrap()["f"];
        assert_eq!(f.eval(&[0, 1]).unwrap(), f.eval(&[1, 0]).unwrap());
        let t01 = t.with("U01", catalog::relation("U01").unwrap()).unwrap();
        let res = satisfiable_in_pol(&t01, &c, &SatOptions::default()).unwrap();
        assert!(res.is_unsat());
    }

    #[test]
    fn guarded_cyclic_fails_in_w() {
        let c = builtin("gSigma3", &[]).unwrap();
        let w = catalog::structure("W").unwrap();
        for q in [false, true] {
            let opts = SatOptions {
                c3_quotient: q,
                ..SatOptions::default()
            };
            assert!(satisfiable_in_pol(&w, &c, &opts).unwrap().is_unsat());
        }
        let q = catalog::structure("Q").unwrap();
        assert!(satisfiable_in_pol(&q, &c, &SatOptions::default()).unwrap().is_sat());
    }

    #[test]
    fn qhm3_fails_in_m2() {
        let c = builtin("QHM", &[3]).unwrap();
        let m2 = catalog::structure("M2").unwrap();
        assert!(satisfiable_in_pol(&m2, &c, &SatOptions::default()).unwrap().is_unsat());
    }

    #[test]
    fn node_cap_gives_capped() {
        let c = builtin("QJ", &[4]).unwrap();
        let q = catalog::structure("Q").unwrap();
        let opts = SatOptions {
            c3_quotient: false,
            node_cap: 1,
        };
        let res = satisfiable_in_pol(&q, &c, &opts).unwrap();
        assert!(res.is_capped() || res.is_unsat());
    }
}
