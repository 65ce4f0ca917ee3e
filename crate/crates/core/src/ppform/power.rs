use std::fmt;

use super::ast::{Binding, PpFormula, PpProgram};
use super::eval::{eval_pp, eval_program};
use super::parse::parse_definition;
use crate::algebra::{check_domain, Structure};
use crate::error::{Error, Result};
use crate::lex::{tokenize, Cursor, Tok};

/// A pp-power: each relation of arity `k` is defined by a formula over
/// `dim * k` source variables, one block of `dim` coordinates per argument.
///
/// A declared argument `x` stands for the coordinates `x{base}..x{base+dim-1}`
/// (with an underscore before the index when `x` ends in a digit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpPowerSpec {
    pub source: String,
    pub dim: usize,
    /// Index of the first coordinate, usually 0 or 1.
    pub base: usize,
    pub constants: bool,
    pub helpers: PpProgram,
    /// Relation name, its declared arguments and the defining formula over their coordinates.
    pub relations: Vec<PowerRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerRelation {
    pub name: String,
    pub args: Vec<String>,
    pub formula: PpFormula,
}

/// The name of coordinate `j` of argument `arg`.
pub fn coordinate_name(arg: &str, j: usize) -> String {
    if arg.ends_with(|c: char| c.is_ascii_digit()) {
        format!("{arg}_{j}")
    } else {
        format!("{arg}{j}")
    }
}

impl PpPowerSpec {
    pub fn coordinates(&self, args: &[String]) -> Vec<String> {
        args.iter()
            .flat_map(|a| (self.base..self.base + self.dim).map(move |j| coordinate_name(a, j)))
            .collect()
    }
}

/// Parses a power file: `source KEY`, `dim N [from B]`, optional `constants`,
/// then `let` helper lines and `power Name(args) := formula` lines.
pub fn parse_power(text: &str) -> Result<PpPowerSpec> {
    let mut c = Cursor::new(tokenize(text)?);
    let mut source = None;
    let mut dim = None;
    let mut base = 0;
    let mut constants = false;
    let mut helpers = PpProgram::default();
    let mut raw: Vec<(usize, usize, Binding)> = Vec::new();
    loop {
        c.skip_newlines();
        let (line, col) = c.here();
        let kw = match c.next() {
            Tok::Eof => break,
            Tok::Ident(k) => k,
            other => return Err(Error::parse(line, col, format!("expected a directive, found {}", other.describe()))),
        };
        match kw.as_str() {
            "source" => {
                let mut key = c.ident()?;
                // Keys such as `C3_0` lex as one identifier; keys with dots do not occur.
                while let Tok::Int(n) = c.peek().clone() {
                    c.next();
                    key.push_str(&n.to_string());
                }
                source = Some(key);
            }
            "dim" => {
                let n = match c.next() {
                    Tok::Int(n) if n >= 1 => n as usize,
                    _ => return Err(Error::parse(line, col, "`dim` needs a positive integer")),
                };
                dim = Some(n);
                if c.peek() == &Tok::Ident("from".into()) {
                    c.next();
                    match c.next() {
                        Tok::Int(b) => base = b as usize,
                        _ => return Err(c.error("`from` needs an integer")),
                    }
                }
            }
            "constants" => constants = true,
            "let" => {
                let b = parse_definition(&mut c, true)?;
                if helpers.bindings.iter().any(|o| o.name == b.name) {
                    return Err(Error::parse(line, col, format!("`{}` is defined twice", b.name)));
                }
                helpers.bindings.push(b);
                continue;
            }
            "power" => {
                let b = parse_definition(&mut c, false)?;
                raw.push((line, col, b));
                continue;
            }
            other => return Err(Error::parse(line, col, format!("unknown directive `{other}`"))),
        }
        if !c.at_line_end() {
            return Err(c.error(format!("unexpected {}", c.peek().describe())));
        }
    }
    let source = source.ok_or_else(|| Error::parse(1, 1, "missing `source` line"))?;
    let dim = dim.ok_or_else(|| Error::parse(1, 1, "missing `dim` line"))?;
    let mut spec = PpPowerSpec {
        source,
        dim,
        base,
        constants,
        helpers,
        relations: Vec::new(),
    };
    for (line, col, b) in raw {
        // `parse_definition` scoped the body against the declared arguments;
        // re-scope it against their coordinates instead.
        let args = b.formula.free.clone();
        let coords = spec.coordinates(&args);
        let mut formula = b.formula;
        formula.free = coords;
        for v in formula.occurring_vars() {
            if !formula.free.contains(&v) && !formula.exists.contains(&v) {
                return Err(Error::parse(line, col, format!("variable `{v}` in `{}` is not a coordinate", b.name)));
            }
        }
        if spec.relations.iter().any(|r| r.name == b.name) {
            return Err(Error::parse(line, col, format!("`{}` is defined twice", b.name)));
        }
        spec.relations.push(PowerRelation {
            name: b.name,
            args,
            formula,
        });
    }
    Ok(spec)
}

/// Builds the pp-power of `source` described by `spec`. Elements of the
/// power are the `dim`-tuples over the source domain, encoded base `d`
/// with the first coordinate most significant.
pub fn pp_power(spec: &PpPowerSpec, source: &Structure) -> Result<Structure> {
    let d = source.domain_size();
    let big = (d as u128).checked_pow(spec.dim as u32).unwrap_or(u128::MAX);
    if big > crate::algebra::MAX_DOMAIN as u128 {
        return Err(Error::DomainSize(big.min(usize::MAX as u128) as usize));
    }
    let big = big as usize;
    check_domain(big)?;
    let mut helpers = spec.helpers.clone();
    for b in &mut helpers.bindings {
        b.formula.constants = spec.constants;
    }
    let base = eval_program(&helpers, source)?;
    let mut out = Structure::new(big)?;
    for r in &spec.relations {
        let formula = r.formula.clone().with_constants(spec.constants);
        let rel = eval_pp(&formula, &base)?;
        let lifted = crate::algebra::Relation::from_bits(big, r.args.len(), rel.bits().clone())?;
        out.add(r.name.clone(), lifted)?;
    }
    Ok(out)
}

impl fmt::Display for PpPowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source {}", self.source)?;
        if self.base == 0 {
            writeln!(f, "dim {}", self.dim)?;
        } else {
            writeln!(f, "dim {} from {}", self.dim, self.base)?;
        }
        if self.constants {
            writeln!(f, "constants")?;
        }
        write!(f, "{}", self.helpers)?;
        for r in &self.relations {
            writeln!(f, "power {}({}) := {}", r.name, r.args.join(","), r.formula)?;
        }
        Ok(())
    }
}
