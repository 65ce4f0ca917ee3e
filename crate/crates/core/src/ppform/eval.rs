use fixedbitset::FixedBitSet;

use super::ast::{Atom, PpFormula, PpProgram, Term};
use crate::algebra::{singleton_name, tuple, Relation, Structure};
use crate::error::{Error, Result};

/// An atom with relation and argument positions resolved against the search order.
struct Check<'a> {
    rel: &'a Relation,
    args: Vec<usize>,
}

struct Search<'a> {
    d: usize,
    n_free: usize,
    /// `checks[depth]` are the atoms whose last variable sits at `depth`.
    checks: Vec<Vec<Check<'a>>>,
    vals: Vec<u8>,
    /// Search position of each free variable, in output order.
    out_pos: Vec<usize>,
    out: FixedBitSet,
}

impl Search<'_> {
    fn ok_at(&self, depth: usize) -> bool {
        self.checks[depth].iter().all(|c| {
            let mut idx = 0usize;
            for &p in &c.args {
                idx = idx * self.d + self.vals[p] as usize;
            }
            c.rel.contains_index(idx)
        })
    }

    /// Enumerates free positions; returns whether some completion exists below `depth`.
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.vals.len() {
            if depth >= self.n_free {
                let mut idx = 0usize;
                for &p in &self.out_pos {
                    idx = idx * self.d + self.vals[p] as usize;
                }
                self.out.insert(idx);
            }
            return true;
        }
        let existential = depth >= self.n_free;
        let mut any = false;
        for v in 0..self.d {
            self.vals[depth] = v as u8;
            if self.ok_at(depth) && self.run(depth + 1) {
                any = true;
                if existential {
                    return true;
                }
            }
        }
        any
    }
}

/// Replaces constants by fresh variables pinned by singleton relations.
fn eliminate_constants(f: &PpFormula, d: usize) -> Result<(PpFormula, bool)> {
    if !f.has_constants() {
        return Ok((f.clone(), false));
    }
    let mut out = f.clone();
    out.atoms.clear();
    let mut fresh = 0usize;
    let mut pins: Vec<Atom> = Vec::new();
    let mut lift = |t: &Term, out: &mut PpFormula, pins: &mut Vec<Atom>| -> Result<Term> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::Const(c) => {
                if !f.constants {
                    return Err(Error::ConstantNotAllowed(*c));
                }
                if *c as usize >= d {
                    return Err(Error::ValueOutOfDomain {
                        value: *c as usize,
                        size: d,
                    });
                }
                let name = format!("%k{fresh}");
                fresh += 1;
                out.exists.push(name.clone());
                pins.push(Atom::Rel {
                    name: singleton_name(*c),
                    args: vec![Term::Var(name.clone())],
                });
                Ok(Term::Var(name))
            }
        }
    };
    for atom in &f.atoms {
        let a = match atom {
            Atom::Rel { name, args } => Atom::Rel {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|t| lift(t, &mut out, &mut pins))
                    .collect::<Result<_>>()?,
            },
            Atom::Eq(a, b) => Atom::Eq(lift(a, &mut out, &mut pins)?, lift(b, &mut out, &mut pins)?),
        };
        out.atoms.push(a);
    }
    out.atoms.extend(pins);
    Ok((out, true))
}

/// The relation defined by `formula` in `structure`, over its free variables in order.
pub fn eval_pp(formula: &PpFormula, structure: &Structure) -> Result<Relation> {
    let d = structure.domain_size();
    let (f, expanded) = eliminate_constants(formula, d)?;
    let owned;
    let s = if expanded {
        owned = structure.expand_with_singletons();
        &owned
    } else {
        structure
    };
    let n_free = f.free.len();
    tuple::table_len(d, n_free)?;

    // Free variables that occur in atoms first (by first occurrence), then the
    // unconstrained ones, then existentials.
    let occurring = f.occurring_vars();
    let mut order: Vec<String> = occurring.iter().filter(|v| f.free.contains(v)).cloned().collect();
    for v in &f.free {
        if !order.contains(v) {
            order.push(v.clone());
        }
    }
    for v in &occurring {
        if !f.free.contains(v) {
            if !f.exists.contains(v) {
                return Err(Error::Invalid(format!("variable `{v}` is neither free nor quantified")));
            }
            order.push(v.clone());
        }
    }
    let pos = |v: &str| order.iter().position(|o| o == v).expect("ordered");

    let eq = Relation::from_predicate(d, 2, |t| t[0] == t[1])?;
    let mut checks: Vec<Vec<Check>> = (0..order.len().max(1)).map(|_| Vec::new()).collect();
    let mut unsatisfiable = false;
    for atom in &f.atoms {
        let (rel, args) = match atom {
            Atom::Rel { name, args } => {
                let rel = s.get(name).ok_or_else(|| Error::UnknownRelation(name.clone()))?;
                if rel.arity() != args.len() {
                    return Err(Error::ArityMismatch {
                        expected: rel.arity(),
                        found: args.len(),
                    });
                }
                let ps: Vec<usize> = args.iter().map(|t| pos(t.as_var().expect("lifted"))).collect();
                (rel, ps)
            }
            Atom::Eq(a, b) => {
                let (a, b) = (pos(a.as_var().expect("lifted")), pos(b.as_var().expect("lifted")));
                if a == b {
                    continue;
                }
                (&eq, vec![a, b])
            }
        };
        match args.iter().max() {
            Some(&m) => checks[m].push(Check { rel, args }),
            None => unsatisfiable |= !rel.contains_index(0),
        }
    }
    let mut search = Search {
        d,
        n_free,
        checks,
        vals: vec![0; order.len()],
        out_pos: f.free.iter().map(|v| pos(v)).collect(),
        out: FixedBitSet::with_capacity(tuple::table_len(d, n_free)?),
    };
    if !unsatisfiable {
        search.run(0);
    }
    Relation::from_bits(d, n_free, search.out)
}

/// Evaluates each binding in order, adding it to a copy of `structure`.
pub fn eval_program(program: &PpProgram, structure: &Structure) -> Result<Structure> {
    let mut s = structure.clone();
    for b in &program.bindings {
        if s.get(&b.name).is_some() {
            return Err(Error::DuplicateRelation(b.name.clone()));
        }
        let rel = eval_pp(&b.formula, &s)?;
        s.add(b.name.clone(), rel)?;
    }
    Ok(s)
}
