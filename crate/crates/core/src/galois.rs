//! Polymorphisms, generated clones and pp-definability.
//!
//! All three reduce to the same instance: the table of a `k`-ary operation
//! as `d^k` variables, and for every relation `R` of the structure and every
//! choice of `k` tuples of `R` as columns, the rows of that matrix (which are
//! table entries) constrained to lie in `R`.

use std::collections::HashSet;

use crate::algebra::tuple::{self, encode};
use crate::algebra::{Operation, Relation, Structure};
use crate::catalog;
use crate::csp::{default_node_cap, CspBuilder, RelId, SolveStats, Status};
use crate::error::{Error, Result};

/// Largest arity [`polymorphisms`] enumerates.
pub const MAX_POL_ARITY: usize = 5;
/// Largest `|R|` accepted by [`pp_definable`].
pub const MAX_PPDEF_TUPLES: usize = 6;
/// Upper bound on posted constraints for a single instance.
pub const MAX_POSTINGS: usize = 2_000_000;
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// Registers every relation of `s` with the builder.
pub(crate) fn register(b: &mut CspBuilder, s: &Structure) -> Result<Vec<RelId>> {
    s.relations().map(|(_, r)| b.add_relation(r)).collect()
}

/// Number of postings [`post_preservation`] would make.
pub(crate) fn preservation_postings(s: &Structure, arity: usize) -> u128 {
    s.relations()
        .map(|(_, r)| (r.len() as u128).saturating_pow(arity as u32))
        .sum()
}

/// Constrains the operation table stored at `first .. first + d^arity` to preserve every relation of `s`.
pub(crate) fn post_preservation(
    b: &mut CspBuilder,
    s: &Structure,
    rels: &[RelId],
    arity: usize,
    first: usize,
) -> Result<()> {
    let d = s.domain_size();
    let total = preservation_postings(s, arity);
    if total > MAX_POSTINGS as u128 {
        return Err(Error::Limit(format!(
            "{total} preservation constraints at arity {arity} (at most {MAX_POSTINGS})"
        )));
    }
    let weights: Vec<usize> = (0..arity).rev().map(|j| d.pow(j as u32)).collect();
    for ((_, rel), &id) in s.relations().zip(rels) {
        let r = rel.arity();
        let flat = rel.flat_tuples();
        let n = rel.len();
        if n == 0 {
            // No column choices, so nothing to post.
            continue;
        }
        let radices = vec![n; arity];
        let mut choice = vec![0usize; arity];
        let mut scope = vec![0usize; r];
        loop {
            for (i, slot) in scope.iter_mut().enumerate() {
                let mut idx = 0;
                for (j, &c) in choice.iter().enumerate() {
                    idx += flat[c * r + i] as usize * weights[j];
                }
                *slot = first + idx;
            }
            b.post(id, &scope)?;
            if !tuple::increment_mixed(&mut choice, &radices) {
                break;
            }
        }
    }
    Ok(())
}

/// The structure's relation equal to the 3-cycle, if any.
pub fn has_cycle(s: &Structure) -> bool {
    let c3 = catalog::relation("C3").expect("catalog relation");
    s.domain_size() == 3 && s.relations().any(|(_, r)| *r == c3)
}

/// Folds `f(x+1,..,x+1) = f(x..x)+1` into the table at `first`: every entry
/// is tied to the entry with first argument 0.
pub(crate) fn merge_c3_quotient(b: &mut CspBuilder, arity: usize, first: usize) {
    let d = 3usize;
    let len = d.pow(arity as u32);
    let mut t = vec![0u8; arity];
    for idx in 0..len {
        tuple::decode_into(d, idx, &mut t);
        let s = t.first().copied().unwrap_or(0) as usize;
        if s == 0 {
            continue;
        }
        let rep: Vec<u8> = t.iter().map(|&v| ((v as usize + d - s) % d) as u8).collect();
        b.merge_offset(first + idx, first + encode(d, &rep), s);
    }
}

/// Which operations to enumerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolQuery {
    pub arity: usize,
    /// Tie the table together along the cyclic shift. Only valid (and only
    /// accepted) when the structure contains the 3-cycle, because then every
    /// polymorphism commutes with that shift.
    pub c3_quotient: bool,
    pub cap: usize,
}

impl PolQuery {
    pub fn new(arity: usize) -> Self {
        PolQuery {
            arity,
            c3_quotient: false,
            cap: DEFAULT_ENUM_CAP,
        }
    }

    pub fn quotient(mut self, on: bool) -> Self {
        self.c3_quotient = on;
        self
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

#[derive(Debug, Clone)]
pub struct PolEnumeration {
    pub operations: Vec<Operation>,
    /// False when the count cap or the node cap stopped the enumeration.
    pub exhausted: bool,
    pub stats: SolveStats,
}

/// Enumerates the `arity`-ary polymorphisms of `s`, in solver order.
pub fn polymorphisms(s: &Structure, q: &PolQuery) -> Result<PolEnumeration> {
    if q.arity > MAX_POL_ARITY {
        return Err(Error::Limit(format!("arity {} (at most {MAX_POL_ARITY})", q.arity)));
    }
    if q.c3_quotient && !has_cycle(s) {
        return Err(Error::Invalid("the c3 quotient needs the 3-cycle among the relations".into()));
    }
    let d = s.domain_size();
    let len = tuple::table_len(d, q.arity)?;
    let mut b = CspBuilder::new(d)?;
    let first = b.add_vars(len);
    let rels = register(&mut b, s)?;
    post_preservation(&mut b, s, &rels, q.arity, first)?;
    if q.c3_quotient {
        merge_c3_quotient(&mut b, q.arity, first);
    }
    let inst = b.build();
    let all = inst.solve_all(q.cap, default_node_cap());
    let operations = all
        .solutions
        .into_iter()
        .map(|t| Operation::new(d, q.arity, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(PolEnumeration {
        operations,
        exhausted: all.exhausted,
        stats: all.stats,
    })
}

/// Which clone to generate.
#[derive(Debug, Clone)]
pub struct CloneGenQuery {
    pub generators: Vec<Operation>,
    pub max_arity: usize,
    /// Largest number of operations kept per arity.
    pub cap: usize,
}

impl CloneGenQuery {
    pub fn new(generators: Vec<Operation>, max_arity: usize) -> Self {
        CloneGenQuery {
            generators,
            max_arity,
            cap: DEFAULT_ENUM_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedClone {
    /// Members of arity `1..=max_arity`, grouped by arity, projections first.
    pub operations: Vec<Operation>,
    /// False when some arity stopped at the cap before reaching a fixpoint.
    pub complete: bool,
}

impl GeneratedClone {
    pub fn contains(&self, f: &Operation) -> bool {
        self.operations.contains(f)
    }

    pub fn of_arity(&self, n: usize) -> impl Iterator<Item = &Operation> {
        self.operations.iter().filter(move |f| f.arity() == n)
    }
}

/// The members of the clone generated by `q.generators` up to `q.max_arity`.
///
/// The `n`-ary part is the smallest set of `d^n`-long tables containing
/// the `n` projections and closed under applying each generator
/// coordinatewise, built by semi-naive iteration.
pub fn clone_generate(q: &CloneGenQuery) -> Result<GeneratedClone> {
    let d = match q.generators.first() {
        Some(g) => g.domain_size(),
        None => return Err(Error::Invalid("no generators".into())),
    };
    if let Some(g) = q.generators.iter().find(|g| g.domain_size() != d) {
        return Err(Error::DomainMismatch(d, g.domain_size()));
    }
    let mut operations = Vec::new();
    let mut complete = true;
    for n in 1..=q.max_arity {
        let len = tuple::table_len(d, n)?;
        let mut elems: Vec<Vec<u8>> = Vec::new();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for i in 0..n {
            let t = Operation::projection(d, n, i)?.table().to_vec();
            if seen.insert(t.clone()) {
                elems.push(t);
            }
        }
        let mut old = 0;
        'rounds: while old < elems.len() {
            let now = elems.len();
            let mut fresh: Vec<Vec<u8>> = Vec::new();
            for g in &q.generators {
                let r = g.arity();
                if r == 0 {
                    continue;
                }
                let weights: Vec<usize> = (0..r).rev().map(|j| d.pow(j as u32)).collect();
                // Tuples with at least one new element: the first new one sits at `p`.
                for p in 0..r {
                    let lo: Vec<usize> = (0..r).map(|j| if j == p { old } else { 0 }).collect();
                    let hi: Vec<usize> = (0..r)
                        .map(|j| match j.cmp(&p) {
                            std::cmp::Ordering::Less => old,
                            _ => now,
                        })
                        .collect();
                    if (0..r).any(|j| lo[j] >= hi[j]) {
                        continue;
                    }
                    let mut pick = lo.clone();
                    loop {
                        let table: Vec<u8> = (0..len)
                            .map(|c| {
                                let idx: usize = pick
                                    .iter()
                                    .zip(&weights)
                                    .map(|(&e, &w)| elems[e][c] as usize * w)
                                    .sum();
                                g.at(idx)
                            })
                            .collect();
                        if seen.insert(table.clone()) {
                            fresh.push(table);
                            if elems.len() + fresh.len() >= q.cap {
                                complete = false;
                                elems.extend(fresh);
                                break 'rounds;
                            }
                        }
                        // Odometer over the box lo..hi.
                        let mut j = r;
                        loop {
                            if j == 0 {
                                break;
                            }
                            j -= 1;
                            pick[j] += 1;
                            if pick[j] < hi[j] {
                                break;
                            }
                            pick[j] = lo[j];
                            if j == 0 {
                                j = usize::MAX;
                                break;
                            }
                        }
                        if j == usize::MAX {
                            break;
                        }
                    }
                }
            }
            old = now;
            elems.extend(fresh);
        }
        for t in elems {
            operations.push(Operation::new(d, n, t)?);
        }
    }
    Ok(GeneratedClone { operations, complete })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpDefinability {
    pub definable: bool,
    /// The smallest pp-definable relation containing the input.
    pub closure: Relation,
}

/// Decides whether `rel` is pp-definable in `s` by computing the closure of
/// `rel` under the `|rel|`-ary polymorphisms of `s`.
pub fn pp_definable(rel: &Relation, s: &Structure) -> Result<PpDefinability> {
    let d = s.domain_size();
    if rel.domain_size() != d {
        return Err(Error::DomainMismatch(d, rel.domain_size()));
    }
    let m = rel.len();
    if m > 0 && *rel == Relation::full(d, rel.arity())? {
        // Defined by the empty conjunction.
        return Ok(PpDefinability {
            definable: true,
            closure: rel.clone(),
        });
    }
    if m == 0 {
        // Images of the nullary polymorphisms: constants whose diagonal tuple lies in every relation.
        let r = rel.arity();
        let loops = (0..d as u8).filter(|&c| s.relations().all(|(_, x)| x.contains(&vec![c; x.arity()])));
        let closure = Relation::from_tuples(d, r, loops.map(|c| vec![c; r]))?;
        return Ok(PpDefinability {
            definable: closure.is_empty(),
            closure,
        });
    }
    if m > MAX_PPDEF_TUPLES {
        return Err(Error::Limit(format!("relation has {m} tuples (at most {MAX_PPDEF_TUPLES})")));
    }
    let r = rel.arity();
    let len = tuple::table_len(d, m)?;
    let mut b = CspBuilder::new(d)?;
    let first = b.add_vars(len);
    let rels = register(&mut b, s)?;
    post_preservation(&mut b, s, &rels, m, first)?;
    let inst = b.build();

    // Row i of the matrix whose columns are the tuples of `rel`.
    let cols: Vec<Vec<u8>> = rel.iter().collect();
    let rows: Vec<usize> = (0..r)
        .map(|i| {
            let a: Vec<u8> = cols.iter().map(|c| c[i]).collect();
            first + encode(d, &a)
        })
        .collect();

    let mut closure = rel.clone();
    let Some(domains) = inst.propagate() else {
        // Unreachable for a nonempty relation: projections always solve the instance.
        return Err(Error::Invalid("indicator instance is inconsistent".into()));
    };
    let cap = default_node_cap();
    for cand in tuple::Tuples::new(d, r) {
        if closure.contains(&cand) {
            continue;
        }
        if rows.iter().zip(&cand).any(|(&v, &c)| domains[v] >> c & 1 == 0) {
            continue;
        }
        let fixed: Vec<(usize, u8)> = rows.iter().copied().zip(cand.iter().copied()).collect();
        match inst.solve_one_assuming(&fixed, cap).status {
            Status::Sat(a) => {
                let image: Vec<u8> = rows.iter().map(|&v| a[v]).collect();
                closure.insert(&image)?;
            }
            Status::Unsat => {}
            Status::Capped => return Err(Error::Limit("node cap reached while computing the closure".into())),
        }
    }
    Ok(PpDefinability {
        definable: closure == *rel,
        closure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_pol(s: &Structure, k: usize) -> Vec<Operation> {
        let d = s.domain_size();
        let len = d.pow(k as u32);
        let mut out = Vec::new();
        let mut table = vec![0u8; len];
        loop {
            let f = Operation::new(d, k, table.clone()).unwrap();
            if s.relations().all(|(_, r)| f.preserves(r).unwrap().holds()) {
                out.push(f);
            }
            if !tuple::increment(&mut table, d as u8) {
                break;
            }
        }
        out
    }

    fn sorted(mut v: Vec<Operation>) -> Vec<Vec<u8>> {
        let mut t: Vec<Vec<u8>> = v.drain(..).map(|f| f.table().to_vec()).collect();
        t.sort();
        t
    }

    #[test]
    fn unary_polymorphisms_of_cycle() {
        let c3 = catalog::structure("C3").unwrap();
        let pol = polymorphisms(&c3, &PolQuery::new(1)).unwrap();
        assert!(pol.exhausted);
        assert_eq!(sorted(pol.operations), sorted(brute_pol(&c3, 1)));
        assert_eq!(brute_pol(&c3, 1).len(), 3);
    }

    #[test]
    fn binary_polymorphisms_of_dm_are_projections() {
        let dm = catalog::structure("DM").unwrap();
        let pol = polymorphisms(&dm, &PolQuery::new(2)).unwrap();
        assert!(pol.exhausted);
        let mut got = sorted(pol.operations);
        got.dedup();
        let want = sorted(vec![
            Operation::projection(3, 2, 0).unwrap(),
            Operation::projection(3, 2, 1).unwrap(),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn quotient_agrees_with_plain_enumeration() {
        for key in ["C3", "T", "TL2", "W", "P", "DM"] {
            let s = catalog::structure(key).unwrap();
            for k in 1..=2 {
                let plain = polymorphisms(&s, &PolQuery::new(k)).unwrap();
                let quot = polymorphisms(&s, &PolQuery::new(k).quotient(true)).unwrap();
                assert_eq!(sorted(plain.operations), sorted(quot.operations), "{key} arity {k}");
            }
        }
        let k3 = catalog::structure("K3").unwrap();
        assert!(polymorphisms(&k3, &PolQuery::new(1).quotient(true)).is_err());
    }

    #[test]
    fn enumeration_cap_is_reported() {
        let c3 = catalog::structure("C3").unwrap();
        let pol = polymorphisms(&c3, &PolQuery::new(2).cap(2)).unwrap();
        assert_eq!(pol.operations.len(), 2);
        assert!(!pol.exhausted);
    }

    #[test]
    fn generated_clone_of_oplus() {
        let oplus = catalog::operation("oplus").unwrap();
        let g = clone_generate(&CloneGenQuery::new(vec![oplus.clone()], 2)).unwrap();
        assert!(g.complete);
        assert!(g.contains(&oplus));
        assert!(g.contains(&Operation::projection(3, 2, 0).unwrap()));
        assert!(g.contains(&Operation::projection(3, 2, 1).unwrap()));
        // Closed under the generator at arity 2.
        for f in g.of_arity(2) {
            for h in g.of_arity(2) {
                assert!(g.contains(&oplus.compose(&[f.clone(), h.clone()]).unwrap()));
            }
        }
    }

    #[test]
    fn generation_cap() {
        let m = catalog::operation("m").unwrap();
        let q = CloneGenQuery {
            generators: vec![m],
            max_arity: 3,
            cap: 4,
        };
        assert!(!clone_generate(&q).unwrap().complete);
    }

    #[test]
    fn b2_definable_in_w() {
        let w = catalog::structure("W").unwrap();
        let b2 = catalog::relation("B2").unwrap();
        let res = pp_definable(&b2, &w).unwrap();
        assert!(res.definable);
        assert_eq!(res.closure, b2);
    }

    #[test]
    fn not_definable_gets_a_strict_closure() {
        let c3 = catalog::structure("C3").unwrap();
        let b2 = catalog::relation("B2").unwrap();
        let res = pp_definable(&b2, &c3).unwrap();
        assert!(!res.definable);
        assert!(b2.is_subset(&res.closure));
        for f in brute_pol(&c3, 2) {
            assert!(f.preserves(&res.closure).unwrap().holds());
        }
    }

    #[test]
    fn ppdef_limits() {
        let c3 = catalog::structure("C3").unwrap();
        // No loops in the cycle, so `C3(x, x)` defines the empty relation.
        let none = pp_definable(&Relation::empty(3, 2).unwrap(), &c3).unwrap();
        assert!(none.definable && none.closure.is_empty());
        let looped = Structure::new(3)
            .unwrap()
            .with("E", Relation::from_tuples(3, 2, [[0, 1], [1, 1]]).unwrap())
            .unwrap();
        let one = pp_definable(&Relation::empty(3, 2).unwrap(), &looped).unwrap();
        assert!(!one.definable);
        assert_eq!(one.closure, Relation::from_tuples(3, 2, [[1, 1]]).unwrap());
        let full = Relation::full(3, 2).unwrap();
        assert!(pp_definable(&full, &c3).unwrap().definable);
        let big = Relation::from_predicate(3, 2, |t| t != [0, 0] && t != [1, 1]).unwrap();
        assert!(matches!(pp_definable(&big, &c3), Err(Error::Limit(_))));
        let two = Relation::full(2, 1).unwrap();
        assert!(matches!(pp_definable(&two, &c3), Err(Error::DomainMismatch(..))));
    }
}
