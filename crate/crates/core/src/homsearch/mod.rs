//! Homomorphisms between structures and verification of pp-constructions.

mod case;
mod xi;

use crate::algebra::Structure;
use crate::csp::{default_node_cap, CspBuilder, SolveStats};
use crate::error::{Error, Result};

pub use case::{parse_case, verify_construction, ConstructionCase, ConstructionReport, HRule, HValue};
pub use xi::{big_xi, check_xi, xi, XiReport};

/// A homomorphism search from `source` to `target`.
#[derive(Debug, Clone)]
pub struct HomQuery<'a> {
    pub source: &'a Structure,
    pub target: &'a Structure,
    /// Source element and its prescribed image.
    pub partial: Vec<(u8, u8)>,
    /// Enumerate every homomorphism (up to `count_cap`) instead of one.
    pub all: bool,
    pub count_cap: usize,
}

impl<'a> HomQuery<'a> {
    pub fn new(source: &'a Structure, target: &'a Structure) -> Self {
        HomQuery {
            source,
            target,
            partial: Vec::new(),
            all: false,
            count_cap: usize::MAX,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HomSearch {
    /// Maps as image tables indexed by source element.
    pub maps: Vec<Vec<u8>>,
    /// Whether the search space was covered (always true for a one-shot search that found nothing).
    pub exhausted: bool,
    /// A one-shot search hit the node cap before deciding.
    pub capped: bool,
    pub stats: SolveStats,
}

fn check_signatures(source: &Structure, target: &Structure) -> Result<()> {
    if !source.same_signature(target) {
        return Err(Error::SignatureMismatch(format!(
            "{:?} vs {:?}",
            source.signature(),
            target.signature()
        )));
    }
    Ok(())
}

/// One variable per source element, one constraint per source tuple.
pub fn find_homomorphisms(q: &HomQuery) -> Result<HomSearch> {
    check_signatures(q.source, q.target)?;
    let (n, d) = (q.source.domain_size(), q.target.domain_size());
    let mut b = CspBuilder::new(d)?;
    b.add_vars(n);
    for (name, rel) in q.source.relations() {
        let id = b.add_relation(q.target.relation(name)?)?;
        for t in rel.iter() {
            let scope: Vec<usize> = t.iter().map(|&v| v as usize).collect();
            b.post(id, &scope)?;
        }
    }
    for &(a, v) in &q.partial {
        if a as usize >= n {
            return Err(Error::ValueOutOfDomain {
                value: a as usize,
                size: n,
            });
        }
        b.assign(a as usize, v)?;
    }
    let inst = b.build();
    let cap = default_node_cap();
    let search = if q.all {
        let all = inst.solve_all(q.count_cap, cap);
        HomSearch {
            maps: all.solutions,
            exhausted: all.exhausted,
            capped: false,
            stats: all.stats,
        }
    } else {
        let one = inst.solve_one(cap);
        HomSearch {
            capped: one.is_capped(),
            exhausted: !one.is_capped(),
            maps: one.assignment().map(|a| vec![a.to_vec()]).unwrap_or_default(),
            stats: one.stats,
        }
    };
    for m in &search.maps {
        assert!(
            verify_map(m, q.source, q.target)?.holds(),
            "solver returned a map that is not a homomorphism"
        );
    }
    Ok(search)
}

/// Some homomorphism from `source` to `target`, if one exists.
pub fn find_homomorphism(source: &Structure, target: &Structure) -> Result<Option<Vec<u8>>> {
    let s = find_homomorphisms(&HomQuery::new(source, target))?;
    if s.capped {
        return Err(Error::Limit("node cap reached in homomorphism search".into()));
    }
    Ok(s.maps.into_iter().next())
}

/// Outcome of checking a map against every relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapCheck {
    Homomorphism,
    Violated {
        relation: String,
        tuple: Vec<u8>,
        image: Vec<u8>,
    },
}

impl MapCheck {
    pub fn holds(&self) -> bool {
        matches!(self, MapCheck::Homomorphism)
    }
}

/// Checks that `map` sends every tuple of every source relation into the target relation of the same name.
pub fn verify_map(map: &[u8], source: &Structure, target: &Structure) -> Result<MapCheck> {
    check_signatures(source, target)?;
    if map.len() != source.domain_size() {
        return Err(Error::ArityMismatch {
            expected: source.domain_size(),
            found: map.len(),
        });
    }
    if let Some(&v) = map.iter().find(|&&v| v as usize >= target.domain_size()) {
        return Err(Error::ValueOutOfDomain {
            value: v as usize,
            size: target.domain_size(),
        });
    }
    for (name, rel) in source.relations() {
        let trel = target.relation(name)?;
        for t in rel.iter() {
            let image: Vec<u8> = t.iter().map(|&v| map[v as usize]).collect();
            if !trel.contains(&image) {
                return Ok(MapCheck::Violated {
                    relation: name.to_string(),
                    tuple: t,
                    image,
                });
            }
        }
    }
    Ok(MapCheck::Homomorphism)
}

/// Homomorphisms exist in both directions.
pub fn homomorphically_equivalent(a: &Structure, b: &Structure) -> Result<bool> {
    Ok(find_homomorphism(a, b)?.is_some() && find_homomorphism(b, a)?.is_some())
}
