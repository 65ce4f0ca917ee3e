//! Strategies and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use clonelab::minorcond::{MinorCondition, MinorTerm};
use clonelab::{Operation, Relation, Structure};
use proptest::prelude::*;

/// All tuples of length `n` over `0..d` in encoding order.
pub fn tuples(d: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d as u8).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn table_index(d: usize, t: &[u8]) -> usize {
    t.iter().fold(0, |acc, &v| acc * d + v as usize)
}

/// Preservation by the textbook double loop over column choices.
pub fn preserves_naive(f: &Operation, r: &Relation) -> bool {
    let members: Vec<Vec<u8>> = r.iter().collect();
    let k = f.arity();
    let d = f.domain_size();
    // With no members there is nothing to combine, except for a nullary `f`,
    // whose single (empty) choice of arguments still yields a constant tuple.
    if members.is_empty() && k > 0 {
        return true;
    }
    for choice in tuples(members.len(), k) {
        let image: Vec<u8> = (0..r.arity())
            .map(|row| {
                let args: Vec<u8> = choice.iter().map(|&c| members[c as usize][row]).collect();
                f.table()[table_index(d, &args)]
            })
            .collect();
        if !r.contains(&image) {
            return false;
        }
    }
    true
}

pub fn relation_strategy(d: usize, arity: usize) -> impl Strategy<Value = Relation> {
    let n = d.pow(arity as u32);
    proptest::collection::vec(any::<bool>(), n).prop_map(move |bits| {
        let ts = tuples(d, arity);
        Relation::from_tuples(d, arity, ts.into_iter().zip(bits).filter(|(_, b)| *b).map(|(t, _)| t)).unwrap()
    })
}

pub fn operation_strategy(d: usize, arity: usize) -> impl Strategy<Value = Operation> {
    proptest::collection::vec(0..d as u8, d.pow(arity as u32)).prop_map(move |t| Operation::new(d, arity, t).unwrap())
}

/// A structure on `0..d` with relations `R0..` of the given arities.
pub fn structure_strategy(d: usize, arities: Vec<usize>) -> impl Strategy<Value = Structure> {
    arities
        .into_iter()
        .map(|a| relation_strategy(d, a))
        .collect::<Vec<_>>()
        .prop_map(move |rels| {
            let mut s = Structure::new(d).unwrap();
            for (i, r) in rels.into_iter().enumerate() {
                s.add(format!("R{i}"), r).unwrap();
            }
            s
        })
}

/// Every operation of the given arity on `0..d` (only for tiny tables).
pub fn all_operations(d: usize, arity: usize) -> Vec<Operation> {
    tuples(d, d.pow(arity as u32))
        .into_iter()
        .map(|t| Operation::new(d, arity, t).unwrap())
        .collect()
}

/// Polymorphisms by trying every table.
pub fn brute_polymorphisms(s: &Structure, arity: usize) -> Vec<Operation> {
    all_operations(s.domain_size(), arity)
        .into_iter()
        .filter(|f| s.relations().all(|(_, r)| preserves_naive(f, r)))
        .collect()
}

/// Every map `source -> target` that sends each relation into its namesake.
pub fn brute_homomorphisms(source: &Structure, target: &Structure) -> Vec<Vec<u8>> {
    tuples(target.domain_size(), source.domain_size())
        .into_iter()
        .filter(|h| {
            source.relations().all(|(name, r)| {
                let t = target.get(name).unwrap();
                r.iter().all(|x| t.contains(&x.iter().map(|&v| h[v as usize]).collect::<Vec<_>>()))
            })
        })
        .collect()
}

fn term_value(f: &Operation, t: &MinorTerm, names: &[&str], vals: &[u8]) -> u8 {
    let args: Vec<u8> = t
        .vars
        .iter()
        .map(|v| vals[names.iter().position(|n| n == v).unwrap()])
        .collect();
    f.table()[table_index(f.domain_size(), &args)]
}

/// Checks every identity on every assignment of its variables.
pub fn minor_satisfies(cond: &MinorCondition, ops: &BTreeMap<String, Operation>) -> bool {
    cond.identities().iter().all(|id| {
        let names = id.variables();
        let d = ops.values().next().unwrap().domain_size();
        tuples(d, names.len()).iter().all(|vals| {
            term_value(&ops[&id.lhs.symbol], &id.lhs, &names, vals)
                == term_value(&ops[&id.rhs.symbol], &id.rhs, &names, vals)
        })
    })
}

/// Satisfiable in Pol(S) by enumerating every assignment of polymorphisms.
pub fn brute_minor_sat(s: &Structure, cond: &MinorCondition) -> bool {
    let mut choices: Vec<(String, Vec<Operation>)> = Vec::new();
    for (sym, k) in cond.symbols() {
        choices.push((sym.clone(), brute_polymorphisms(s, *k)));
    }
    fn go(i: usize, choices: &[(String, Vec<Operation>)], acc: &mut BTreeMap<String, Operation>, cond: &MinorCondition) -> bool {
        if i == choices.len() {
            return minor_satisfies(cond, acc);
        }
        for f in &choices[i].1 {
            acc.insert(choices[i].0.clone(), f.clone());
            if go(i + 1, choices, acc, cond) {
                return true;
            }
        }
        false
    }
    go(0, &choices, &mut BTreeMap::new(), cond)
}
