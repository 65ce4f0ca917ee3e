//! Catalog relations against set-builder oracles, and membership of the
//! named operations in the clones they are claimed to belong to.

mod common;

use clonelab::catalog::{self, r_families, r_name, MAX_FAMILY_N};
use clonelab::{Operation, Permutation, Relation, Structure};
use common::*;

fn collect(d: usize, arity: usize, keep: impl Fn(&[u8]) -> bool) -> Vec<Vec<u8>> {
    tuples(d, arity).into_iter().filter(|t| keep(t)).collect()
}

fn members(r: &Relation) -> Vec<Vec<u8>> {
    r.iter().collect()
}

fn bit(v: u8) -> bool {
    v == 0 || v == 1
}

type Pred = Box<dyn Fn(&[u8]) -> bool>;

#[test]
fn relations_match_their_definitions() {
    let cases: Vec<(&str, usize, Pred)> = vec![
        ("C3", 2, Box::new(|t| (t[0] + 1) % 3 == t[1])),
        ("Req3", 3, Box::new(|t| bit(t[0]) && (t[0] == 1 || t[1] == t[2]))),
        ("Req2", 3, Box::new(|t| bit(t[0]) && (t[0] == 1 || (t[1] == t[2] && bit(t[1]))))),
        ("Rimp2", 3, Box::new(|t| bit(t[0]) && bit(t[1]) && !(t[0] == 0 && t[1] == 0 && t[2] != 0))),
        ("le2", 2, Box::new(|t| bit(t[0]) && bit(t[1]) && t[0] <= t[1])),
        ("L2", 3, Box::new(|t| t.iter().all(|&v| bit(v)) && t.iter().filter(|&&v| v == 1).count() % 2 == 0)),
        ("L3", 3, Box::new(|t| t.iter().map(|&v| v as u32).sum::<u32>() % 3 == 0)),
        ("T", 2, Box::new(|t| matches!(t, [0, 1] | [1, 0] | [2, 2]))),
        ("C2", 2, Box::new(|t| matches!(t, [0, 1] | [1, 0]))),
        ("N", 2, Box::new(|t| bit(t[0]) && (t[0] == 1 || t[1] == 0))),
        ("W", 2, Box::new(|t| bit(t[0]) && (t[0] == 1 || bit(t[1])))),
        ("neq", 2, Box::new(|t| t[0] != t[1])),
        ("U01", 1, Box::new(|t| bit(t[0]))),
    ];
    for (key, arity, keep) in cases {
        assert_eq!(members(&catalog::relation(key).unwrap()), collect(3, arity, keep), "{key}");
    }
    for n in 1..=MAX_FAMILY_N {
        let want = collect(3, n, |t| t.iter().all(|&v| bit(v)) && t.contains(&1));
        assert_eq!(members(&catalog::relation(&format!("B{n}")).unwrap()), want, "B{n}");
    }
}

#[test]
fn r_relations_match_their_definition() {
    for sets in r_families(4) {
        let m = sets.len();
        let k = sets.iter().flatten().copied().max().unwrap_or(0);
        let want = collect(3, m + k, |t| {
            let (x, y) = t.split_at(m);
            x.iter().all(|&v| bit(v))
                && sets.iter().enumerate().all(|(i, s)| x[i] == 1 || s.iter().all(|&j| bit(y[j - 1])))
                && t.iter().any(|&v| v != 0)
        });
        let name = r_name(&sets);
        assert_eq!(members(&catalog::relation(&name).unwrap()), want, "{name}");
    }
}

#[test]
fn n_star_is_the_dual_of_n() {
    let swap = Permutation::swap01(3);
    let n = catalog::relation("N").unwrap();
    assert_eq!(n.dual(&swap).unwrap(), catalog::relation("Nstar").unwrap());
}

fn in_pol(f: &Operation, s: &Structure) -> bool {
    s.relations().all(|(_, r)| preserves_naive(f, r))
}

#[test]
fn named_operations_lie_in_their_clones() {
    let dm = catalog::structure("DM").unwrap();
    for op in ["m", "p"] {
        assert!(in_pol(&catalog::operation(op).unwrap(), &dm), "{op} in Pol(DM)");
    }
    let r4 = catalog::operation("r4").unwrap();
    assert!(in_pol(&r4, &catalog::structure("Q").unwrap()));
    for n in [3, 4] {
        let f = catalog::operation(&format!("fpi{n}")).unwrap();
        for s in [format!("B{n}"), format!("M{n}")] {
            assert!(in_pol(&f, &catalog::structure(&s).unwrap()), "fpi{n} in Pol({s})");
        }
    }
    let f0 = catalog::operation("f0inf").unwrap();
    for n in 2..=4 {
        assert!(in_pol(&f0, &catalog::structure(&format!("B{n}")).unwrap()), "f0inf in Pol(B{n})");
    }
    let vee = catalog::operation("vee3").unwrap();
    assert!(in_pol(&vee, &catalog::structure("W").unwrap()));
}

#[test]
fn operation_tables_match_their_definitions() {
    let vee = catalog::operation("vee3").unwrap();
    // Each pair of distinct values has a fixed winner.
    for (a, b, v) in [(0, 0, 0), (0, 1, 1), (1, 1, 1), (1, 2, 2), (2, 2, 2), (0, 2, 0)] {
        assert_eq!(vee.eval(&[a, b]).unwrap(), v);
        assert_eq!(vee.eval(&[b, a]).unwrap(), v);
    }
    let f0 = catalog::operation("f0inf").unwrap();
    for t in tuples(3, 3) {
        let want = if t[0] == t[2] { vee.eval(&[t[0], t[1]]).unwrap() } else { t[0] };
        assert_eq!(f0.eval(&t).unwrap(), want);
    }
}
