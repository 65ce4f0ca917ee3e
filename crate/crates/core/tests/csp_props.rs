mod common;

use clonelab::csp::CspBuilder;
use clonelab::Relation;
use common::*;
use proptest::prelude::*;

/// A plain description of an instance, solved both by the library and by enumeration.
#[derive(Debug, Clone)]
struct Model {
    d: usize,
    vars: usize,
    constraints: Vec<(Relation, Vec<usize>)>,
    /// `val(a) = val(b) + k`.
    links: Vec<(usize, usize, usize)>,
    masks: Vec<(usize, u128)>,
}

impl Model {
    fn satisfied(&self, a: &[u8]) -> bool {
        let d = self.d;
        self.constraints
            .iter()
            .all(|(r, sc)| r.contains(&sc.iter().map(|&v| a[v]).collect::<Vec<_>>()))
            && self.links.iter().all(|&(x, y, k)| a[x] as usize == (a[y] as usize + k) % d)
            && self.masks.iter().all(|&(v, m)| m >> a[v] & 1 == 1)
    }

    fn brute(&self) -> Vec<Vec<u8>> {
        tuples(self.d, self.vars).into_iter().filter(|a| self.satisfied(a)).collect()
    }

    fn build(&self) -> clonelab::csp::CspInstance {
        let mut b = CspBuilder::new(self.d).unwrap();
        b.add_vars(self.vars);
        for (r, sc) in &self.constraints {
            let id = b.add_relation(r).unwrap();
            b.post(id, sc).unwrap();
        }
        for &(x, y, k) in &self.links {
            b.merge_offset(x, y, k);
        }
        for &(v, m) in &self.masks {
            b.restrict(v, m);
        }
        b.build()
    }
}

fn model(d: usize, max_vars: usize) -> impl Strategy<Value = Model> {
    (2..=max_vars).prop_flat_map(move |vars| {
        let constraint = (1usize..4).prop_flat_map(move |k| {
            (relation_strategy(d, k), proptest::collection::vec(0..vars, k))
        });
        (
            proptest::collection::vec(constraint, 0..8),
            proptest::collection::vec((0..vars, 0..vars, 0..d), 0..3),
            proptest::collection::vec((0..vars, 1u128..(1 << d)), 0..3),
        )
            .prop_map(move |(constraints, links, masks)| Model { d, vars, constraints, links, masks })
    })
}

fn any_model() -> impl Strategy<Value = Model> {
    prop_oneof![model(2, 16), model(3, 8)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn all_solutions_match_enumeration(m in any_model()) {
        let inst = m.build();
        let all = inst.solve_all(usize::MAX, u64::MAX);
        prop_assert!(all.exhausted);
        let mut got = all.solutions.clone();
        got.sort();
        got.dedup();
        prop_assert_eq!(got.len(), all.solutions.len(), "duplicate solutions");
        prop_assert_eq!(got, m.brute());
    }

    #[test]
    fn one_solution_is_sound_and_complete(m in any_model()) {
        let out = m.build().solve_one(u64::MAX);
        prop_assert!(!out.is_capped());
        match out.assignment() {
            Some(a) => prop_assert!(m.satisfied(a)),
            None => prop_assert!(m.brute().is_empty()),
        }
    }

    #[test]
    fn propagation_never_removes_a_solution(m in any_model()) {
        let inst = m.build();
        let sols = m.brute();
        match inst.propagate() {
            None => prop_assert!(sols.is_empty()),
            Some(doms) => {
                for s in &sols {
                    for (v, &x) in s.iter().enumerate() {
                        prop_assert!(doms[v] >> x & 1 == 1, "value {} of var {} pruned", x, v);
                    }
                }
            }
        }
    }

    #[test]
    fn solving_is_deterministic(m in any_model()) {
        let inst = m.build();
        let (a, b) = (inst.solve_one(u64::MAX), inst.solve_one(u64::MAX));
        prop_assert_eq!(a.stats.nodes, b.stats.nodes);
        prop_assert_eq!(a.assignment(), b.assignment());
        let again = m.build().solve_all(usize::MAX, u64::MAX);
        prop_assert_eq!(inst.solve_all(usize::MAX, u64::MAX).solutions, again.solutions);
    }
}

#[test]
fn node_cap_is_reported() {
    // Pigeonhole: 4 pairwise different variables over 3 values.
    let neq = Relation::from_tuples(3, 2, tuples(3, 2).into_iter().filter(|t| t[0] != t[1])).unwrap();
    let mut b = CspBuilder::new(3).unwrap();
    b.add_vars(4);
    let id = b.add_relation(&neq).unwrap();
    for i in 0..4 {
        for j in i + 1..4 {
            b.post(id, &[i, j]).unwrap();
        }
    }
    let inst = b.build();
    assert!(inst.solve_one(u64::MAX).is_unsat());
    assert!(inst.solve_one(1).is_capped());
    assert!(!inst.solve_all(usize::MAX, 1).exhausted);
}
