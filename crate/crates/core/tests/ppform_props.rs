mod common;

use clonelab::corpus::{load_corpus, EntryKind};
use clonelab::galois::{polymorphisms, PolQuery};
use clonelab::ppform::{eval_pp, eval_program, pp_power, Atom, PpFormula, Term};
use clonelab::{catalog, Relation, Structure};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const VARS: [&str; 5] = ["x", "y", "z", "u", "v"];

fn value(t: &Term, names: &[String], vals: &[u8]) -> u8 {
    match t {
        Term::Var(v) => vals[names.iter().position(|n| n == v).expect("bound")],
        Term::Const(c) => *c,
    }
}

/// Whether the free-variable tuple satisfies the formula, by trying every witness.
fn satisfies(f: &PpFormula, s: &Structure, free_vals: &[u8]) -> bool {
    let names: Vec<String> = f.free.iter().chain(&f.exists).cloned().collect();
    tuples(s.domain_size(), f.exists.len()).into_iter().any(|ex| {
        let vals: Vec<u8> = free_vals.iter().chain(&ex).copied().collect();
        f.atoms.iter().all(|a| match a {
            Atom::Rel { name, args } => {
                let t: Vec<u8> = args.iter().map(|x| value(x, &names, &vals)).collect();
                s.relation(name).unwrap().contains(&t)
            }
            Atom::Eq(a, b) => value(a, &names, &vals) == value(b, &names, &vals),
        })
    })
}

fn oracle(f: &PpFormula, s: &Structure) -> Relation {
    let keep = tuples(s.domain_size(), f.free.len()).into_iter().filter(|t| satisfies(f, s, t));
    Relation::from_tuples(s.domain_size(), f.free.len(), keep).unwrap()
}

fn atom_strategy(vars: usize) -> impl Strategy<Value = Atom> {
    let var = move || (0..vars).prop_map(|i| Term::var(VARS[i]));
    prop_oneof![
        (var(), var()).prop_map(|(a, b)| Atom::Rel { name: "R0".into(), args: vec![a, b] }),
        (var(), var(), var()).prop_map(|(a, b, c)| Atom::Rel { name: "R1".into(), args: vec![a, b, c] }),
        (var(), var()).prop_map(|(a, b)| Atom::Eq(a, b)),
    ]
}

/// Free variables `x,y` (and `z` when `free == 3`), the rest quantified.
fn formula_strategy(free: usize, vars: usize) -> impl Strategy<Value = PpFormula> {
    proptest::collection::vec(atom_strategy(vars), 1..5).prop_map(move |atoms| PpFormula {
        free: VARS[..free].iter().map(|s| s.to_string()).collect(),
        exists: VARS[free..vars].iter().map(|s| s.to_string()).collect(),
        atoms,
        constants: false,
    })
}

fn small_structure() -> impl Strategy<Value = Structure> {
    (2usize..4).prop_flat_map(|d| structure_strategy(d, vec![2, 3]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn evaluation_matches_the_definition(s in small_structure(), f in formula_strategy(2, 4)) {
        prop_assert_eq!(eval_pp(&f, &s).unwrap(), oracle(&f, &s));
    }

    #[test]
    fn conjunction_is_intersection(s in small_structure(), f in formula_strategy(3, 3)) {
        let mut acc = Relation::full(s.domain_size(), 3).unwrap();
        for a in &f.atoms {
            let single = PpFormula { atoms: vec![a.clone()], ..f.clone() };
            acc = acc.intersection(&eval_pp(&single, &s).unwrap()).unwrap();
        }
        prop_assert_eq!(eval_pp(&f, &s).unwrap(), acc);
    }

    #[test]
    fn more_conjuncts_never_enlarge(s in small_structure(), f in formula_strategy(2, 4), extra in atom_strategy(4)) {
        let mut g = f.clone();
        g.atoms.push(extra);
        prop_assert!(eval_pp(&g, &s).unwrap().is_subset(&eval_pp(&f, &s).unwrap()));
    }

    #[test]
    fn defined_relations_are_preserved_by_polymorphisms(
        s in structure_strategy(2, vec![2, 3]),
        f in formula_strategy(2, 4),
    ) {
        let r = eval_pp(&f, &s).unwrap();
        for k in 1..=3 {
            for p in brute_polymorphisms(&s, k) {
                prop_assert!(preserves_naive(&p, &r), "{:?} breaks {:?}", p.table(), r);
            }
        }
    }
}

#[test]
fn corpus_definitions_are_preserved_by_polymorphisms() {
    let corpus = load_corpus().unwrap();
    let mut checked = 0;
    for e in corpus.of_kind(EntryKind::Pp) {
        let (source, program) = corpus.pp(&e.id).unwrap();
        let s = catalog::structure(&source).unwrap();
        let defined = eval_program(&program, &s).unwrap();
        for k in 1..=3 {
            let pols = polymorphisms(&s, &PolQuery::new(k).quotient(true).cap(usize::MAX)).unwrap();
            assert!(pols.exhausted);
            for b in &program.bindings {
                let r = defined.relation(&b.name).unwrap();
                for p in &pols.operations {
                    assert!(p.preserves(r).unwrap().holds(), "{}: {} of arity {k}", e.id, b.name);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0);
}

fn decode(d: usize, dim: usize, mut x: usize) -> Vec<u8> {
    let mut out = vec![0u8; dim];
    for slot in out.iter_mut().rev() {
        *slot = (x % d) as u8;
        x /= d;
    }
    out
}

#[test]
fn power_relations_agree_with_their_formulas_coordinatewise() {
    let corpus = load_corpus().unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for e in corpus.of_kind(EntryKind::Case) {
        let case = corpus.case(&e.id).unwrap();
        let spec = &case.power;
        let source = catalog::structure(&spec.source).unwrap();
        let power = pp_power(spec, &source).unwrap();
        let mut base = eval_program(&spec.helpers, &source.expand_with_singletons()).unwrap();
        if !spec.constants {
            base = eval_program(&spec.helpers, &source).unwrap();
        }
        let n = power.domain_size();
        for r in &spec.relations {
            let rel = power.relation(&r.name).unwrap();
            let arity = r.args.len();
            let mut samples: Vec<Vec<usize>> = rel
                .iter()
                .take(500)
                .map(|t| t.iter().map(|&v| v as usize).collect())
                .collect();
            samples.extend((0..500).map(|_| (0..arity).map(|_| rng.gen_range(0..n)).collect()));
            for t in samples {
                let coords: Vec<u8> = t.iter().flat_map(|&x| decode(source.domain_size(), spec.dim, x)).collect();
                let member = rel.contains(&t.iter().map(|&x| x as u8).collect::<Vec<_>>());
                assert_eq!(member, satisfies(&r.formula, &base, &coords), "{} {} {t:?}", e.id, r.name);
            }
        }
    }
}
