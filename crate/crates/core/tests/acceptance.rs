//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use clonelab::corpus::{load_corpus, Corpus, EntryKind};
use clonelab::galois::{has_cycle, pp_definable};
use clonelab::homsearch::{check_xi, find_homomorphism, verify_construction};
use clonelab::minorcond::{builtin, satisfiable_in_pol, Indicator, MinorCondition, MinorTerm, SatOptions};
use clonelab::report::{lattice_report, Figure, LatticeReport, ReportOptions, Verdict};
use clonelab::{catalog, Relation, Structure};
use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn seed() -> u64 {
    std::env::var("CLONELAB_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_240_601)
}

fn divergences(r: &LatticeReport) -> Vec<String> {
    let mut out = Vec::new();
    for c in r.cells.iter().filter(|c| !c.agrees) {
        let mut line = format!("{} vs {} ({}): holds side {:?}", c.row, c.col, c.condition, c.holds.verdict);
        for f in c.fails.iter().filter(|f| f.verdict != Verdict::Fails) {
            line += &format!("; expected FAILS in {} but got {:?}", f.structure, f.verdict);
        }
        out.push(line);
    }
    for c in r.chain.iter().filter(|c| !c.agrees) {
        out.push(format!(
            "chain n={} on {}: {} {:?}, {} {:?}",
            c.n, c.structure, c.holds.condition, c.holds.verdict, c.fails.condition, c.fails.verdict
        ));
    }
    out
}

fn within(limit: Duration, start: Instant, ok: bool, what: String) -> Outcome {
    let t = start.elapsed();
    match (ok, t <= limit) {
        (true, true) => Ok(format!("{what} in {:.2}s", t.as_secs_f64())),
        (true, false) => Err(format!("{what} but took {:.1}s (limit {}s)", t.as_secs_f64(), limit.as_secs())),
        (false, _) => Err(what),
    }
}

fn atoms_table(corpus: &Corpus) -> Outcome {
    let start = Instant::now();
    let r = lattice_report(corpus, &ReportOptions::new(Figure::Atoms)).map_err(|e| e.to_string())?;
    let bad = divergences(&r);
    let ok = r.exit_code() == 0 && bad.is_empty() && r.cells.len() == 12;
    let what = if ok {
        format!("{} cells agree", r.cells.len())
    } else {
        format!("{} cells, exit {}: {}", r.cells.len(), r.exit_code(), bad.join(" | "))
    };
    within(Duration::from_secs(60), start, ok, what)
}

fn full_table(r: &LatticeReport, start: Instant) -> Outcome {
    let bad = divergences(r);
    let ok = r.exit_code() == 0;
    let what = if ok {
        format!("{} cells agree at n <= {}", r.cells.len(), r.n_cap)
    } else {
        format!("{} of {} cells diverge: {}", r.summary.diverging, r.cells.len(), bad.join(" | "))
    };
    within(Duration::from_secs(15 * 60), start, ok, what)
}

fn chain(r: &LatticeReport, start: Instant) -> Outcome {
    let ns: Vec<usize> = r.chain.iter().map(|c| c.n).collect();
    let covered = (2..=4).all(|n| ns.contains(&n));
    let bad: Vec<String> = divergences(r).into_iter().filter(|l| l.starts_with("chain")).collect();
    let ok = covered && bad.is_empty();
    let what = if ok {
        format!("{} chain lines agree", r.chain.len())
    } else {
        format!("n covered {ns:?}: {}", bad.join(" | "))
    };
    within(Duration::from_secs(10 * 60), start, ok, what)
}

fn cases(corpus: &Corpus) -> Outcome {
    let start = Instant::now();
    let mut failed = Vec::new();
    let entries: Vec<_> = corpus.of_kind(EntryKind::Case).collect();
    for e in &entries {
        let ok = corpus
            .case(&e.id)
            .and_then(|c| verify_construction(&c))
            .map(|r| r.holds())
            .unwrap_or(false);
        if !ok {
            failed.push(e.id.clone());
        }
    }
    let ok = failed.is_empty() && entries.len() == 8;
    let what = if ok {
        format!("{} cases verify", entries.len())
    } else {
        format!("{} cases, failing: {failed:?}", entries.len())
    };
    within(Duration::from_secs(5 * 60), start, ok, what)
}

fn xi_suite() -> Outcome {
    let start = Instant::now();
    let r = check_xi(100_000).map_err(|e| e.to_string())?;
    let what = format!(
        "{} ternary, {} quaternary members{}, {} violations",
        r.ternary,
        r.quaternary,
        if r.quaternary_complete { "" } else { " (capped)" },
        r.failures.len()
    );
    within(Duration::from_secs(30 * 60), start, r.holds(), what)
}

fn random_relation(rng: &mut StdRng, d: usize, arity: usize) -> Relation {
    Relation::from_tuples(d, arity, tuples(d, arity).into_iter().filter(|_| rng.gen_bool(0.5))).unwrap()
}

fn random_structure(rng: &mut StdRng, d: usize) -> Structure {
    let mut s = Structure::new(d).unwrap();
    for i in 0..rng.gen_range(1..=2) {
        let arity = rng.gen_range(1..=3);
        s.add(format!("R{i}"), random_relation(rng, d, arity)).unwrap();
    }
    s
}

fn random_condition(rng: &mut StdRng) -> MinorCondition {
    const NAMED: [(&str, &[usize]); 6] = [
        ("Sigma2", &[]),
        ("QMalcev", &[]),
        ("QMinority", &[]),
        ("QMajority", &[]),
        ("WNU", &[3]),
        ("QNU", &[3]),
    ];
    if rng.gen_bool(0.5) {
        let (name, params) = NAMED[rng.gen_range(0..NAMED.len())];
        return builtin(name, params).unwrap();
    }
    let k = rng.gen_range(1..=3);
    let vars = ["x", "y", "z"];
    let mut c = MinorCondition::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut side = || {
            let vs: Vec<&str> = (0..k).map(|_| vars[rng.gen_range(0..3)]).collect();
            MinorTerm::new("f", &vs)
        };
        let (l, r) = (side(), side());
        c.add(l, r).unwrap();
    }
    c
}

fn direct_closure(rel: &Relation, s: &Structure) -> Relation {
    let members: Vec<Vec<u8>> = rel.iter().collect();
    let images = brute_polymorphisms(s, members.len()).into_iter().map(|f| {
        (0..rel.arity())
            .map(|i| {
                let col: Vec<u8> = members.iter().map(|t| t[i]).collect();
                f.table()[table_index(2, &col)]
            })
            .collect::<Vec<u8>>()
    });
    Relation::from_tuples(2, rel.arity(), images).unwrap()
}

fn oracles() -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed());
    let opts = SatOptions { c3_quotient: false, node_cap: u64::MAX };
    let mut mismatches = Vec::new();
    const INSTANCES: usize = 500;
    for i in 0..INSTANCES {
        let s = random_structure(&mut rng, 2);
        let c = random_condition(&mut rng);
        let got = satisfiable_in_pol(&s, &c, &opts).map_err(|e| e.to_string())?;
        if got.is_capped() || got.is_sat() != brute_minor_sat(&s, &c) {
            mismatches.push(format!("minor instance {i}"));
        }
        let n = rng.gen_range(2..=4);
        let src = random_structure(&mut rng, n);
        let mut tgt = Structure::new(2).unwrap();
        for (name, r) in src.relations() {
            tgt.add(name, random_relation(&mut rng, 2, r.arity())).unwrap();
        }
        let h = find_homomorphism(&src, &tgt).map_err(|e| e.to_string())?;
        if h.is_some() == brute_homomorphisms(&src, &tgt).is_empty() {
            mismatches.push(format!("hom instance {i}"));
        }
    }
    // Every binary relation against every structure made of one binary relation, with and without {0}.
    let binaries: Vec<Relation> = (0..16u32)
        .map(|bits| Relation::from_tuples(2, 2, tuples(2, 2).into_iter().enumerate().filter(|(j, _)| bits >> j & 1 == 1).map(|(_, t)| t)).unwrap())
        .collect();
    let zero = Relation::from_tuples(2, 1, [[0u8]]).unwrap();
    let mut pairs = 0;
    for base in &binaries {
        for pinned in [false, true] {
            let mut s = Structure::new(2).unwrap().with("E", base.clone()).unwrap();
            if pinned {
                s.add("Z", zero.clone()).unwrap();
            }
            for r in &binaries {
                pairs += 1;
                let p = pp_definable(r, &s).map_err(|e| e.to_string())?;
                if p.closure != direct_closure(r, &s) || p.definable != (p.closure == *r) {
                    mismatches.push(format!("closure of {:?} in {:?}", r.flat_tuples(), s.signature()));
                }
            }
        }
    }
    let ok = mismatches.is_empty();
    let what = format!(
        "{INSTANCES} minor + {INSTANCES} hom instances (seed {}), {pairs} closure pairs, {} disagreements{}",
        seed(),
        mismatches.len(),
        if ok { String::new() } else { format!(": {}", mismatches.join(", ")) }
    );
    if ok {
        Ok(what)
    } else {
        Err(what)
    }
}

fn refutation() -> Outcome {
    let s = catalog::structure("W").map_err(|e| e.to_string())?;
    let cond = builtin("gSigma3", &[]).unwrap();
    let start = Instant::now();
    // The plain instance, so that the refutation hinges on the assignment.
    let ind = Indicator::new(&s, &cond, false).map_err(|e| e.to_string())?;
    if ind.propagate_assuming(&[]).map_err(|e| e.to_string())?.is_none() {
        return Err("propagation alone refutes the unassigned instance".into());
    }
    let mut survivors = Vec::new();
    for a in 0..3u8 {
        if ind.propagate_assuming(&[("r", &[0, 1, 2, 0], a)]).map_err(|e| e.to_string())?.is_some() {
            survivors.push(a);
        }
    }
    let quotient = Indicator::new(&s, &cond, has_cycle(&s)).map_err(|e| e.to_string())?;
    let folded = quotient.propagate_assuming(&[]).map_err(|e| e.to_string())?.is_none();
    let ok = survivors.is_empty();
    let what = if ok {
        format!(
            "r(0,1,2,0)=a is refuted by propagation for a = 0, 1, 2 (shift quotient refuted unassigned: {folded})"
        )
    } else {
        format!("propagation leaves r(0,1,2,0) in {survivors:?}")
    };
    within(Duration::from_secs(1), start, ok, what)
}

fn main() {
    let corpus = match load_corpus() {
        Ok(c) => c,
        Err(e) => {
            println!("FAIL corpus: {e}");
            std::process::exit(1);
        }
    };
    let start = Instant::now();
    let full = lattice_report(&corpus, &ReportOptions::new(Figure::Full).n_cap(3));
    let full_time = start.elapsed();
    let with_full = |f: &dyn Fn(&LatticeReport, Instant) -> Outcome| -> Outcome {
        match &full {
            Ok(r) => f(r, Instant::now() - full_time),
            Err(e) => Err(e.to_string()),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 atoms table", atoms_table(&corpus)),
        ("2 full table at n in {2,3}", with_full(&full_table)),
        ("3 near-unanimity chain n in {2,3,4}", with_full(&chain)),
        ("4 construction cases", cases(&corpus)),
        ("5 xi maps", xi_suite()),
        ("6 oracle equivalence", oracles()),
        ("7 guarded cyclic refutation", refutation()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
