use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use clonelab::corpus::{corpus_selftest, load_corpus, SelftestOptions};
use clonelab::galois::{clone_generate, has_cycle, polymorphisms, pp_definable, CloneGenQuery, PolQuery};
use clonelab::homsearch::{parse_case, verify_construction, ConstructionCase};
use clonelab::minorcond::{builtin, builtin_key, parse_condition, satisfiable_in_pol, MinorCondition, SatOptions};
use clonelab::report::{lattice_report, Figure, ReportOptions};
use clonelab::textfmt::{read_text_file, TextFile};
use clonelab::{catalog, Error, Operation, Relation, Result, Structure};

#[derive(Parser)]
#[command(name = "clonelab", version, about = "Polymorphism clones and minor conditions on small domains")]
struct Cli {
    /// Structure/operation file; its names shadow catalog keys.
    #[arg(long, global = true)]
    domain_file: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Does an operation preserve a relation? Exit 0 if so, 1 with a counterexample otherwise.
    Preserves {
        #[arg(long)]
        op: String,
        /// Relation key, or `STRUCTURE.RELATION`.
        #[arg(long)]
        rel: String,
    },
    /// Enumerates the k-ary polymorphisms of a structure.
    Pol {
        #[arg(long)]
        structure: Option<String>,
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        /// Use the cyclic-shift quotient (needs the 3-cycle among the relations).
        #[arg(long)]
        c3_quotient: bool,
        #[arg(long)]
        json: bool,
    },
    /// Counts the members of a generated clone per arity.
    Genclone {
        /// Comma-separated operation keys.
        #[arg(long, value_delimiter = ',', required = true)]
        ops: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
    /// Is a relation pp-definable in a structure?
    Ppdef {
        #[arg(long)]
        rel: String,
        #[arg(long)]
        structure: Option<String>,
    },
    /// Decides a minor condition in the polymorphism clone of a structure.
    MinorSat {
        #[arg(long)]
        structure: Option<String>,
        /// Built-in key such as `QJ(4)` or `gS3`, or a path to a condition file.
        #[arg(long)]
        condition: String,
        /// Add every singleton relation first.
        #[arg(long)]
        singletons: bool,
        #[arg(long)]
        node_cap: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Checks both maps of a pp-construction case.
    Verify {
        /// Corpus id such as `q-from-p`.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        case: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Re-derives a separation table and compares it with the shipped expectation.
    LatticeReport {
        /// `3` (atoms) or `5` (full table).
        #[arg(long, default_value = "3")]
        figure: String,
        #[arg(long, default_value_t = 3)]
        n_cap: usize,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
        /// Omit the timing block.
        #[arg(long)]
        no_stats: bool,
    },
    /// Runs every corpus entry through its checker.
    Selftest {
        /// Skip the slow entries.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        xi_cap: Option<usize>,
    },
}

struct Ctx {
    file: Option<TextFile>,
}

impl Ctx {
    fn structure(&self, key: Option<&str>) -> Result<Structure> {
        match (key, &self.file) {
            (Some(k), _) => catalog::structure(k),
            (None, Some(f)) => Ok(f.structure.clone()),
            (None, None) => Err(Error::Invalid("give --structure or --domain-file".into())),
        }
    }

    fn relation(&self, key: &str) -> Result<Relation> {
        if let Some(r) = self.file.as_ref().and_then(|f| f.structure.get(key)) {
            return Ok(r.clone());
        }
        catalog::relation_or_member(key)
    }

    fn operation(&self, key: &str) -> Result<Operation> {
        if let Some(f) = &self.file {
            if let Ok(op) = f.operation(key) {
                return Ok(op.clone());
            }
        }
        catalog::operation(key)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn condition(arg: &str) -> Result<MinorCondition> {
    let p = Path::new(arg);
    if p.is_file() {
        return parse_condition(&read(p)?);
    }
    let (name, params) = builtin_key(arg)?;
    builtin(&name, &params)
}

fn row(f: &Operation) -> String {
    f.table().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<u8> {
    let ctx = Ctx {
        file: cli.domain_file.as_deref().map(read_text_file).transpose()?,
    };
    match cli.cmd {
        Cmd::Preserves { op, rel } => {
            let (f, r) = (ctx.operation(&op)?, ctx.relation(&rel)?);
            match f.preserves(&r)?.counterexample() {
                None => {
                    println!("{op} preserves {rel}");
                    Ok(0)
                }
                Some(c) => {
                    println!("{op} does not preserve {rel}");
                    for (i, col) in c.columns.iter().enumerate() {
                        println!("  t{} = {col:?}", i + 1);
                    }
                    println!("  image {:?} is not in {rel}", c.image);
                    Ok(1)
                }
            }
        }
        Cmd::Pol {
            structure,
            arity,
            cap,
            c3_quotient,
            json,
        } => {
            let s = ctx.structure(structure.as_deref())?;
            let e = polymorphisms(&s, &PolQuery::new(arity).quotient(c3_quotient).cap(cap))?;
            if json {
                let tables: Vec<&[u8]> = e.operations.iter().map(|f| f.table()).collect();
                let v = json!({
                    "arity": arity,
                    "count": e.operations.len(),
                    "exhausted": e.exhausted,
                    "operations": tables,
                });
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                for f in &e.operations {
                    println!("{}", row(f));
                }
                let more = if e.exhausted { "" } else { " (cap reached)" };
                eprintln!("{} polymorphisms of arity {arity}{more}", e.operations.len());
            }
            Ok(0)
        }
        Cmd::Genclone { ops, max_arity } => {
            let gens = ops.iter().map(|k| ctx.operation(k)).collect::<Result<Vec<_>>>()?;
            let g = clone_generate(&CloneGenQuery::new(gens, max_arity))?;
            for n in 1..=max_arity {
                println!("arity {n}: {} operations", g.of_arity(n).count());
            }
            if !g.complete {
                println!("(some arity stopped at the cap)");
            }
            Ok(0)
        }
        Cmd::Ppdef { rel, structure } => {
            let s = ctx.structure(structure.as_deref())?;
            let r = ctx.relation(&rel)?;
            let p = pp_definable(&r, &s)?;
            println!("{rel} is {}pp-definable", if p.definable { "" } else { "not " });
            if !p.definable {
                println!("closure has {} tuples (relation has {}):", p.closure.len(), r.len());
                for t in p.closure.iter() {
                    let mark = if r.contains(&t) { "" } else { "  (added)" };
                    println!("  {t:?}{mark}");
                }
            }
            Ok(0)
        }
        Cmd::MinorSat {
            structure,
            condition: key,
            singletons,
            node_cap,
            json,
        } => {
            let mut s = ctx.structure(structure.as_deref())?;
            if singletons {
                s = s.expand_with_singletons();
            }
            let cond = condition(&key)?;
            let mut opts = SatOptions {
                c3_quotient: has_cycle(&s),
                ..SatOptions::default()
            };
            if let Some(c) = node_cap {
                opts.node_cap = c;
            }
            let r = satisfiable_in_pol(&s, &cond, &opts)?;
            let verdict = if r.is_sat() {
                "SAT"
            } else if r.is_unsat() {
                "UNSAT"
            } else {
                "CAPPED"
            };
            let stats = &r.outcome.stats;
            if json {
                let witness: serde_json::Map<String, serde_json::Value> = r
                    .witness
                    .iter()
                    .flatten()
                    .map(|(k, f)| (k.clone(), json!(f.table())))
                    .collect();
                let v = json!({
                    "verdict": verdict,
                    "nodes": stats.nodes,
                    "propagations": stats.propagations,
                    "witness": witness,
                });
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                println!("{verdict}");
                for (sym, f) in r.witness.iter().flatten() {
                    println!("{sym}/{}: {}", f.arity(), row(f));
                }
                eprintln!(
                    "{} nodes, {} propagations, {:.1} ms",
                    stats.nodes,
                    stats.propagations,
                    stats.wall.as_secs_f64() * 1e3
                );
            }
            Ok(if r.is_capped() { 3 } else { 0 })
        }
        Cmd::Verify { case, file } => {
            let c: ConstructionCase = match (case, file) {
                (Some(id), _) => load_corpus()?.case(&id)?,
                (None, Some(p)) => parse_case(&read(&p)?)?,
                (None, None) => unreachable!("clap requires one"),
            };
            let r = verify_construction(&c)?;
            println!("case {} (power of size {})", r.name, r.power_size);
            println!("  g: {:?}", r.g);
            println!("  h: {:?}", r.h);
            println!("{}", if r.holds() { "PASS" } else { "FAIL" });
            Ok(if r.holds() { 0 } else { 2 })
        }
        Cmd::LatticeReport {
            figure,
            n_cap,
            out,
            no_stats,
        } => {
            let corpus = load_corpus()?;
            let r = lattice_report(&corpus, &ReportOptions::new(Figure::parse(&figure)?).n_cap(n_cap))?;
            match out {
                Out::Json => println!("{}", r.to_json(!no_stats)),
                Out::Tsv => print!("{}", r.to_tsv()),
            }
            Ok(r.exit_code() as u8)
        }
        Cmd::Selftest { quick, xi_cap } => {
            let corpus = load_corpus()?;
            let r = corpus_selftest(
                &corpus,
                &SelftestOptions {
                    quick,
                    xi_cap,
                    ..SelftestOptions::default()
                },
            );
            for o in &r.outcomes {
                let word = if o.passed { "ok  " } else { "FAIL" };
                println!("{word} {:<8} {:<14} {} ({:.0} ms)", o.kind, o.id, o.detail, o.wall.as_secs_f64() * 1e3);
            }
            Ok(if r.passed() { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
