//! The separation table report.
//!
//! A golden file lists cells `cell ROW COL CONDITION MODE [also:S,..]`: the
//! condition must hold in the polymorphism clone of the row structure and
//! fail in that of the column structure (and of every `also` structure).
//! `chain N STRUCTURE HOLDING MODE FAILING` lines pin one structure between
//! two conditions. `MODE` is `search` or `witness:ID` and says how the
//! holding side is established; the failing side is always an exhaustive
//! search. Rows and columns named `Mn` and `Bn` are instantiated for every
//! `2 <= n <= n_cap`.
//!
//! The idempotent conditions `Malcev`, `minority` and `majority` are checked
//! as holding on the structure expanded by all singletons and as failing in
//! their quasi form on the plain structure.
//!
//! JSON output carries [`REPORT_SCHEMA`]; everything except the `stats`
//! block is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Structure;
use crate::catalog;
use crate::corpus::Corpus;
use crate::csp::default_node_cap;
use crate::error::{Error, Result};
use crate::galois::has_cycle;
use crate::minorcond::{builtin, builtin_key, builtin_label, check_witness, satisfiable_in_pol, MinorCondition, SatOptions};

pub const REPORT_SCHEMA: &str = "clonelab.lattice-report/1";

/// Largest `n` accepted for the `Mn` and `Bn` families.
pub const MAX_N_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Figure {
    /// The four atoms.
    #[serde(rename = "3")]
    Atoms,
    /// The full table with the near-unanimity chain.
    #[serde(rename = "5")]
    Full,
}

impl Figure {
    pub fn parse(s: &str) -> Result<Figure> {
        match s {
            "3" | "atoms" => Ok(Figure::Atoms),
            "5" | "full" => Ok(Figure::Full),
            _ => Err(Error::UnknownKey(s.to_string())),
        }
    }

    pub fn golden_id(self) -> &'static str {
        match self {
            Figure::Atoms => "figure3",
            Figure::Full => "figure5",
        }
    }

    pub fn for_golden(id: &str) -> Result<Figure> {
        [Figure::Atoms, Figure::Full]
            .into_iter()
            .find(|f| f.golden_id() == id)
            .ok_or_else(|| Error::UnknownKey(id.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HoldsMode {
    Search,
    Witness(String),
}

impl HoldsMode {
    fn parse(s: &str, line: usize) -> Result<HoldsMode> {
        match s {
            "search" => Ok(HoldsMode::Search),
            _ => match s.strip_prefix("witness:") {
                Some(id) if !id.is_empty() => Ok(HoldsMode::Witness(id.to_string())),
                _ => Err(Error::parse(line, 1, format!("bad mode `{s}`: expected `search` or `witness:ID`"))),
            },
        }
    }

    fn label(&self) -> String {
        match self {
            HoldsMode::Search => "search".into(),
            HoldsMode::Witness(id) => format!("witness:{id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenCell {
    pub row: String,
    pub col: String,
    pub condition: String,
    pub mode: HoldsMode,
    pub also: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenChain {
    pub n: usize,
    pub structure: String,
    pub holds: String,
    pub mode: HoldsMode,
    pub fails: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Golden {
    pub cells: Vec<GoldenCell>,
    pub chain: Vec<GoldenChain>,
}

pub fn parse_golden(text: &str) -> Result<Golden> {
    let mut g = Golden::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        match words.as_slice() {
            ["cell", row, col, cond, mode, rest @ ..] => {
                resolve_condition(cond).map_err(|e| Error::parse(line, 1, e.to_string()))?;
                let mut also = Vec::new();
                for w in rest {
                    match w.strip_prefix("also:") {
                        Some(list) => also.extend(list.split(',').filter(|s| !s.is_empty()).map(str::to_string)),
                        None => return Err(Error::parse(line, 1, format!("unexpected `{w}`"))),
                    }
                }
                g.cells.push(GoldenCell {
                    row: row.to_string(),
                    col: col.to_string(),
                    condition: cond.to_string(),
                    mode: HoldsMode::parse(mode, line)?,
                    also,
                });
            }
            ["chain", n, structure, holds, mode, fails] => {
                for c in [holds, fails] {
                    resolve_condition(c).map_err(|e| Error::parse(line, 1, e.to_string()))?;
                }
                g.chain.push(GoldenChain {
                    n: n.parse().map_err(|_| Error::parse(line, 1, format!("bad chain index `{n}`")))?,
                    structure: structure.to_string(),
                    holds: holds.to_string(),
                    mode: HoldsMode::parse(mode, line)?,
                    fails: fails.to_string(),
                });
            }
            _ => {
                return Err(Error::parse(
                    line,
                    1,
                    "expected `cell ROW COL CONDITION MODE [also:..]` or `chain N STRUCTURE HOLDS MODE FAILS`",
                ))
            }
        }
    }
    Ok(g)
}

/// Canonical built-in label and whether the holding side is checked with singletons.
fn resolve_condition(label: &str) -> Result<(String, bool)> {
    let (key, idempotent) = match label {
        "Malcev" => ("QMalcev", true),
        "minority" => ("QMinority", true),
        "majority" => ("QMajority", true),
        other => (other, false),
    };
    let (name, params) = builtin_key(key)?;
    Ok((builtin_label(&name, &params), idempotent))
}

fn condition(label: &str) -> Result<MinorCondition> {
    let (name, params) = builtin_key(label)?;
    builtin(&name, &params)
}

/// Expands `Mn`/`Bn` into `M2..M{n_cap}`; other names stand for themselves.
fn instantiate(name: &str, n_cap: usize) -> Vec<String> {
    match name {
        "Mn" | "Bn" => (2..=n_cap).map(|n| format!("{}{n}", &name[..1])).collect(),
        _ => vec![name.to_string()],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    pub figure: Figure,
    pub n_cap: usize,
    pub node_cap: u64,
}

impl ReportOptions {
    pub fn new(figure: Figure) -> Self {
        ReportOptions {
            figure,
            n_cap: 3,
            node_cap: default_node_cap(),
        }
    }

    pub fn n_cap(mut self, n: usize) -> Self {
        self.n_cap = n;
        self
    }

    pub fn node_cap(mut self, cap: u64) -> Self {
        self.node_cap = cap;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Holds,
    Fails,
    Capped,
    /// A shipped witness did not pass its checks.
    WitnessRejected,
}

/// One decided question: does `condition` hold in `Pol(structure)`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub structure: String,
    pub condition: String,
    /// Whether the structure was expanded by all singletons.
    pub with_singletons: bool,
    pub mode: String,
    pub verdict: Verdict,
    /// Search nodes; absent for witness checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub row: String,
    pub col: String,
    pub condition: String,
    pub holds: Check,
    pub fails: Vec<Check>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub structure: String,
    pub holds: Check,
    pub fails: Check,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub cells: usize,
    pub chain: usize,
    pub agreeing: usize,
    /// Entries with a decided verdict that contradicts the golden file.
    pub diverging: usize,
    /// Entries left undecided by the node cap.
    pub capped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub distinct_checks: usize,
    pub wall_ms: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeReport {
    pub schema: &'static str,
    pub figure: Figure,
    pub n_cap: usize,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<CellReport>,
    /// `matrix[i][j]`: the separating condition of row `i` against column `j`, when confirmed.
    pub matrix: Vec<Vec<Option<String>>>,
    pub chain: Vec<ChainReport>,
    pub summary: Summary,
    pub stats: Stats,
}

/// Classifies a set of verdicts against their expected values.
fn classify<'a>(pairs: impl IntoIterator<Item = (&'a Check, Verdict)>) -> (bool, bool) {
    let (mut agrees, mut capped) = (true, false);
    for (c, want) in pairs {
        if c.verdict == Verdict::Capped {
            capped = true;
        }
        if c.verdict != want {
            agrees = false;
        }
    }
    (agrees, capped)
}

impl LatticeReport {
    /// 0 on full agreement, 2 on a divergence, 3 when only capped entries disagree.
    pub fn exit_code(&self) -> i32 {
        if self.summary.diverging > 0 {
            2
        } else if self.summary.capped > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self, with_stats: bool) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !with_stats {
            v.as_object_mut().expect("object").remove("stats");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("kind\trow\tcol\tcondition\tholds\tfails\tagrees\n");
        let fails = |cs: &[&Check]| {
            cs.iter()
                .map(|c| format!("{}:{}", c.structure, verdict_word(c.verdict)))
                .collect::<Vec<_>>()
                .join(",")
        };
        for c in &self.cells {
            let f: Vec<&Check> = c.fails.iter().collect();
            writeln!(
                out,
                "cell\t{}\t{}\t{}\t{}\t{}\t{}",
                c.row,
                c.col,
                c.condition,
                verdict_word(c.holds.verdict),
                fails(&f),
                c.agrees
            )
            .unwrap();
        }
        for c in &self.chain {
            writeln!(
                out,
                "chain\t{}\t{}\t{}/{}\t{}\t{}\t{}",
                c.structure,
                c.n,
                c.holds.condition,
                c.fails.condition,
                verdict_word(c.holds.verdict),
                fails(&[&c.fails]),
                c.agrees
            )
            .unwrap();
        }
        out
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "HOLDS",
        Verdict::Fails => "FAILS",
        Verdict::Capped => "CAPPED",
        Verdict::WitnessRejected => "WITNESS_REJECTED",
    }
}

/// A question to decide; equal jobs are decided once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Job {
    structure: String,
    condition: String,
    with_singletons: bool,
    mode: HoldsMode,
}

impl Job {
    fn structure(&self) -> Result<Structure> {
        let s = catalog::structure(&self.structure)?;
        Ok(if self.with_singletons { s.expand_with_singletons() } else { s })
    }

    fn run(&self, corpus: &Corpus, node_cap: u64) -> Result<Check> {
        let s = self.structure()?;
        let mut check = Check {
            structure: self.structure.clone(),
            condition: self.condition.clone(),
            with_singletons: self.with_singletons,
            mode: self.mode.label(),
            verdict: Verdict::Holds,
            nodes: None,
            detail: None,
        };
        let cond = condition(&self.condition)?;
        match &self.mode {
            HoldsMode::Search => {
                let opts = SatOptions {
                    c3_quotient: has_cycle(&s),
                    node_cap,
                };
                let r = satisfiable_in_pol(&s, &cond, &opts)?;
                check.nodes = Some(r.outcome.stats.nodes);
                check.verdict = if r.is_sat() {
                    Verdict::Holds
                } else if r.is_unsat() {
                    Verdict::Fails
                } else {
                    Verdict::Capped
                };
            }
            HoldsMode::Witness(id) => {
                let w = corpus.witness(id)?;
                let claimed = w
                    .condition
                    .as_deref()
                    .ok_or_else(|| Error::Invalid(format!("witness `{id}` names no condition")))?;
                if resolve_condition(claimed)?.0 != self.condition {
                    return Err(Error::Invalid(format!(
                        "witness `{id}` is for {claimed}, not {}",
                        self.condition
                    )));
                }
                let a = w.assignment()?;
                let wc = check_witness(&cond, &a)?;
                if !wc.holds() {
                    check.verdict = Verdict::WitnessRejected;
                    check.detail = Some(format!("{wc:?}"));
                }
                'ops: for (sym, f) in &a {
                    for (name, rel) in s.relations() {
                        if !f.preserves(rel)?.holds() {
                            check.verdict = Verdict::WitnessRejected;
                            check.detail = Some(format!("`{sym}` does not preserve {name}"));
                            break 'ops;
                        }
                    }
                }
            }
        }
        Ok(check)
    }
}

fn holds_job(structure: &str, label: &str, mode: &HoldsMode) -> Result<Job> {
    let (condition, idempotent) = resolve_condition(label)?;
    Ok(Job {
        structure: structure.to_string(),
        condition,
        with_singletons: idempotent,
        mode: mode.clone(),
    })
}

fn fails_job(structure: &str, label: &str) -> Result<Job> {
    Ok(Job {
        structure: structure.to_string(),
        condition: resolve_condition(label)?.0,
        with_singletons: false,
        mode: HoldsMode::Search,
    })
}

fn push_unique(v: &mut Vec<String>, items: Vec<String>) {
    for s in items {
        if !v.contains(&s) {
            v.push(s);
        }
    }
}

/// Evaluates the golden file of `opts.figure` and compares every entry.
pub fn lattice_report(corpus: &Corpus, opts: &ReportOptions) -> Result<LatticeReport> {
    if !(2..=MAX_N_CAP).contains(&opts.n_cap) {
        return Err(Error::BadParams {
            key: "n-cap".into(),
            reason: format!("must lie in 2..={MAX_N_CAP}"),
        });
    }
    let start = Instant::now();
    let golden = corpus.golden(opts.figure.golden_id())?;

    struct PlannedCell {
        row: String,
        col: String,
        condition: String,
        holds: Job,
        fails: Vec<Job>,
    }
    let (mut rows, mut columns) = (Vec::new(), Vec::new());
    let mut planned = Vec::new();
    for c in &golden.cells {
        push_unique(&mut rows, instantiate(&c.row, opts.n_cap));
        push_unique(&mut columns, instantiate(&c.col, opts.n_cap));
        for row in instantiate(&c.row, opts.n_cap) {
            for col in instantiate(&c.col, opts.n_cap) {
                let mut fails = vec![fails_job(&col, &c.condition)?];
                for extra in &c.also {
                    fails.push(fails_job(extra, &c.condition)?);
                }
                planned.push(PlannedCell {
                    holds: holds_job(&row, &c.condition, &c.mode)?,
                    row: row.clone(),
                    col,
                    condition: c.condition.clone(),
                    fails,
                });
            }
        }
    }
    let chain_jobs: Vec<(&GoldenChain, Job, Job)> = golden
        .chain
        .iter()
        .map(|c| {
            Ok((
                c,
                holds_job(&c.structure, &c.holds, &c.mode)?,
                fails_job(&c.structure, &c.fails)?,
            ))
        })
        .collect::<Result<_>>()?;

    let mut jobs: BTreeSet<&Job> = BTreeSet::new();
    for p in &planned {
        jobs.insert(&p.holds);
        jobs.extend(&p.fails);
    }
    for (_, h, f) in &chain_jobs {
        jobs.insert(h);
        jobs.insert(f);
    }
    let jobs: Vec<&Job> = jobs.into_iter().collect();
    let distinct_checks = jobs.len();
    let done: BTreeMap<Job, Check> = jobs
        .par_iter()
        .map(|j| Ok(((*j).clone(), j.run(corpus, opts.node_cap)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();

    let mut summary = Summary {
        cells: planned.len(),
        chain: chain_jobs.len(),
        agreeing: 0,
        diverging: 0,
        capped: 0,
    };
    let mut tally = |agrees: bool, capped: bool| {
        if agrees {
            summary.agreeing += 1;
        } else if capped {
            summary.capped += 1;
        } else {
            summary.diverging += 1;
        }
    };
    let mut cells = Vec::new();
    for p in planned {
        let holds = done[&p.holds].clone();
        let fails: Vec<Check> = p.fails.iter().map(|j| done[j].clone()).collect();
        let (agrees, capped) =
            classify(std::iter::once((&holds, Verdict::Holds)).chain(fails.iter().map(|c| (c, Verdict::Fails))));
        tally(agrees, capped);
        cells.push(CellReport {
            row: p.row,
            col: p.col,
            condition: p.condition,
            holds,
            fails,
            agrees,
        });
    }
    let mut chain = Vec::new();
    for (c, h, f) in &chain_jobs {
        let (holds, fails) = (done[h].clone(), done[f].clone());
        let (agrees, capped) = classify([(&holds, Verdict::Holds), (&fails, Verdict::Fails)]);
        tally(agrees, capped);
        chain.push(ChainReport {
            n: c.n,
            structure: c.structure.clone(),
            holds,
            fails,
            agrees,
        });
    }
    // Columns follow the row order; structures that only appear as columns come last.
    columns.sort_by_key(|c| rows.iter().position(|r| r == c).unwrap_or(rows.len()));
    let matrix = rows
        .iter()
        .map(|r| {
            columns
                .iter()
                .map(|c| {
                    cells
                        .iter()
                        .find(|x| &x.row == r && &x.col == c && x.agrees)
                        .map(|x| x.condition.clone())
                })
                .collect()
        })
        .collect();
    Ok(LatticeReport {
        schema: REPORT_SCHEMA,
        figure: opts.figure,
        n_cap: opts.n_cap,
        rows,
        columns,
        cells,
        matrix,
        chain,
        summary,
        stats: Stats {
            distinct_checks,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            threads: rayon::current_num_threads(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_corpus;

    #[test]
    fn golden_syntax() {
        let g = parse_golden("# c\ncell L3 TL2 Sigma2 search\ncell Mn Q QJ(4) witness:w also:P,Q\nchain 2 M2 QNU(3) witness:x QNU(2)\n")
            .unwrap();
        assert_eq!(g.cells.len(), 2);
        assert_eq!(g.cells[1].also, vec!["P", "Q"]);
        assert_eq!(g.cells[1].mode, HoldsMode::Witness("w".into()));
        assert_eq!(g.chain[0].n, 2);
        for (bad, line) in [
            ("cell L3 TL2 Sigma2\n", 1),
            ("\ncell L3 TL2 Nope search\n", 2),
            ("cell L3 TL2 Sigma2 guess\n", 1),
            ("cell L3 TL2 Sigma2 search extra\n", 1),
        ] {
            match parse_golden(bad) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{bad:?}"),
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn families_expand() {
        assert_eq!(instantiate("Mn", 3), vec!["M2", "M3"]);
        assert_eq!(instantiate("Q", 3), vec!["Q"]);
        assert_eq!(resolve_condition("majority").unwrap(), ("QMajority".into(), true));
        assert_eq!(resolve_condition("qj4").unwrap(), ("QJ(4)".into(), false));
    }

    #[test]
    fn atoms_agree() {
        let c = load_corpus().unwrap();
        let r = lattice_report(&c, &ReportOptions::new(Figure::Atoms)).unwrap();
        assert_eq!(r.cells.len(), 12);
        assert_eq!(r.exit_code(), 0, "{}", r.to_tsv());
        let again = lattice_report(&c, &ReportOptions::new(Figure::Atoms)).unwrap();
        assert_eq!(r.to_json(false), again.to_json(false));
    }

    #[test]
    fn n_cap_is_bounded() {
        let c = load_corpus().unwrap();
        assert!(lattice_report(&c, &ReportOptions::new(Figure::Atoms).n_cap(1)).is_err());
        assert!(lattice_report(&c, &ReportOptions::new(Figure::Atoms).n_cap(7)).is_err());
    }
}
