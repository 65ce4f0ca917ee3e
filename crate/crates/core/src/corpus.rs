//! The shipped data corpus: construction cases, pp-definitions, minor
//! conditions, witnesses and golden report expectations.
//!
//! `index.tsv` lists one entry per line as tab-separated
//! `id kind path expect anchor`. `expect` is the built-in key for `mc`
//! entries and the enumeration cap for the `xi` entry, `-` otherwise. The
//! anchor is a short description of the claim the entry backs; it is
//! attached to every load or check failure of that entry.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::catalog;
use crate::error::{Error, Result};
use crate::homsearch::{check_xi, parse_case, verify_construction, ConstructionCase};
use crate::minorcond::{builtin, builtin_key, check_witness, parse_condition, parse_witness, WitnessFile};
use crate::ppform::{eval_program, parse_program};
use crate::report::{lattice_report, parse_golden, Figure, Golden, ReportOptions};

/// Environment variable overriding the corpus directory.
pub const CORPUS_ENV: &str = "CLONELAB_CORPUS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Case,
    Pp,
    Mc,
    Witness,
    Golden,
    Xi,
}

impl EntryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::Case => "case",
            EntryKind::Pp => "pp",
            EntryKind::Mc => "mc",
            EntryKind::Witness => "witness",
            EntryKind::Golden => "golden",
            EntryKind::Xi => "xi",
        }
    }
}

impl FromStr for EntryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "case" => EntryKind::Case,
            "pp" => EntryKind::Pp,
            "mc" => EntryKind::Mc,
            "witness" => EntryKind::Witness,
            "golden" => EntryKind::Golden,
            "xi" => EntryKind::Xi,
            _ => return Err(Error::UnknownKey(s.to_string())),
        })
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: EntryKind,
    /// Relative to the corpus root.
    pub path: Option<PathBuf>,
    pub expect: Option<String>,
    pub anchor: String,
}

impl CorpusEntry {
    fn wrap(&self, e: Error) -> Error {
        Error::Corpus {
            id: self.id.clone(),
            anchor: self.anchor.clone(),
            source: Box::new(e),
        }
    }
}

/// The loaded index. Files are read on demand.
#[derive(Debug, Clone)]
pub struct Corpus {
    root: PathBuf,
    entries: Vec<CorpusEntry>,
}

/// `$CLONELAB_CORPUS`, or the `corpus` directory of this crate.
pub fn default_root() -> PathBuf {
    std::env::var_os(CORPUS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus"))
}

/// Loads the index from [`default_root`].
pub fn load_corpus() -> Result<Corpus> {
    Corpus::load(&default_root())
}

fn dash(s: &str) -> Option<String> {
    (s != "-").then(|| s.to_string())
}

impl Corpus {
    /// Reads `index.tsv` and checks that every listed file exists.
    pub fn load(root: &Path) -> Result<Corpus> {
        let index = root.join("index.tsv");
        let text = std::fs::read_to_string(&index).map_err(|e| Error::Io {
            path: index.display().to_string(),
            message: e.to_string(),
        })?;
        let mut entries: Vec<CorpusEntry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').collect();
            let [id, kind, path, expect, anchor] = cols[..] else {
                return Err(Error::parse(line, 1, format!("expected 5 tab-separated columns, found {}", cols.len())));
            };
            let kind: EntryKind = kind
                .parse()
                .map_err(|_| Error::parse(line, 1, format!("unknown entry kind `{kind}`")))?;
            if entries.iter().any(|e| e.id == id) {
                return Err(Error::parse(line, 1, format!("duplicate entry `{id}`")));
            }
            let entry = CorpusEntry {
                id: id.to_string(),
                kind,
                path: dash(path).map(PathBuf::from),
                expect: dash(expect),
                anchor: anchor.to_string(),
            };
            if kind != EntryKind::Xi && entry.path.is_none() {
                return Err(Error::parse(line, 1, format!("entry `{id}` needs a file")));
            }
            if let Some(p) = &entry.path {
                let full = root.join(p);
                if !full.is_file() {
                    return Err(entry.wrap(Error::Io {
                        path: full.display().to_string(),
                        message: "missing file".into(),
                    }));
                }
            }
            entries.push(entry);
        }
        Ok(Corpus {
            root: root.to_path_buf(),
            entries,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn of_kind(&self, kind: EntryKind) -> impl Iterator<Item = &CorpusEntry> {
        self.entries.iter().filter(move |e| e.kind == kind)
    }

    pub fn entry(&self, id: &str) -> Result<&CorpusEntry> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownKey(id.to_string()))
    }

    fn entry_of(&self, id: &str, kind: EntryKind) -> Result<&CorpusEntry> {
        let e = self.entry(id)?;
        if e.kind != kind {
            return Err(Error::Invalid(format!("corpus entry `{id}` is a {} entry, not {kind}", e.kind)));
        }
        Ok(e)
    }

    /// The file contents of an entry.
    pub fn read(&self, entry: &CorpusEntry) -> Result<String> {
        let p = entry
            .path
            .as_ref()
            .ok_or_else(|| entry.wrap(Error::Invalid("entry has no file".into())))?;
        let full = self.root.join(p);
        std::fs::read_to_string(&full).map_err(|e| {
            entry.wrap(Error::Io {
                path: full.display().to_string(),
                message: e.to_string(),
            })
        })
    }

    fn parsed<T>(&self, id: &str, kind: EntryKind, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
        let e = self.entry_of(id, kind)?;
        parse(&self.read(e)?).map_err(|err| e.wrap(err))
    }

    pub fn case(&self, id: &str) -> Result<ConstructionCase> {
        self.parsed(id, EntryKind::Case, parse_case)
    }

    pub fn witness(&self, id: &str) -> Result<WitnessFile> {
        self.parsed(id, EntryKind::Witness, parse_witness)
    }

    pub fn golden(&self, id: &str) -> Result<Golden> {
        self.parsed(id, EntryKind::Golden, parse_golden)
    }

    /// The source structure key and the program of a `.pp` entry.
    pub fn pp(&self, id: &str) -> Result<(String, crate::ppform::PpProgram)> {
        self.parsed(id, EntryKind::Pp, parse_pp_file)
    }
}

/// A `.pp` file is an `in KEY` line followed by `let` bindings.
fn parse_pp_file(text: &str) -> Result<(String, crate::ppform::PpProgram)> {
    let mut source = None;
    let mut rest = String::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if let Some(key) = body.strip_prefix("in ") {
            if source.is_some() {
                return Err(Error::parse(i + 1, 1, "`in` given twice"));
            }
            source = Some(key.trim().to_string());
            rest.push('\n');
        } else {
            rest.push_str(raw);
            rest.push('\n');
        }
    }
    let source = source.ok_or_else(|| Error::parse(1, 1, "missing `in STRUCTURE` line"))?;
    Ok((source, parse_program(&rest)?))
}

/// Result of checking one entry.
#[derive(Debug, Clone)]
pub struct EntryOutcome {
    pub id: String,
    pub kind: EntryKind,
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub outcomes: Vec<EntryOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EntryOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestOptions {
    /// Overrides the cap listed for the `xi` entry.
    pub xi_cap: Option<usize>,
    pub n_cap: usize,
    /// Skip `xi` and `golden` entries, the slow ones.
    pub quick: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            xi_cap: None,
            n_cap: 3,
            quick: false,
        }
    }
}

/// Runs every entry through its verifier.
pub fn corpus_selftest(corpus: &Corpus, opts: &SelftestOptions) -> SelftestReport {
    let mut outcomes = Vec::new();
    for e in corpus.entries() {
        if opts.quick && matches!(e.kind, EntryKind::Xi | EntryKind::Golden) {
            continue;
        }
        let start = Instant::now();
        let (passed, detail) = match check_entry(corpus, e, opts) {
            Ok(Ok(detail)) => (true, detail),
            Ok(Err(detail)) => (false, detail),
            Err(err) => (false, e.wrap(err).to_string()),
        };
        outcomes.push(EntryOutcome {
            id: e.id.clone(),
            kind: e.kind,
            anchor: e.anchor.clone(),
            passed,
            detail,
            wall: start.elapsed(),
        });
    }
    SelftestReport { outcomes }
}

type Verdict = std::result::Result<String, String>;

fn check_entry(corpus: &Corpus, e: &CorpusEntry, opts: &SelftestOptions) -> Result<Verdict> {
    match e.kind {
        EntryKind::Case => {
            let r = verify_construction(&corpus.case(&e.id)?)?;
            if r.holds() {
                Ok(Ok(format!("g and h are homomorphisms (power of size {})", r.power_size)))
            } else {
                Ok(Err(format!("g: {:?}, h: {:?}", r.g, r.h)))
            }
        }
        EntryKind::Pp => {
            let (source, program) = corpus.pp(&e.id)?;
            let s = catalog::structure(&source)?;
            let defined = eval_program(&program, &s)?;
            let mut checked = Vec::new();
            for b in &program.bindings {
                // Names that are also catalog relations must agree with them.
                if let Ok(expected) = catalog::relation(&b.name) {
                    if defined.relation(&b.name)? != &expected {
                        return Ok(Err(format!("`{}` differs from the catalog relation", b.name)));
                    }
                    checked.push(b.name.clone());
                }
            }
            if checked.is_empty() {
                return Ok(Err("no binding names a catalog relation".into()));
            }
            Ok(Ok(format!("{} defined in {source}", checked.join(", "))))
        }
        EntryKind::Mc => {
            let key = e
                .expect
                .as_deref()
                .ok_or_else(|| Error::Invalid("mc entry needs a built-in key".into()))?;
            let parsed = parse_condition(&corpus.read(e)?).map_err(|err| e.wrap(err))?;
            let (name, params) = builtin_key(key)?;
            let reference = builtin(&name, &params)?;
            if parsed.is_subset_of(&reference) && reference.is_subset_of(&parsed) {
                Ok(Ok(format!("equals the built-in {key}")))
            } else {
                Ok(Err(format!("differs from the built-in {key}")))
            }
        }
        EntryKind::Witness => {
            let w = corpus.witness(&e.id)?;
            let key = w
                .condition
                .as_deref()
                .ok_or_else(|| Error::Invalid("witness names no condition".into()))?;
            let (name, params) = builtin_key(key)?;
            let cond = builtin(&name, &params)?;
            let a = w.assignment()?;
            let check = check_witness(&cond, &a)?;
            if !check.holds() {
                return Ok(Err(format!("identities fail: {check:?}")));
            }
            for s_key in &w.structures {
                let s = catalog::structure(s_key)?;
                for (sym, f) in &a {
                    for (rel_name, rel) in s.relations() {
                        if !f.preserves(rel)?.holds() {
                            return Ok(Err(format!("`{sym}` does not preserve {rel_name} of {s_key}")));
                        }
                    }
                }
            }
            Ok(Ok(format!("{key} holds in {}", w.structures.join(" "))))
        }
        EntryKind::Golden => {
            let figure = Figure::for_golden(&e.id)?;
            let r = lattice_report(corpus, &ReportOptions::new(figure).n_cap(opts.n_cap))?;
            if r.exit_code() == 0 {
                Ok(Ok(format!("{} cells and {} chain checks agree", r.cells.len(), r.chain.len())))
            } else {
                Ok(Err(format!(
                    "{} diverging, {} capped",
                    r.summary.diverging, r.summary.capped
                )))
            }
        }
        EntryKind::Xi => {
            let listed = e.expect.as_deref().map(str::parse::<usize>).transpose();
            let cap = match (opts.xi_cap, listed) {
                (Some(c), _) => c,
                (None, Ok(Some(c))) => c,
                _ => return Err(Error::Invalid("xi entry needs a numeric cap".into())),
            };
            let r = check_xi(cap)?;
            if r.holds() {
                Ok(Ok(format!(
                    "{} ternary and {} 4-ary polymorphisms checked",
                    r.ternary, r.quaternary
                )))
            } else {
                Ok(Err(r.failures.join("; ")))
            }
        }
    }
}
