//! Plain-text structure and operation files.
//!
//! ```text
//! domain 3
//! relation C3 arity 2
//! 0 1
//! 1 2
//! 2 0
//! operation swap arity 1
//! 1 0 2
//! ```
//!
//! A relation block lists one tuple per line; an operation block lists
//! `d^k` values in encoding order, split over lines freely. `#` starts a
//! comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::algebra::tuple::table_len;
use crate::algebra::{Operation, Relation, Structure};
use crate::error::{Error, Result};

/// Contents of a structure/operation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextFile {
    pub structure: Structure,
    pub operations: Vec<(String, Operation)>,
}

impl TextFile {
    pub fn domain_size(&self) -> usize {
        self.structure.domain_size()
    }

    pub fn operation(&self, name: &str) -> Result<&Operation> {
        self.operations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::UnknownKey(name.to_string()))
    }
}

enum Block {
    None,
    Relation { name: String, arity: usize, tuples: Vec<Vec<u8>> },
    Operation { name: String, arity: usize, line: usize, values: Vec<u8> },
}

fn value(word: &str, d: usize, line: usize) -> Result<u8> {
    let v: usize = word
        .parse()
        .map_err(|_| Error::parse(line, 1, format!("expected a value, found `{word}`")))?;
    if v >= d {
        return Err(Error::parse(line, 1, format!("value {v} is outside the domain of size {d}")));
    }
    Ok(v as u8)
}

fn header(rest: &[&str], kind: &str, line: usize) -> Result<(String, usize)> {
    match rest {
        [name, "arity", k] => {
            let k = k
                .parse()
                .map_err(|_| Error::parse(line, 1, format!("bad arity `{k}`")))?;
            Ok((name.to_string(), k))
        }
        _ => Err(Error::parse(line, 1, format!("expected `{kind} NAME arity K`"))),
    }
}

pub fn parse_text(text: &str) -> Result<TextFile> {
    let mut d: Option<usize> = None;
    let mut structure: Option<Structure> = None;
    let mut operations: Vec<(String, Operation)> = Vec::new();
    let mut block = Block::None;
    let close = |block: Block, structure: &mut Option<Structure>, ops: &mut Vec<(String, Operation)>, d: usize| -> Result<()> {
        match block {
            Block::None => Ok(()),
            Block::Relation { name, arity, tuples } => {
                let rel = Relation::from_tuples(d, arity, tuples)?;
                structure.as_mut().expect("domain precedes blocks").add(name, rel)
            }
            Block::Operation { name, arity, line, values } => {
                let want = table_len(d, arity)?;
                if values.len() != want {
                    return Err(Error::parse(
                        line,
                        1,
                        format!("operation `{name}` needs {want} values, found {}", values.len()),
                    ));
                }
                if ops.iter().any(|(n, _)| *n == name) {
                    return Err(Error::parse(line, 1, format!("operation `{name}` is defined twice")));
                }
                ops.push((name, Operation::new(d, arity, values)?));
                Ok(())
            }
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        match words[0] {
            "domain" => {
                if d.is_some() {
                    return Err(Error::parse(line, 1, "`domain` given twice"));
                }
                let n = match words.as_slice() {
                    [_, n] => n.parse().map_err(|_| Error::parse(line, 1, "`domain` needs an integer"))?,
                    _ => return Err(Error::parse(line, 1, "`domain` needs an integer")),
                };
                structure = Some(Structure::new(n)?);
                d = Some(n);
            }
            kw @ ("relation" | "operation") => {
                let dd = d.ok_or_else(|| Error::parse(line, 1, "`domain` must come first"))?;
                close(std::mem::replace(&mut block, Block::None), &mut structure, &mut operations, dd)
                    .map_err(|e| at_line(e, line))?;
                let (name, arity) = header(&words[1..], kw, line)?;
                block = if kw == "relation" {
                    if structure.as_ref().is_some_and(|s| s.get(&name).is_some()) {
                        return Err(Error::parse(line, 1, format!("relation `{name}` is defined twice")));
                    }
                    Block::Relation { name, arity, tuples: Vec::new() }
                } else {
                    Block::Operation { name, arity, line, values: Vec::new() }
                };
            }
            _ => {
                let dd = d.ok_or_else(|| Error::parse(line, 1, "`domain` must come first"))?;
                match &mut block {
                    Block::None => return Err(Error::parse(line, 1, format!("unexpected `{}`", words[0]))),
                    Block::Relation { arity, tuples, .. } => {
                        if words.len() != *arity {
                            return Err(Error::parse(
                                line,
                                1,
                                format!("expected {} values, found {}", arity, words.len()),
                            ));
                        }
                        tuples.push(words.iter().map(|w| value(w, dd, line)).collect::<Result<_>>()?);
                    }
                    Block::Operation { values, .. } => {
                        for w in &words {
                            values.push(value(w, dd, line)?);
                        }
                    }
                }
            }
        }
    }
    let d = d.ok_or_else(|| Error::parse(1, 1, "missing `domain` line"))?;
    let end = text.lines().count().max(1);
    close(block, &mut structure, &mut operations, d).map_err(|e| at_line(e, end))?;
    Ok(TextFile {
        structure: structure.expect("set with the domain"),
        operations,
    })
}

/// Attaches a line number to errors that do not carry one.
fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, 1, other.to_string()),
    }
}

pub fn read_text_file(path: &Path) -> Result<TextFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_text(&text)
}

/// Writes `structure` and `operations` in the file format; parses back to the same content.
pub fn write_text(structure: &Structure, operations: &[(String, Operation)]) -> String {
    let mut out = String::new();
    let d = structure.domain_size();
    writeln!(out, "domain {d}").unwrap();
    for (name, rel) in structure.relations() {
        writeln!(out, "relation {name} arity {}", rel.arity()).unwrap();
        for t in rel.iter() {
            let words: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", words.join(" ")).unwrap();
        }
    }
    for (name, f) in operations {
        writeln!(out, "operation {name} arity {}", f.arity()).unwrap();
        for row in f.table().chunks(d) {
            let words: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", words.join(" ")).unwrap();
        }
    }
    out
}
