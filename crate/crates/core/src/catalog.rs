//! Named relations, operations and structures on `{0,1,2}`.
//!
//! Keys are plain strings. Families carry their parameter in the name:
//! `B3` is the relation `{0,1}^3 \ {000}` and also the structure
//! `(C3, B2, B3)`, `M4` the structure with `le2` added, `B3pi` the structure
//! with `W` and every `R_S` of arity at most 3, `fpi4` the 5-ary operation
//! of the `Two`-family. `R_12_e_1` is `R_{S1,S2,S3}` with `S1 = {1,2}`,
//! `S2 = {}`, `S3 = {1}`.

use std::fmt;

use crate::algebra::tuple::increment_mixed;
use crate::algebra::{Operation, Relation, Structure};
use crate::error::{Error, Result};

/// Largest parameter accepted by the `n`-indexed families.
pub const MAX_FAMILY_N: usize = 6;

const D: usize = 3;

/// A parsed catalog name: a family and its integer parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CatalogKey {
    pub name: String,
    pub params: Vec<usize>,
}

impl CatalogKey {
    /// Splits a trailing number off family names like `B3`, `M4`, `fpi5`, `B3pi`.
    pub fn parse(key: &str) -> CatalogKey {
        for family in ["fpi", "B", "M"] {
            if let Some(rest) = key.strip_prefix(family) {
                let (digits, tail) = rest.split_at(rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len()));
                if !digits.is_empty() && (tail.is_empty() || (family == "B" && tail == "pi")) {
                    if let Ok(n) = digits.parse() {
                        return CatalogKey {
                            name: format!("{family}{tail}"),
                            params: vec![n],
                        };
                    }
                }
            }
        }
        CatalogKey {
            name: key.to_string(),
            params: Vec::new(),
        }
    }
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.name.as_str(), self.params.as_slice()) {
            ("Bpi", [n]) => write!(f, "B{n}pi"),
            (name, [n]) => write!(f, "{name}{n}"),
            (name, _) => write!(f, "{name}"),
        }
    }
}

fn family_n(key: &str, n: usize, min: usize) -> Result<usize> {
    if (min..=MAX_FAMILY_N).contains(&n) {
        Ok(n)
    } else {
        Err(Error::BadParams {
            key: key.to_string(),
            reason: format!("n must lie in {min}..={MAX_FAMILY_N}"),
        })
    }
}

fn pairs(tuples: &[[u8; 2]]) -> Relation {
    Relation::from_tuples(D, 2, tuples).expect("catalog literal is well-formed")
}

fn pred(arity: usize, p: impl Fn(&[u8]) -> bool) -> Relation {
    Relation::from_predicate(D, arity, p).expect("catalog relation fits")
}

fn boolean(v: u8) -> bool {
    v <= 1
}

/// `{0,1}^n` minus the all-zero tuple.
pub fn b_relation(n: usize) -> Relation {
    pred(n, |t| t.iter().all(|&v| boolean(v)) && t.contains(&1))
}

/// `R_{S_1..S_m}` on `(x_1..x_m, y_1..y_k)`; each set holds 1-based indices into the `y`s.
pub fn r_relation(sets: &[Vec<usize>]) -> Result<Relation> {
    let m = sets.len();
    let k = sets.iter().flatten().copied().max().unwrap_or(0);
    let name = r_name(sets);
    if m == 0 {
        return Err(Error::BadParams {
            key: name,
            reason: "at least one set is required".into(),
        });
    }
    for j in 1..=k {
        if !sets.iter().any(|s| s.contains(&j)) {
            return Err(Error::BadParams {
                key: name,
                reason: format!("the sets must cover 1..={k}"),
            });
        }
    }
    if sets.iter().flatten().any(|&j| j == 0) {
        return Err(Error::BadParams {
            key: name,
            reason: "set elements are 1-based".into(),
        });
    }
    Ok(pred(m + k, |t| {
        let (xs, ys) = t.split_at(m);
        xs.iter().all(|&x| boolean(x))
            && sets
                .iter()
                .zip(xs)
                .all(|(s, &x)| x != 0 || s.iter().all(|&j| boolean(ys[j - 1])))
            && t.iter().any(|&v| v != 0)
    }))
}

/// Canonical key of `R_{S_1..S_m}`, e.g. `R_12_e_1`.
pub fn r_name(sets: &[Vec<usize>]) -> String {
    let mut name = String::from("R");
    for s in sets {
        name.push('_');
        if s.is_empty() {
            name.push('e');
        } else {
            for j in s {
                name.push_str(&j.to_string());
            }
        }
    }
    name
}

fn parse_r_name(key: &str) -> Option<Vec<Vec<usize>>> {
    let rest = key.strip_prefix("R_")?;
    rest.split('_')
        .map(|part| {
            if part == "e" {
                Some(Vec::new())
            } else if !part.is_empty() && part.chars().all(|c| c.is_ascii_digit()) {
                Some(part.chars().map(|c| c as usize - '0' as usize).collect())
            } else {
                None
            }
        })
        .collect()
}

/// Every `(S_1..S_m)` with `m >= 1`, union `{1..k}` and `m + k <= n`, ordered by arity, then `m`.
pub fn r_families(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for arity in 1..=n {
        for m in 1..=arity {
            let k = arity - m;
            let subsets = 1usize << k;
            let radices = vec![subsets; m];
            let mut choice = vec![0usize; m];
            loop {
                let covered = choice.iter().fold(0usize, |acc, &s| acc | s);
                if covered == subsets - 1 {
                    out.push(
                        choice
                            .iter()
                            .map(|&mask| (1..=k).filter(|j| mask >> (j - 1) & 1 == 1).collect())
                            .collect(),
                    );
                }
                if !increment_mixed(&mut choice, &radices) {
                    break;
                }
            }
        }
    }
    out
}

/// Base relation keys (families listed by a representative).
pub const RELATION_KEYS: &[&str] = &[
    "C3", "Req3", "Req2", "Rimp2", "B2", "le2", "L2", "L3", "T", "C2", "N", "Nstar", "W", "neq",
    "c0", "c1", "c2", "U01", "R_1_e",
];

pub fn relation(key: &str) -> Result<Relation> {
    let rel = match key {
        "C3" => pairs(&[[0, 1], [1, 2], [2, 0]]),
        "Req3" => pred(3, |t| boolean(t[0]) && (t[0] != 0 || t[1] == t[2])),
        "Req2" => pred(3, |t| boolean(t[0]) && (t[0] != 0 || (t[1] == t[2] && boolean(t[1])))),
        "Rimp2" => pred(3, |t| boolean(t[0]) && boolean(t[1]) && (t[0] != 0 || t[1] != 0 || t[2] == 0)),
        "le2" => pairs(&[[0, 0], [0, 1], [1, 1]]),
        "L2" => pred(3, |t| t.iter().all(|&v| boolean(v)) && (t[0] + t[1] + t[2]) % 2 == 0),
        "L3" => pred(3, |t| (t[0] + t[1] + t[2]) % 3 == 0),
        "T" => pairs(&[[0, 1], [1, 0], [2, 2]]),
        "C2" => pairs(&[[0, 1], [1, 0]]),
        "N" => pairs(&[[0, 0], [1, 0], [1, 1], [1, 2]]),
        "Nstar" => pairs(&[[0, 0], [0, 1], [1, 1], [0, 2]]),
        "W" => pairs(&[[0, 0], [0, 1], [1, 0], [1, 1], [1, 2]]),
        "neq" => pred(2, |t| t[0] != t[1]),
        "c0" | "c1" | "c2" => {
            let v = key.as_bytes()[1] - b'0';
            pred(1, |t| t[0] == v)
        }
        "U01" => pred(1, |t| boolean(t[0])),
        _ => {
            if let Some(sets) = parse_r_name(key) {
                return r_relation(&sets);
            }
            let ck = CatalogKey::parse(key);
            match (ck.name.as_str(), ck.params.as_slice()) {
                ("B", &[n]) => b_relation(family_n(key, n, 1)?),
                _ => return Err(Error::UnknownKey(key.to_string())),
            }
        }
    };
    Ok(rel)
}

fn table2(rows: [[u8; 3]; 3]) -> Operation {
    Operation::new(D, 2, rows.concat()).expect("catalog literal is well-formed")
}

fn op(arity: usize, f: impl Fn(&[u8]) -> u8) -> Operation {
    Operation::from_fn(D, arity, f).expect("catalog operation fits")
}

#[inline]
fn vee(a: u8, b: u8) -> u8 {
    const T: [[u8; 3]; 3] = [[0, 1, 0], [1, 1, 2], [0, 2, 2]];
    T[a as usize][b as usize]
}

#[inline]
fn wedge(a: u8, b: u8) -> u8 {
    const T: [[u8; 3]; 3] = [[0, 0, 2], [0, 1, 1], [2, 1, 2]];
    T[a as usize][b as usize]
}

fn distinct(t: &[u8]) -> usize {
    let mut seen = [false; 3];
    for &v in t {
        seen[v as usize] = true;
    }
    seen.iter().filter(|&&s| s).count()
}

/// Values occurring at least twice, as a bitmask over `{0,1,2}`.
fn two(t: &[u8]) -> u8 {
    let mut count = [0u8; 3];
    for &v in t {
        count[v as usize] += 1;
    }
    (0..3).filter(|&v| count[v] >= 2).fold(0, |acc, v| acc | 1 << v)
}

fn fpi_n(n: usize) -> Operation {
    op(n + 1, |t| {
        let mask = two(t);
        let members: Vec<u8> = (0..3).filter(|&v| mask >> v & 1 == 1).collect();
        match members.as_slice() {
            [a] => *a,
            [a, b] => vee(*a, *b),
            _ => t[0],
        }
    })
}

pub const OPERATION_KEYS: &[&str] = &[
    "vee3", "wedge3", "plus", "oplus", "m", "p", "r4", "fpi3", "fpiinf", "f0inf",
];

pub fn operation(key: &str) -> Result<Operation> {
    let f = match key {
        "vee3" => table2([[0, 1, 0], [1, 1, 2], [0, 2, 2]]),
        "wedge3" => table2([[0, 0, 2], [0, 1, 1], [2, 1, 2]]),
        "oplus" => op(2, |t| (2 * (t[0] + t[1])) % 3),
        "plus" => op(3, |t| match t {
            [x, y, z] if y == z => *x,
            [x, y, z] if x == z => *y,
            [x, y, _] if x == y => t[2],
            _ => t[0],
        }),
        "m" => op(3, |t| {
            let (x, y, z) = (t[0], t[1], t[2]);
            if distinct(t) <= 2 {
                vee(vee(wedge(x, y), wedge(x, z)), wedge(y, z))
            } else {
                x
            }
        }),
        "p" => op(3, |t| if distinct(t) <= 2 { t[0] } else { (t[0] + 1) % 3 }),
        "r4" => op(4, |t| {
            if distinct(&t[..3]) <= 2 {
                vee(vee(t[0], t[1]), t[2])
            } else {
                t[3]
            }
        }),
        "fpiinf" => op(3, |t| {
            if distinct(t) <= 2 {
                vee(t[0], wedge(t[1], t[2]))
            } else {
                t[0]
            }
        }),
        "f0inf" => op(3, |t| if t[0] == t[2] { vee(t[0], t[1]) } else { t[0] }),
        _ => {
            let ck = CatalogKey::parse(key);
            match (ck.name.as_str(), ck.params.as_slice()) {
                ("fpi", &[n]) => fpi_n(family_n(key, n, 3)?),
                _ => return Err(Error::UnknownKey(key.to_string())),
            }
        }
    };
    Ok(f)
}

pub const STRUCTURE_KEYS: &[&str] = &[
    "K3", "K3C3", "TLle", "Lle", "TL2", "L2", "L3", "TN", "DM", "TD", "D", "W", "Q", "P", "M2",
    "M3", "B2", "B3", "B3pi", "M", "N2", "C3", "C3_0", "C3_01", "T",
];

fn build(names: &[&str]) -> Result<Structure> {
    let mut s = Structure::new(D)?;
    for &n in names {
        s.add(n, relation(n)?)?;
    }
    Ok(s)
}

pub fn structure(key: &str) -> Result<Structure> {
    let names: &[&str] = match key {
        "K3" => &["neq", "c0", "c1", "c2"],
        "K3C3" => &["C3", "neq"],
        "TLle" => &["C3", "T", "L2", "le2"],
        "Lle" => &["C3", "L2", "le2"],
        "TL2" => &["C3", "T", "L2"],
        "L2" => &["C3", "L2"],
        "L3" => &["C3", "L3"],
        "TN" => &["C3", "T", "N", "Nstar"],
        "DM" => &["C3", "C2", "le2"],
        "TD" => &["C3", "C2", "T"],
        "D" => &["C3", "C2"],
        "W" => &["C3", "Req3"],
        "Q" => &["C3", "Req2"],
        "P" => &["C3", "Rimp2"],
        "M" => &["C3", "le2"],
        "N2" => &["C3", "N", "B2"],
        "C3" => &["C3"],
        "C3_0" => &["C3", "c0"],
        "C3_01" => &["C3", "U01"],
        "T" => &["C3", "T"],
        _ => {
            let ck = CatalogKey::parse(key);
            return match (ck.name.as_str(), ck.params.as_slice()) {
                ("M", &[n]) => {
                    let n = family_n(key, n, 2)?;
                    let mut s = build(&["C3", "le2"])?;
                    for i in 2..=n {
                        s.add(format!("B{i}"), b_relation(i))?;
                    }
                    Ok(s)
                }
                ("B", &[n]) => {
                    let n = family_n(key, n, 2)?;
                    let mut s = build(&["C3"])?;
                    for i in 2..=n {
                        s.add(format!("B{i}"), b_relation(i))?;
                    }
                    Ok(s)
                }
                ("Bpi", &[n]) => {
                    let n = family_n(key, n, 3)?;
                    let mut s = build(&["C3", "W"])?;
                    for sets in r_families(n) {
                        s.add(r_name(&sets), r_relation(&sets)?)?;
                    }
                    Ok(s)
                }
                _ => Err(Error::UnknownKey(key.to_string())),
            };
        }
    };
    build(names)
}

/// Resolves a relation either as a catalog key or as `STRUCTURE.RELATION`.
pub fn relation_or_member(key: &str) -> Result<Relation> {
    match key.split_once('.') {
        Some((s, r)) => Ok(structure(s)?.relation(r)?.clone()),
        None => relation(key),
    }
}
