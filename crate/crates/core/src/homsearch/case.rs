use std::fmt;

use super::{verify_map, MapCheck};
use crate::algebra::tuple::{decode, encode};
use crate::algebra::Structure;
use crate::catalog;
use crate::error::{Error, Result};
use crate::ppform::{coordinate_name, parse_power, pp_power, PpPowerSpec};

/// Right-hand side of an `h` rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HValue {
    Const(u8),
    /// Coordinate (0-based position) plus an offset modulo the target domain size.
    Coord { index: usize, offset: i8 },
}

/// `h <pattern> = <value>`; `None` in the pattern matches anything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRule {
    pub pattern: Vec<Option<u8>>,
    pub value: HValue,
}

impl HRule {
    fn matches(&self, coords: &[u8]) -> bool {
        self.pattern.iter().zip(coords).all(|(p, c)| p.is_none_or(|p| p == *c))
    }
}

/// A pp-construction of `target` in `power.source`: the power, a map
/// `g: target -> power` and a map `h: power -> target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionCase {
    pub name: String,
    pub target: String,
    pub power: PpPowerSpec,
    /// Coordinates of `g(a)` for each target element `a`.
    pub g: Vec<Vec<u8>>,
    /// Rules for `h`, first match wins.
    pub h: Vec<HRule>,
}

/// Outcome of checking both maps of a case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionReport {
    pub name: String,
    pub power_size: usize,
    pub g: MapCheck,
    pub h: MapCheck,
}

impl ConstructionReport {
    pub fn holds(&self) -> bool {
        self.g.holds() && self.h.holds()
    }
}

impl ConstructionCase {
    /// `g` as a map into the encoded power domain.
    pub fn g_table(&self, source_d: usize) -> Result<Vec<u8>> {
        self.g
            .iter()
            .map(|coords| {
                if coords.len() != self.power.dim {
                    return Err(Error::ArityMismatch {
                        expected: self.power.dim,
                        found: coords.len(),
                    });
                }
                if let Some(&v) = coords.iter().find(|&&v| v as usize >= source_d) {
                    return Err(Error::ValueOutOfDomain {
                        value: v as usize,
                        size: source_d,
                    });
                }
                Ok(encode(source_d, coords) as u8)
            })
            .collect()
    }

    /// `h` materialized over every power element.
    pub fn h_table(&self, source_d: usize, target_d: usize) -> Result<Vec<u8>> {
        let size = source_d.pow(self.power.dim as u32);
        (0..size)
            .map(|i| {
                let coords = decode(source_d, self.power.dim, i);
                let rule = self
                    .h
                    .iter()
                    .find(|r| r.matches(&coords))
                    .ok_or_else(|| Error::Invalid(format!("h is undefined at {coords:?}")))?;
                let v = match rule.value {
                    HValue::Const(c) => c as usize,
                    HValue::Coord { index, offset } => {
                        (coords[index] as i64 + offset as i64).rem_euclid(target_d as i64) as usize
                    }
                };
                if v >= target_d {
                    return Err(Error::ValueOutOfDomain { value: v, size: target_d });
                }
                Ok(v as u8)
            })
            .collect()
    }
}

/// Builds the power and checks that `g` and `h` are homomorphisms.
pub fn verify_construction(case: &ConstructionCase) -> Result<ConstructionReport> {
    let source = catalog::structure(&case.power.source)?;
    let target = catalog::structure(&case.target)?;
    verify_construction_with(case, &source, &target)
}

pub(crate) fn verify_construction_with(
    case: &ConstructionCase,
    source: &Structure,
    target: &Structure,
) -> Result<ConstructionReport> {
    let power = pp_power(&case.power, source)?;
    if case.g.len() != target.domain_size() {
        return Err(Error::Invalid(format!(
            "g has {} entries for a domain of size {}",
            case.g.len(),
            target.domain_size()
        )));
    }
    let g = case.g_table(source.domain_size())?;
    let h = case.h_table(source.domain_size(), target.domain_size())?;
    Ok(ConstructionReport {
        name: case.name.clone(),
        power_size: power.domain_size(),
        g: verify_map(&g, target, &power)?,
        h: verify_map(&h, &power, target)?,
    })
}

fn parse_value(s: &str, names: &[String], line: usize) -> Result<HValue> {
    let bad = || Error::parse(line, 1, format!("bad h value `{s}`"));
    if let Ok(c) = s.parse::<u8>() {
        return Ok(HValue::Const(c));
    }
    let (var, offset) = match s.find(['+', '-']) {
        Some(p) => {
            let k: i8 = s[p + 1..].parse().map_err(|_| bad())?;
            (&s[..p], if s.as_bytes()[p] == b'+' { k } else { -k })
        }
        None => (s, 0),
    };
    let index = names.iter().position(|n| n == var).ok_or_else(bad)?;
    Ok(HValue::Coord { index, offset })
}

fn parse_values(words: &[&str], line: usize) -> Result<Vec<Option<u8>>> {
    words
        .iter()
        .map(|w| match *w {
            "_" => Ok(None),
            w => w
                .parse::<u8>()
                .map(Some)
                .map_err(|_| Error::parse(line, 1, format!("bad coordinate `{w}`"))),
        })
        .collect()
}

/// Parses a `.case` file: `case NAME`, `target KEY`, the lines of a power
/// spec, `g <elem> = <coords>` and `h <pattern> = <value>` lines.
pub fn parse_case(text: &str) -> Result<ConstructionCase> {
    let mut name = None;
    let mut target = None;
    let mut g_lines: Vec<(usize, u8, Vec<u8>)> = Vec::new();
    let mut h_lines: Vec<(usize, Vec<Option<u8>>, String)> = Vec::new();
    let mut power_text = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        let mut words = body.split_whitespace();
        let head = words.next();
        let rest: Vec<&str> = words.collect();
        match head {
            Some("case") => match rest.as_slice() {
                [n] => name = Some(n.to_string()),
                _ => return Err(Error::parse(line, 1, "`case` takes one name")),
            },
            Some("target") => match rest.as_slice() {
                [t] => target = Some(t.to_string()),
                _ => return Err(Error::parse(line, 1, "`target` takes one structure key")),
            },
            Some(kind @ ("g" | "h")) => {
                let eq = rest
                    .iter()
                    .position(|w| *w == "=")
                    .ok_or_else(|| Error::parse(line, 1, format!("`{kind}` line needs `=`")))?;
                let (lhs, rhs) = (&rest[..eq], &rest[eq + 1..]);
                if kind == "g" {
                    let elem = match lhs {
                        [e] => e.parse::<u8>().map_err(|_| Error::parse(line, 1, "bad g argument"))?,
                        _ => return Err(Error::parse(line, 1, "`g` takes one element")),
                    };
                    let coords = parse_values(rhs, line)?
                        .into_iter()
                        .map(|c| c.ok_or_else(|| Error::parse(line, 1, "g coordinates cannot be `_`")))
                        .collect::<Result<Vec<u8>>>()?;
                    g_lines.push((line, elem, coords));
                } else {
                    let value = match rhs {
                        [v] => v.to_string(),
                        _ => return Err(Error::parse(line, 1, "`h` takes one value")),
                    };
                    h_lines.push((line, parse_values(lhs, line)?, value));
                }
            }
            // Everything else belongs to the power spec; other lines stay
            // blank so its line numbers match the file.
            _ => power_text.push_str(raw),
        }
        power_text.push('\n');
    }
    let power = parse_power(&power_text)?;
    let name = name.ok_or_else(|| Error::parse(1, 1, "missing `case` line"))?;
    let target = target.ok_or_else(|| Error::parse(1, 1, "missing `target` line"))?;
    let mut g: Vec<Option<Vec<u8>>> = Vec::new();
    for (line, elem, coords) in g_lines {
        if coords.len() != power.dim {
            return Err(Error::parse(line, 1, format!("g needs {} coordinates", power.dim)));
        }
        let e = elem as usize;
        if g.len() <= e {
            g.resize(e + 1, None);
        }
        if g[e].replace(coords).is_some() {
            return Err(Error::parse(line, 1, format!("g({elem}) is given twice")));
        }
    }
    let g = g
        .into_iter()
        .enumerate()
        .map(|(e, c)| c.ok_or_else(|| Error::Invalid(format!("g({e}) is missing"))))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = (power.base..power.base + power.dim)
        .map(|j| coordinate_name("x", j))
        .collect();
    let mut h = Vec::new();
    for (line, pattern, value) in h_lines {
        if pattern.len() != power.dim {
            return Err(Error::parse(line, 1, format!("h patterns need {} coordinates", power.dim)));
        }
        h.push(HRule {
            pattern,
            value: parse_value(&value, &names, line)?,
        });
    }
    Ok(ConstructionCase { name, target, power, g, h })
}

impl fmt::Display for ConstructionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case {}", self.name)?;
        writeln!(f, "target {}", self.target)?;
        write!(f, "{}", self.power)?;
        let show = |v: &[u8]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        for (e, coords) in self.g.iter().enumerate() {
            writeln!(f, "g {e} = {}", show(coords))?;
        }
        for r in &self.h {
            let pat: Vec<String> = r
                .pattern
                .iter()
                .map(|p| p.map_or("_".to_string(), |v| v.to_string()))
                .collect();
            let value = match r.value {
                HValue::Const(c) => c.to_string(),
                HValue::Coord { index, offset } => {
                    let var = coordinate_name("x", self.power.base + index);
                    match offset {
                        0 => var,
                        o if o > 0 => format!("{var}+{o}"),
                        o => format!("{var}{o}"),
                    }
                }
            };
            writeln!(f, "h {} = {value}", pat.join(" "))?;
        }
        Ok(())
    }
}
