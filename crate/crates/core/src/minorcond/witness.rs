use std::collections::HashMap;
use std::fmt;

use super::WitnessAssignment;
use crate::algebra::{check_domain, Operation};
use crate::catalog;
use crate::error::{Error, Result};
use crate::lex::{tokenize, Cursor, Tok};

/// A term over catalog operations, used to spell out witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(usize),
    Const(u8),
    App(String, Vec<Expr>),
}

impl Expr {
    fn eval(&self, ops: &HashMap<String, Operation>, env: &[u8]) -> u8 {
        match self {
            Expr::Var(i) => env[*i],
            Expr::Const(c) => *c,
            Expr::App(name, args) => {
                let vals: Vec<u8> = args.iter().map(|a| a.eval(ops, env)).collect();
                let f = &ops[name];
                f.at(crate::algebra::tuple::encode(f.domain_size(), &vals))
            }
        }
    }

    fn collect_ops<'a>(&'a self, out: &mut Vec<(&'a str, usize)>) {
        if let Expr::App(name, args) = self {
            out.push((name, args.len()));
            args.iter().for_each(|a| a.collect_ops(out));
        }
    }

    fn show(&self, params: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "{}", params[*i]),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    a.show(params, f)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// `let sym(params) := expr`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessDef {
    pub symbol: String,
    pub params: Vec<String>,
    pub body: Expr,
}

/// A witness: which condition it satisfies, in which structures' clones its
/// operations live, and how each symbol is built from catalog operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFile {
    pub condition: Option<String>,
    pub structures: Vec<String>,
    pub domain: usize,
    pub defs: Vec<WitnessDef>,
}

impl WitnessFile {
    /// Tabulates every definition.
    pub fn assignment(&self) -> Result<WitnessAssignment> {
        check_domain(self.domain)?;
        let mut used = Vec::new();
        self.defs.iter().for_each(|d| d.body.collect_ops(&mut used));
        let mut ops: HashMap<String, Operation> = HashMap::new();
        for (name, arity) in used {
            if !ops.contains_key(name) {
                let f = catalog::operation(name)?;
                if f.domain_size() != self.domain {
                    return Err(Error::DomainMismatch(self.domain, f.domain_size()));
                }
                ops.insert(name.to_string(), f);
            }
            let found = ops[name].arity();
            if found != arity {
                return Err(Error::ArityMismatch { expected: found, found: arity });
            }
        }
        let mut w = WitnessAssignment::new();
        for def in &self.defs {
            if let Some(c) = constant_out_of_range(&def.body, self.domain) {
                return Err(Error::ValueOutOfDomain {
                    value: c as usize,
                    size: self.domain,
                });
            }
            let f = Operation::from_fn(self.domain, def.params.len(), |args| def.body.eval(&ops, args))?;
            w.insert(def.symbol.clone(), f);
        }
        Ok(w)
    }
}

fn constant_out_of_range(e: &Expr, d: usize) -> Option<u8> {
    match e {
        Expr::Const(c) if *c as usize >= d => Some(*c),
        Expr::App(_, args) => args.iter().find_map(|a| constant_out_of_range(a, d)),
        _ => None,
    }
}

fn parse_expr(c: &mut Cursor, params: &[String]) -> Result<Expr> {
    match c.peek().clone() {
        Tok::Int(n) => {
            c.next();
            u8::try_from(n)
                .map(Expr::Const)
                .map_err(|_| c.error(format!("constant {n} does not fit a domain value")))
        }
        Tok::Ident(name) => {
            let (line, col) = c.here();
            c.next();
            if c.eat(&Tok::LParen) {
                let mut args = Vec::new();
                if !c.eat(&Tok::RParen) {
                    loop {
                        args.push(parse_expr(c, params)?);
                        if c.eat(&Tok::RParen) {
                            break;
                        }
                        c.expect(&Tok::Comma)?;
                    }
                }
                return Ok(Expr::App(name, args));
            }
            params
                .iter()
                .position(|p| *p == name)
                .map(Expr::Var)
                .ok_or_else(|| Error::parse(line, col, format!("variable `{name}` is not a parameter")))
        }
        other => Err(c.error(format!("expected a term, found {}", other.describe()))),
    }
}

/// Parses a witness file:
///
/// ```text
/// condition QJ(4)
/// in M2 M3
/// let t1(x,y,z) := fpiinf(x,y,z)
/// ```
pub fn parse_witness(text: &str) -> Result<WitnessFile> {
    let mut c = Cursor::new(tokenize(text)?);
    let mut file = WitnessFile {
        condition: None,
        structures: Vec::new(),
        domain: 3,
        defs: Vec::new(),
    };
    loop {
        c.skip_newlines();
        let (line, col) = c.here();
        let kw = match c.next() {
            Tok::Eof => break,
            Tok::Ident(k) => k,
            other => return Err(Error::parse(line, col, format!("expected a directive, found {}", other.describe()))),
        };
        match kw.as_str() {
            "condition" => {
                // Keys like `QJ(4)` are glued back together.
                let mut key = String::new();
                while !c.at_line_end() {
                    match c.next() {
                        Tok::Ident(s) => key.push_str(&s),
                        Tok::Int(n) => key.push_str(&n.to_string()),
                        Tok::LParen => key.push('('),
                        Tok::RParen => key.push(')'),
                        Tok::Comma => key.push(','),
                        other => return Err(c.error(format!("unexpected {} in condition key", other.describe()))),
                    }
                }
                file.condition = Some(key);
            }
            "in" => {
                while let Tok::Ident(s) = c.peek().clone() {
                    c.next();
                    file.structures.push(s);
                }
            }
            "domain" => match c.next() {
                Tok::Int(n) => file.domain = n as usize,
                _ => return Err(Error::parse(line, col, "`domain` needs an integer")),
            },
            "let" => {
                let symbol = c.ident()?;
                c.expect(&Tok::LParen)?;
                let mut params: Vec<String> = Vec::new();
                if !c.eat(&Tok::RParen) {
                    loop {
                        let p = c.ident()?;
                        if params.contains(&p) {
                            return Err(c.error(format!("parameter `{p}` declared twice")));
                        }
                        params.push(p);
                        if c.eat(&Tok::RParen) {
                            break;
                        }
                        c.expect(&Tok::Comma)?;
                    }
                }
                c.expect(&Tok::Define)?;
                let body = parse_expr(&mut c, &params)?;
                if file.defs.iter().any(|d| d.symbol == symbol) {
                    return Err(Error::parse(line, col, format!("`{symbol}` is defined twice")));
                }
                file.defs.push(WitnessDef { symbol, params, body });
            }
            other => return Err(Error::parse(line, col, format!("unknown directive `{other}`"))),
        }
        if !c.at_line_end() {
            return Err(c.error(format!("unexpected {}", c.peek().describe())));
        }
    }
    Ok(file)
}

impl fmt::Display for WitnessFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(cond) = &self.condition {
            writeln!(f, "condition {cond}")?;
        }
        if !self.structures.is_empty() {
            writeln!(f, "in {}", self.structures.join(" "))?;
        }
        if self.domain != 3 {
            writeln!(f, "domain {}", self.domain)?;
        }
        for d in &self.defs {
            write!(f, "let {}({}) := ", d.symbol, d.params.join(","))?;
            d.body.show(&d.params, f)?;
            writeln!(f)?;
        }
        Ok(())
    }
}
