use super::ast::{Atom, Binding, PpFormula, PpProgram, Term};
use crate::error::{Error, Result};
use crate::lex::{tokenize, Cursor, Tok};

const KEYWORDS: &[&str] = &["exists", "true", "let", "power", "source", "dim", "constants"];

fn check_var_name(c: &Cursor, name: &str) -> Result<()> {
    if KEYWORDS.contains(&name) {
        return Err(c.error(format!("`{name}` is a keyword")));
    }
    Ok(())
}

fn parse_term(c: &mut Cursor) -> Result<Term> {
    match c.peek().clone() {
        Tok::Int(n) => {
            let v = u8::try_from(n).map_err(|_| c.error(format!("constant {n} does not fit a domain value")))?;
            c.next();
            Ok(Term::Const(v))
        }
        Tok::Ident(s) => {
            check_var_name(c, &s)?;
            c.next();
            Ok(Term::Var(s))
        }
        other => Err(c.error(format!("expected a variable or constant, found {}", other.describe()))),
    }
}

fn parse_atom(c: &mut Cursor) -> Result<Atom> {
    if let Tok::Ident(name) = c.peek().clone() {
        c.next();
        if c.eat(&Tok::LParen) {
            let mut args = Vec::new();
            if !c.eat(&Tok::RParen) {
                loop {
                    args.push(parse_term(c)?);
                    if c.eat(&Tok::RParen) {
                        break;
                    }
                    c.expect(&Tok::Comma)?;
                }
            }
            return Ok(Atom::Rel { name, args });
        }
        check_var_name(c, &name)?;
        c.expect(&Tok::Eq)?;
        let rhs = parse_term(c)?;
        return Ok(Atom::Eq(Term::Var(name), rhs));
    }
    let lhs = parse_term(c)?;
    c.expect(&Tok::Eq)?;
    let rhs = parse_term(c)?;
    Ok(Atom::Eq(lhs, rhs))
}

/// Parses `[exists v.. .] atom & ..` up to the end of the line. `&` may end a line to continue it.
pub(crate) fn parse_body(c: &mut Cursor) -> Result<(Vec<String>, Vec<Atom>)> {
    let mut exists = Vec::new();
    if c.peek() == &Tok::Ident("exists".into()) {
        c.next();
        while let Tok::Ident(v) = c.peek().clone() {
            check_var_name(c, &v)?;
            if exists.contains(&v) {
                return Err(c.error(format!("variable `{v}` quantified twice")));
            }
            exists.push(v);
            c.next();
        }
        if exists.is_empty() {
            return Err(c.error("`exists` needs at least one variable"));
        }
        c.expect(&Tok::Dot)?;
    }
    let mut atoms = Vec::new();
    if c.peek() == &Tok::Ident("true".into()) {
        c.next();
    } else {
        loop {
            atoms.push(parse_atom(c)?);
            if !c.eat(&Tok::Amp) {
                break;
            }
            c.skip_newlines();
        }
    }
    Ok((exists, atoms))
}

fn finish_line(c: &mut Cursor) -> Result<()> {
    if !c.at_line_end() {
        return Err(c.error(format!("unexpected {}", c.peek().describe())));
    }
    c.next();
    Ok(())
}

/// Parses a standalone formula. Its free variables are the non-quantified
/// variables in order of first occurrence.
pub fn parse_formula(text: &str) -> Result<PpFormula> {
    let mut c = Cursor::new(tokenize(text)?);
    c.skip_newlines();
    let (exists, atoms) = parse_body(&mut c)?;
    c.skip_newlines();
    if c.peek() != &Tok::Eof {
        return Err(c.error(format!("unexpected {}", c.peek().describe())));
    }
    let mut f = PpFormula {
        free: Vec::new(),
        exists,
        atoms,
        constants: false,
    };
    f.free = f
        .occurring_vars()
        .into_iter()
        .filter(|v| !f.exists.contains(v))
        .collect();
    f.constants = f.has_constants();
    Ok(f)
}

/// Parses `Name(p1,..,pk) := body` after the leading keyword, checking scoping.
pub(crate) fn parse_definition(c: &mut Cursor, check_scope: bool) -> Result<Binding> {
    let (line, col) = c.here();
    let name = c.ident()?;
    c.expect(&Tok::LParen)?;
    let mut params: Vec<String> = Vec::new();
    if !c.eat(&Tok::RParen) {
        loop {
            let v = c.ident()?;
            check_var_name(c, &v)?;
            if params.contains(&v) {
                return Err(c.error(format!("parameter `{v}` declared twice")));
            }
            params.push(v);
            if c.eat(&Tok::RParen) {
                break;
            }
            c.expect(&Tok::Comma)?;
        }
    }
    c.expect(&Tok::Define)?;
    let (exists, atoms) = parse_body(c)?;
    finish_line(c)?;
    if let Some(v) = exists.iter().find(|v| params.contains(v)) {
        return Err(Error::parse(line, col, format!("`{v}` is both a parameter and quantified")));
    }
    let mut f = PpFormula {
        free: params,
        exists,
        atoms,
        constants: false,
    };
    for v in f.occurring_vars() {
        if check_scope && !f.free.contains(&v) && !f.exists.contains(&v) {
            return Err(Error::parse(line, col, format!("variable `{v}` in `{name}` is not bound")));
        }
    }
    f.constants = f.has_constants();
    Ok(Binding { name, formula: f })
}

/// Parses a sequence of `let Name(vars) := formula` lines.
pub fn parse_program(text: &str) -> Result<PpProgram> {
    let mut c = Cursor::new(tokenize(text)?);
    let mut bindings: Vec<Binding> = Vec::new();
    loop {
        c.skip_newlines();
        match c.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(k) if k == "let" => {
                c.next();
                let (line, col) = c.here();
                let b = parse_definition(&mut c, true)?;
                if bindings.iter().any(|o| o.name == b.name) {
                    return Err(Error::parse(line, col, format!("`{}` is defined twice", b.name)));
                }
                bindings.push(b);
            }
            other => return Err(c.error(format!("expected `let`, found {}", other.describe()))),
        }
    }
    Ok(PpProgram { bindings })
}

impl std::str::FromStr for PpFormula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

impl std::str::FromStr for PpProgram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_program(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_free_vars_in_order() {
        let f = parse_formula("exists u. R(y,u) & S(u,x) & x = 2").unwrap();
        assert_eq!(f.free, vec!["y", "x"]);
        assert_eq!(f.exists, vec!["u"]);
        assert!(f.constants);
        assert_eq!(f.atoms.len(), 3);
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "let B3(a,b,c) := exists u1 u2. Rimp2(a,b,u1) & Rimp2(u1,c,u2) & C3(u2,a)\nlet T(x) := true\nlet K(x,y) := x = y & U(0)\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.to_string(), text);
        assert_eq!(parse_program(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn continuation_and_comments() {
        let p = parse_program("# header\nlet A(x,y) := R(x,y) &\n   R(y,x) # tail\n").unwrap();
        assert_eq!(p.bindings[0].formula.atoms.len(), 2);
    }

    #[test]
    fn scoping_errors() {
        assert!(matches!(parse_program("let A(x) := R(x,y)"), Err(Error::Parse { .. })));
        assert!(parse_program("let A(x) := exists x. R(x)").is_err());
        assert!(parse_program("let A(x,x) := R(x)").is_err());
        assert!(parse_program("let A(x) := R(x)\nlet A(y) := R(y)").is_err());
        assert!(parse_formula("R(x,").is_err());
        assert!(parse_formula("exists . R(x)").is_err());
        assert!(parse_formula("R(x) R(y)").is_err());
        assert!(parse_formula("R(300)").is_err());
    }

    #[test]
    fn error_positions() {
        match parse_formula("R(x) & $") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 8)),
            other => panic!("{other:?}"),
        }
        match parse_program("let A(x) := R(x)\nlet B(y) := R(y) S") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 18)),
            other => panic!("{other:?}"),
        }
    }
}
