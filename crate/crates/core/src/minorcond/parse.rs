use super::{MinorCondition, MinorTerm};
use crate::error::{Error, Result};
use crate::lex::{tokenize, Cursor, Tok};

fn parse_term(c: &mut Cursor) -> Result<MinorTerm> {
    let (line, col) = c.here();
    let symbol = match c.peek().clone() {
        Tok::Ident(s) => {
            c.next();
            s
        }
        other => return Err(c.error(format!("expected a function symbol, found {}", other.describe()))),
    };
    if c.peek() != &Tok::LParen {
        return Err(Error::parse(
            line,
            col,
            format!("`{symbol}` is a bare variable; each side must be one symbol applied to variables"),
        ));
    }
    c.next();
    let mut vars = Vec::new();
    if !c.eat(&Tok::RParen) {
        loop {
            let (line, col) = c.here();
            let v = c.ident()?;
            if c.peek() == &Tok::LParen {
                return Err(Error::parse(
                    line,
                    col,
                    format!("nested symbol `{v}`: terms must contain exactly one function symbol"),
                ));
            }
            vars.push(v);
            if c.eat(&Tok::RParen) {
                break;
            }
            c.expect(&Tok::Comma)?;
        }
    }
    Ok(MinorTerm { symbol, vars })
}

/// Parses `f(x,y) = f(y,x)` lines; a line may chain several terms, which
/// become identities against the first. Arities are fixed at first use.
pub fn parse_condition(text: &str) -> Result<MinorCondition> {
    let mut c = Cursor::new(tokenize(text)?);
    let mut cond = MinorCondition::new();
    loop {
        c.skip_newlines();
        if c.peek() == &Tok::Eof {
            break;
        }
        let (line, col) = c.here();
        let mut terms = vec![parse_term(&mut c)?];
        while c.eat(&Tok::Eq) {
            terms.push(parse_term(&mut c)?);
        }
        if terms.len() < 2 {
            return Err(c.error(format!("expected `=`, found {}", c.peek().describe())));
        }
        if !c.at_line_end() {
            return Err(c.error(format!("unexpected {}", c.peek().describe())));
        }
        cond.add_chain(terms).map_err(|e| match e {
            Error::ArityMismatch { expected, found } => Error::parse(
                line,
                col,
                format!("arity conflict: symbol used with {found} arguments after {expected}"),
            ),
            other => other,
        })?;
    }
    Ok(cond)
}

impl std::str::FromStr for MinorCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_condition(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minorcond::{builtin, builtin_key, BUILTIN_KEYS};

    #[test]
    fn sigma2_from_text() {
        let c = parse_condition("f(x,y) = f(y,x)").unwrap();
        assert_eq!(c, builtin("Sigma2", &[]).unwrap());
    }

    #[test]
    fn rejects_deeper_terms() {
        for bad in ["f(x,f(y,x)) = f(x,y)", "f(x) = x", "x = f(x)", "f(x,y)", "f(x) = f(x) f"] {
            assert!(matches!(parse_condition(bad), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn arity_conflict_has_position() {
        match parse_condition("f(x,y) = f(y,x)\ng(x) = f(x)") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chains_and_comments() {
        let c = parse_condition("# quasi Mal'cev\nf(x,y,y) = f(y,y,x) = f(x,x,x)\n").unwrap();
        assert_eq!(c, builtin("QMalcev", &[]).unwrap());
    }

    #[test]
    fn builtins_round_trip() {
        for key in BUILTIN_KEYS {
            let key = key.replace("(k)", "(4)").replace("(n)", "(3)");
            let (n, p) = builtin_key(&key).unwrap();
            let c = builtin(&n, &p).unwrap();
            assert_eq!(parse_condition(&c.to_string()).unwrap(), c, "{key}");
        }
    }
}
