//! Tokenizer shared by the formula and identity languages.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    Comma,
    Amp,
    Eq,
    Dot,
    Define,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Define => "`:=`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits `text` into tokens; `#` starts a comment. Lines are 1-based, as are columns.
pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let single = |tok| Spanned {
                tok,
                line: line_no,
                col,
            };
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '(' => {
                    out.push(single(Tok::LParen));
                    i += 1;
                }
                ')' => {
                    out.push(single(Tok::RParen));
                    i += 1;
                }
                ',' => {
                    out.push(single(Tok::Comma));
                    i += 1;
                }
                '&' => {
                    out.push(single(Tok::Amp));
                    i += 1;
                }
                '=' => {
                    out.push(single(Tok::Eq));
                    i += 1;
                }
                '.' => {
                    out.push(single(Tok::Dot));
                    i += 1;
                }
                ':' if chars.get(i + 1) == Some(&'=') => {
                    out.push(single(Tok::Define));
                    i += 2;
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let n = s
                        .parse()
                        .map_err(|_| Error::parse(line_no, col, format!("number `{s}` is too large")))?;
                    out.push(single(Tok::Int(n)));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push(single(Tok::Ident(chars[start..i].iter().collect())));
                }
                other => return Err(Error::parse(line_no, col, format!("unexpected character `{other}`"))),
            }
        }
        out.push(Spanned {
            tok: Tok::Newline,
            line: line_no,
            col: chars.len() + 1,
        });
    }
    let last = text.lines().count().max(1);
    out.push(Spanned {
        tok: Tok::Eof,
        line: last,
        col: 1,
    });
    Ok(out)
}

/// A cursor over tokens with the usual expect/peek helpers.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(toks: Vec<Spanned>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    pub(crate) fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::parse(line, col, message)
    }

    pub(crate) fn expect(&mut self, want: &Tok) -> Result<()> {
        if self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", want.describe(), self.peek().describe())))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.error(format!("expected a name, found {}", other.describe()))),
        }
    }

    pub(crate) fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == want {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn skip_newlines(&mut self) {
        while self.peek() == &Tok::Newline {
            self.next();
        }
    }

    pub(crate) fn at_line_end(&self) -> bool {
        matches!(self.peek(), Tok::Newline | Tok::Eof)
    }
}
