use std::fmt;

use super::lexer::{quote, Cursor, Tok};
use super::ParseError;

/// Generic s-expression used for proof files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    Str(String),
    /// `:name`
    Keyword(String),
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn atom(s: impl Into<String>) -> SExpr {
        SExpr::Atom(s.into())
    }

    pub fn str(s: impl Into<String>) -> SExpr {
        SExpr::Str(s.into())
    }

    pub fn kw(s: impl Into<String>) -> SExpr {
        SExpr::Keyword(s.into())
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            SExpr::Str(s) => Some(s),
            _ => None,
        }
    }

    fn flat(&self) -> String {
        match self {
            SExpr::Atom(s) => s.clone(),
            SExpr::Str(s) => quote(s),
            SExpr::Keyword(s) => format!(":{s}"),
            SExpr::List(xs) => format!("({})", xs.iter().map(SExpr::flat).collect::<Vec<_>>().join(" ")),
        }
    }

    /// Indented rendering; lists wider than the line budget are broken
    /// with one nested list per line.
    pub fn pretty(&self, indent: usize) -> String {
        let flat = self.flat();
        let SExpr::List(xs) = self else { return flat };
        if flat.len() + indent <= 96 {
            return flat;
        }
        let mut out = String::from("(");
        let mut first = true;
        for x in xs {
            if matches!(x, SExpr::List(_)) {
                out.push('\n');
                out.push_str(&" ".repeat(indent + 2));
                out.push_str(&x.pretty(indent + 2));
            } else {
                if !first {
                    out.push(' ');
                }
                out.push_str(&x.flat());
            }
            first = false;
        }
        out.push(')');
        out
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty(0))
    }
}

pub fn parse_sexpr(cur: &mut Cursor) -> Result<SExpr, ParseError> {
    match cur.peek().clone() {
        Tok::LParen => {
            cur.next();
            let mut xs = Vec::new();
            while !cur.eat(&Tok::RParen) {
                if cur.at_eof() {
                    return Err(cur.error("unclosed `(`"));
                }
                xs.push(parse_sexpr(cur)?);
            }
            Ok(SExpr::List(xs))
        }
        Tok::Colon => {
            cur.next();
            Ok(SExpr::Keyword(cur.ident()?))
        }
        Tok::Ident(s) => {
            cur.next();
            Ok(SExpr::Atom(s))
        }
        Tok::Str(s) => {
            cur.next();
            Ok(SExpr::Str(s))
        }
        other => Err(cur.error(format!("unexpected {other} in s-expression"))),
    }
}

pub fn parse_sexpr_str(src: &str) -> Result<SExpr, ParseError> {
    let mut cur = Cursor::new(src)?;
    let s = parse_sexpr(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error("trailing input after s-expression"));
    }
    Ok(s)
}
