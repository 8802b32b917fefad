use crate::data_system::DataSystem;
use crate::term::{name, Term, CONS};

use super::lexer::{Cursor, Pos, Tok};
use super::ParseError;

/// A term before names are resolved against a data system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTerm {
    Ident(String, Pos),
    Call(String, Vec<RawTerm>, Pos),
    Cons(Box<RawTerm>, Box<RawTerm>),
    Rec(String, Box<RawTerm>, Pos),
}

impl RawTerm {
    pub fn pos(&self) -> Pos {
        match self {
            RawTerm::Ident(_, p) | RawTerm::Call(_, _, p) | RawTerm::Rec(_, _, p) => *p,
            RawTerm::Cons(a, _) => a.pos(),
        }
    }
}

/// `term := atom (':' term)?`, right associative.
pub fn parse_term(cur: &mut Cursor) -> Result<RawTerm, ParseError> {
    let head = parse_atom(cur)?;
    if cur.eat(&Tok::Colon) {
        Ok(RawTerm::Cons(Box::new(head), Box::new(parse_term(cur)?)))
    } else {
        Ok(head)
    }
}

fn parse_atom(cur: &mut Cursor) -> Result<RawTerm, ParseError> {
    let pos = cur.pos();
    match cur.peek().clone() {
        Tok::LParen => {
            cur.next();
            let t = parse_term(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(t)
        }
        Tok::Ident(s) if s == "rec" && matches!(cur.peek_at(1), Tok::Ident(_)) && *cur.peek_at(2) == Tok::Dot => {
            cur.next();
            let binder = cur.ident()?;
            cur.expect(&Tok::Dot)?;
            Ok(RawTerm::Rec(binder, Box::new(parse_term(cur)?), pos))
        }
        Tok::Ident(s) => {
            cur.next();
            if cur.eat(&Tok::LParen) {
                let mut args = Vec::new();
                if !cur.eat(&Tok::RParen) {
                    loop {
                        args.push(parse_term(cur)?);
                        if cur.eat(&Tok::RParen) {
                            break;
                        }
                        cur.expect(&Tok::Comma)?;
                    }
                }
                Ok(RawTerm::Call(s, args, pos))
            } else {
                Ok(RawTerm::Ident(s, pos))
            }
        }
        other => Err(cur.error(format!("expected a term, found {other}"))),
    }
}

fn con(ds: &DataSystem, c: &str, args: Vec<Term>, pos: Pos) -> Result<Term, ParseError> {
    let k = ds
        .constructor(c)
        .ok_or_else(|| ParseError::at(pos, format!("unknown constructor `{c}`")))?;
    if k.arity != args.len() {
        return Err(ParseError::at(
            pos,
            format!("constructor `{c}` expects {} arguments, got {}", k.arity, args.len()),
        ));
    }
    Ok(Term::Con(name(c), args))
}

/// Resolves a raw term. Bare identifiers are constructors, then names for
/// which `bare_fun` holds (0-ary functions such as diagram entries), then
/// variables. A call to a non-constructor is a function application.
pub fn resolve(raw: &RawTerm, ds: &DataSystem, bare_fun: &dyn Fn(&str) -> bool) -> Result<Term, ParseError> {
    match raw {
        RawTerm::Ident(s, pos) if ds.is_constructor(s) => con(ds, s, Vec::new(), *pos),
        RawTerm::Ident(s, _) if bare_fun(s) => Ok(Term::Fun(name(s), Vec::new())),
        RawTerm::Ident(s, _) => Ok(Term::Var(name(s))),
        RawTerm::Call(s, args, pos) => {
            let args = args.iter().map(|a| resolve(a, ds, bare_fun)).collect::<Result<Vec<_>, _>>()?;
            if ds.is_constructor(s) {
                con(ds, s, args, *pos)
            } else {
                Ok(Term::Fun(name(s), args))
            }
        }
        RawTerm::Cons(a, b) => {
            let args = vec![resolve(a, ds, bare_fun)?, resolve(b, ds, bare_fun)?];
            con(ds, CONS, args, a.pos())
        }
        RawTerm::Rec(_, _, pos) => Err(ParseError::at(*pos, "`rec` is only allowed in environments")),
    }
}

/// Resolves a pattern: calls must be constructors.
pub fn resolve_pattern(raw: &RawTerm, ds: &DataSystem) -> Result<Term, ParseError> {
    match raw {
        RawTerm::Call(s, _, pos) if !ds.is_constructor(s) => {
            Err(ParseError::at(*pos, format!("unknown constructor `{s}` in pattern")))
        }
        _ => resolve(raw, ds, &|_| false),
    }
    .and_then(|t| {
        if t.class() == crate::term::SyntacticClass::Program {
            Err(ParseError::at(raw.pos(), format!("pattern `{t}` applies a function")))
        } else {
            Ok(t)
        }
    })
}

/// Parses and resolves a complete term from text.
pub fn parse_term_str(src: &str, ds: &DataSystem, bare_fun: &dyn Fn(&str) -> bool) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(src)?;
    let raw = parse_term(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {} after term", cur.peek())));
    }
    resolve(&raw, ds, bare_fun)
}
