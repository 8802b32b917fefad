use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::data_system::DataSystem;
use crate::syntax::lexer::{Cursor, Tok};
use crate::syntax::terms::{parse_term, resolve};
use crate::syntax::ParseError;
use crate::term::{fresh_name, name, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Data atom `D(t)`.
    Atom(Name, Term),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Exists(Name, Box<Formula>),
    Forall(Name, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolarityClass {
    StronglyPositive,
    Positive,
    Unipolar,
    General,
}

impl fmt::Display for PolarityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolarityClass::StronglyPositive => "strongly-positive",
            PolarityClass::Positive => "positive",
            PolarityClass::Unipolar => "unipolar",
            PolarityClass::General => "general",
        })
    }
}

impl Formula {
    pub fn atom(p: &str, t: Term) -> Formula {
        Formula::Atom(name(p), t)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(name(x), Box::new(body))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(name(x), Box::new(body))
    }

    /// Right-nested conjunction; `None` when empty.
    pub fn conj(parts: Vec<Formula>) -> Option<Formula> {
        let mut it = parts.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, f| Formula::and(f, acc)))
    }

    /// Right-nested disjunction; `None` when empty.
    pub fn disj(parts: Vec<Formula>) -> Option<Formula> {
        let mut it = parts.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, f| Formula::or(f, acc)))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::Eq(..))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let mut term = |t: &Term, bound: &Vec<Name>| {
            for v in t.vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Atom(_, t) => term(t, bound),
            Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Free and bound variable names.
    pub fn all_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Atom(_, t) => t.collect_vars(out),
            Formula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                out.insert(x.clone());
                body.all_vars(out);
            }
        }
    }

    pub fn is_free(&self, x: &str) -> bool {
        self.free_vars().iter().any(|v| &**v == x)
    }

    /// Capture-avoiding substitution of `t` for free `x`.
    pub fn subst(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::Atom(p, u) => Formula::Atom(p.clone(), u.subst_var(x, t)),
            Formula::Eq(a, b) => Formula::Eq(a.subst_var(x, t), b.subst_var(x, t)),
            Formula::And(a, b) => Formula::and(a.subst(x, t), b.subst(x, t)),
            Formula::Or(a, b) => Formula::or(a.subst(x, t), b.subst(x, t)),
            Formula::Imp(a, b) => Formula::imp(a.subst(x, t), b.subst(x, t)),
            Formula::Exists(y, body) | Formula::Forall(y, body) => {
                let rebuild = |y: Name, b: Formula| match self {
                    Formula::Exists(..) => Formula::Exists(y, Box::new(b)),
                    _ => Formula::Forall(y, Box::new(b)),
                };
                if &**y == x || !body.is_free(x) {
                    return self.clone();
                }
                if t.occurs(y) {
                    let mut used = t.vars();
                    body.all_vars(&mut used);
                    used.insert(name(x));
                    let y2 = fresh_name(y, &used);
                    let renamed = body.subst(y, &Term::Var(y2.clone()));
                    rebuild(y2, renamed.subst(x, t))
                } else {
                    rebuild(y.clone(), body.subst(x, t))
                }
            }
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        fn term_eq(a: &Term, b: &Term, env: &[(Name, Name)]) -> bool {
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    let bx = env.iter().rposition(|(l, _)| l == x);
                    let by = env.iter().rposition(|(_, r)| r == y);
                    match (bx, by) {
                        (Some(i), Some(j)) => i == j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (Term::Con(c, xs), Term::Con(d, ys)) | (Term::Fun(c, xs), Term::Fun(d, ys)) => {
                    c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env))
                }
                _ => false,
            }
        }
        fn go(a: &Formula, b: &Formula, env: &mut Vec<(Name, Name)>) -> bool {
            match (a, b) {
                (Formula::Atom(p, s), Formula::Atom(q, t)) => p == q && term_eq(s, t, env),
                (Formula::Eq(s1, s2), Formula::Eq(t1, t2)) => term_eq(s1, t1, env) && term_eq(s2, t2, env),
                (Formula::And(a1, a2), Formula::And(b1, b2))
                | (Formula::Or(a1, a2), Formula::Or(b1, b2))
                | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
                (Formula::Exists(x, s), Formula::Exists(y, t)) | (Formula::Forall(x, s), Formula::Forall(y, t)) => {
                    env.push((x.clone(), y.clone()));
                    let r = go(s, t, env);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Arguments of an atomic formula, addressed by the first path index.
    pub fn atom_args(&self) -> Option<Vec<&Term>> {
        match self {
            Formula::Atom(_, t) => Some(vec![t]),
            Formula::Eq(a, b) => Some(vec![a, b]),
            _ => None,
        }
    }

    /// Subterm of an atomic formula at `[arg, path..]`.
    pub fn atom_at(&self, pos: &[usize]) -> Option<&Term> {
        let (i, rest) = pos.split_first()?;
        self.atom_args()?.get(*i)?.at(rest)
    }

    /// Replaces the subterm of an atomic formula at `[arg, path..]`.
    pub fn atom_replace(&self, pos: &[usize], by: Term) -> Option<Formula> {
        let (i, rest) = pos.split_first()?;
        match (self, i) {
            (Formula::Atom(p, t), 0) => Some(Formula::Atom(p.clone(), t.replace_at(rest, by)?)),
            (Formula::Eq(a, b), 0) => Some(Formula::Eq(a.replace_at(rest, by)?, b.clone())),
            (Formula::Eq(a, b), 1) => Some(Formula::Eq(a.clone(), b.replace_at(rest, by)?)),
            _ => None,
        }
    }

    /// Data predicates with the polarities in which they occur.
    pub fn polarities(&self) -> BTreeMap<Name, (bool, bool)> {
        fn go(f: &Formula, positive: bool, out: &mut BTreeMap<Name, (bool, bool)>) {
            match f {
                Formula::Atom(p, _) => {
                    let e = out.entry(p.clone()).or_insert((false, false));
                    if positive {
                        e.0 = true;
                    } else {
                        e.1 = true;
                    }
                }
                Formula::Eq(..) => {}
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, positive, out);
                    go(b, positive, out);
                }
                Formula::Imp(a, b) => {
                    go(a, !positive, out);
                    go(b, positive, out);
                }
                Formula::Exists(_, b) | Formula::Forall(_, b) => go(b, positive, out),
            }
        }
        let mut out = BTreeMap::new();
        go(self, true, &mut out);
        out
    }

    /// Built from atoms with conjunction, disjunction and `exists` only.
    pub fn is_strongly_positive(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_strongly_positive() && b.is_strongly_positive(),
            Formula::Exists(_, b) => b.is_strongly_positive(),
            Formula::Imp(..) | Formula::Forall(..) => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + b.size(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Atom(..) | Formula::Eq(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::Atom(p, t) => write!(f, "{p}({t})"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::And(a, b) => {
                a.fmt_prec(f, 4)?;
                f.write_str(" /\\ ")?;
                b.fmt_prec(f, 3)
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" \\/ ")?;
                b.fmt_prec(f, 2)
            }
            Formula::Imp(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 1)
            }
            Formula::Exists(x, b) => {
                write!(f, "exists {x}. ")?;
                b.fmt_prec(f, 0)
            }
            Formula::Forall(x, b) => {
                write!(f, "forall {x}. ")?;
                b.fmt_prec(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Tightest polarity class of a formula. Unipolarity is read per predicate.
pub fn classify_formula(phi: &Formula) -> PolarityClass {
    if phi.is_strongly_positive() {
        return PolarityClass::StronglyPositive;
    }
    let pol = phi.polarities();
    if pol.values().all(|&(_, neg)| !neg) {
        PolarityClass::Positive
    } else if pol.values().all(|&(pos, neg)| !(pos && neg)) {
        PolarityClass::Unipolar
    } else {
        PolarityClass::General
    }
}

/// `formula := quant | imp`, with `->` right associative and binding
/// weaker than `\/`, which binds weaker than `/\`. Quantifier bodies
/// extend as far right as possible.
pub fn parse_formula(cur: &mut Cursor, ds: &DataSystem) -> Result<Formula, ParseError> {
    for (kw, is_exists) in [("exists", true), ("forall", false)] {
        if cur.is_keyword(kw) && matches!(cur.peek_at(1), Tok::Ident(_)) {
            cur.next();
            let mut vars = vec![cur.ident()?];
            while cur.eat(&Tok::Comma) {
                vars.push(cur.ident()?);
            }
            cur.expect(&Tok::Dot)?;
            let body = parse_formula(cur, ds)?;
            return Ok(vars.into_iter().rev().fold(body, |acc, v| {
                if is_exists {
                    Formula::Exists(name(&v), Box::new(acc))
                } else {
                    Formula::Forall(name(&v), Box::new(acc))
                }
            }));
        }
    }
    let lhs = parse_or(cur, ds)?;
    if cur.eat(&Tok::Arrow) {
        Ok(Formula::imp(lhs, parse_formula(cur, ds)?))
    } else {
        Ok(lhs)
    }
}

fn parse_or(cur: &mut Cursor, ds: &DataSystem) -> Result<Formula, ParseError> {
    let lhs = parse_and(cur, ds)?;
    if cur.eat(&Tok::Or) {
        Ok(Formula::or(lhs, parse_or_tail(cur, ds)?))
    } else {
        Ok(lhs)
    }
}

fn parse_or_tail(cur: &mut Cursor, ds: &DataSystem) -> Result<Formula, ParseError> {
    if cur.is_keyword("exists") || cur.is_keyword("forall") {
        parse_formula(cur, ds)
    } else {
        parse_or(cur, ds)
    }
}

fn parse_and(cur: &mut Cursor, ds: &DataSystem) -> Result<Formula, ParseError> {
    let lhs = parse_unary(cur, ds)?;
    if cur.eat(&Tok::And) {
        let rhs = if cur.is_keyword("exists") || cur.is_keyword("forall") {
            parse_formula(cur, ds)?
        } else {
            parse_and(cur, ds)?
        };
        Ok(Formula::and(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_unary(cur: &mut Cursor, ds: &DataSystem) -> Result<Formula, ParseError> {
    if *cur.peek() == Tok::LParen {
        let mark = cur.mark();
        cur.next();
        if let Ok(f) = parse_formula(cur, ds) {
            if cur.eat(&Tok::RParen) && !matches!(cur.peek(), Tok::Eq | Tok::Colon) {
                return Ok(f);
            }
        }
        cur.reset(mark);
    }
    if let Tok::Ident(p) = cur.peek().clone() {
        if ds.predicate(&p).is_some() && *cur.peek_at(1) == Tok::LParen {
            cur.next();
            cur.next();
            let raw = parse_term(cur)?;
            cur.expect(&Tok::RParen)?;
            return Ok(Formula::Atom(name(&p), resolve(&raw, ds, &|_| false)?));
        }
        if p == "exists" || p == "forall" {
            return parse_formula(cur, ds);
        }
    }
    let a = parse_term(cur)?;
    cur.expect(&Tok::Eq)?;
    let b = parse_term(cur)?;
    Ok(Formula::Eq(resolve(&a, ds, &|_| false)?, resolve(&b, ds, &|_| false)?))
}

pub fn parse_formula_str(src: &str, ds: &DataSystem) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(src)?;
    let f = parse_formula(&mut cur, ds)?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {} after formula", cur.peek())));
    }
    Ok(f)
}
