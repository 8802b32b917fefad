//! Derivations as s-expressions:
//! `(rule "conclusion" :key value .. premise..)`.

use thiserror::Error;

use crate::data_system::DataSystem;
use crate::program::EqRef;
use crate::syntax::terms::parse_term_str;
use crate::syntax::{ParseError, SExpr};
use crate::term::{name, Name, Term};

use super::derivation::{Derivation, Direction, InductionCase, Rule, Side};
use super::formula::{parse_formula_str, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofSyntaxError {
    #[error("malformed proof: {0}")]
    Malformed(String),
    #[error("in `{text}`: {source}")]
    Embedded { text: String, source: ParseError },
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, ProofSyntaxError> {
    Err(ProofSyntaxError::Malformed(msg.into()))
}

fn names(xs: &[Name]) -> SExpr {
    SExpr::List(xs.iter().map(|x| SExpr::atom(&**x)).collect())
}

fn indices(xs: &[usize]) -> SExpr {
    SExpr::List(xs.iter().map(|i| SExpr::atom(i.to_string())).collect())
}

fn side(s: Side) -> SExpr {
    SExpr::atom(if s == Side::Left { "left" } else { "right" })
}

pub fn to_sexpr(d: &Derivation) -> SExpr {
    let mut xs = vec![SExpr::atom(d.rule.name()), SExpr::str(d.conclusion.to_string())];
    let mut kv = |k: &str, v: SExpr| {
        xs.push(SExpr::kw(k));
        xs.push(v);
    };
    match &d.rule {
        Rule::Assume(u) | Rule::ImpIntro(u) => kv("label", SExpr::atom(&**u)),
        Rule::AndElim(s) | Rule::OrIntro(s) => kv("side", side(*s)),
        Rule::OrElim(u, v) => kv("labels", names(&[u.clone(), v.clone()])),
        Rule::ExistsIntro(w) => kv("witness", SExpr::str(w.to_string())),
        Rule::ExistsElim { label, eigen } => {
            kv("label", SExpr::atom(&**label));
            kv("eigen", SExpr::atom(&**eigen));
        }
        Rule::ForallIntro(y) => kv("eigen", SExpr::atom(&**y)),
        Rule::ForallElim(t) => kv("term", SExpr::str(t.to_string())),
        Rule::DataElim(i) | Rule::Injectivity(i) => kv("index", SExpr::atom(i.to_string())),
        Rule::EqSubst(at) => kv("at", indices(at)),
        Rule::Rewrite { eq, dir, at } => {
            kv("eq", SExpr::atom(&*eq.function));
            kv("clause", SExpr::atom(eq.clause.to_string()));
            kv("dir", SExpr::atom(if *dir == Direction::Forward { "forward" } else { "backward" }));
            kv("at", indices(at));
        }
        Rule::Induction { pred, var, phi, .. } | Rule::Coinduction { pred, var, phi, .. } => {
            kv("pred", SExpr::atom(&**pred));
            kv("var", SExpr::atom(&**var));
            kv("phi", SExpr::str(phi.to_string()));
            if let Rule::Coinduction { eigen, label, .. } = &d.rule {
                kv("eigen", SExpr::atom(&**eigen));
                kv("label", SExpr::atom(&**label));
            }
        }
        Rule::ImpElim | Rule::AndIntro | Rule::DataIntro | Rule::Separation | Rule::Refl => {}
    }
    for (i, p) in d.premises.iter().enumerate() {
        match &d.rule {
            Rule::Induction { cases, .. } if i >= 1 => {
                let c = &cases[i - 1];
                xs.push(SExpr::List(vec![
                    SExpr::atom("case"),
                    SExpr::kw("vars"),
                    names(&c.vars),
                    SExpr::kw("labels"),
                    names(&c.labels),
                    to_sexpr(p),
                ]));
            }
            _ => xs.push(to_sexpr(p)),
        }
    }
    SExpr::List(xs)
}

struct Node<'a> {
    head: &'a str,
    attrs: Vec<(&'a str, &'a SExpr)>,
    rest: Vec<&'a SExpr>,
}

fn split(s: &SExpr) -> Result<Node<'_>, ProofSyntaxError> {
    let Some(xs) = s.as_list() else { return malformed(format!("expected a list, found `{s}`")) };
    let Some(head) = xs.first().and_then(SExpr::as_atom) else {
        return malformed(format!("list without rule name: `{s}`"));
    };
    let mut attrs = Vec::new();
    let mut rest = Vec::new();
    let mut it = xs[1..].iter();
    while let Some(x) = it.next() {
        if let SExpr::Keyword(k) = x {
            let Some(v) = it.next() else { return malformed(format!("keyword `:{k}` without value")) };
            attrs.push((k.as_str(), v));
        } else {
            rest.push(x);
        }
    }
    Ok(Node { head, attrs, rest })
}

impl<'a> Node<'a> {
    fn get(&self, k: &str) -> Result<&'a SExpr, ProofSyntaxError> {
        match self.attrs.iter().find(|(key, _)| *key == k) {
            Some((_, v)) => Ok(v),
            None => malformed(format!("`{}` needs `:{k}`", self.head)),
        }
    }

    fn atom(&self, k: &str) -> Result<Name, ProofSyntaxError> {
        match self.get(k)?.as_atom() {
            Some(a) => Ok(name(a)),
            None => malformed(format!("`:{k}` of `{}` must be a name", self.head)),
        }
    }

    fn text(&self, k: &str) -> Result<&'a str, ProofSyntaxError> {
        match self.get(k)?.as_str() {
            Some(s) => Ok(s),
            None => malformed(format!("`:{k}` of `{}` must be a string", self.head)),
        }
    }

    fn index(&self, k: &str) -> Result<usize, ProofSyntaxError> {
        let a = self.atom(k)?;
        a.parse().or_else(|_| malformed(format!("`:{k}` must be a number, found `{a}`")))
    }

    fn names(&self, k: &str) -> Result<Vec<Name>, ProofSyntaxError> {
        let Some(xs) = self.get(k)?.as_list() else { return malformed(format!("`:{k}` must be a list")) };
        xs.iter()
            .map(|x| match x.as_atom() {
                Some(a) => Ok(name(a)),
                None => malformed(format!("`:{k}` must list names")),
            })
            .collect()
    }

    fn indices(&self, k: &str) -> Result<Vec<usize>, ProofSyntaxError> {
        self.names(k)?
            .iter()
            .map(|a| a.parse().or_else(|_| malformed(format!("`:{k}` must list numbers, found `{a}`"))))
            .collect()
    }

    fn side(&self) -> Result<Side, ProofSyntaxError> {
        match &*self.atom("side")? {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => malformed(format!("side must be `left` or `right`, found `{other}`")),
        }
    }
}

fn formula(src: &str, ds: &DataSystem) -> Result<Formula, ProofSyntaxError> {
    parse_formula_str(src, ds).map_err(|source| ProofSyntaxError::Embedded { text: src.into(), source })
}

fn term(src: &str, ds: &DataSystem) -> Result<Term, ProofSyntaxError> {
    parse_term_str(src, ds, &|_| false).map_err(|source| ProofSyntaxError::Embedded { text: src.into(), source })
}

pub fn from_sexpr(s: &SExpr, ds: &DataSystem) -> Result<Derivation, ProofSyntaxError> {
    let n = split(s)?;
    let Some(conclusion) = n.rest.first().and_then(|x| x.as_str()) else {
        return malformed(format!("`{}` needs a quoted conclusion", n.head));
    };
    let conclusion = formula(conclusion, ds)?;
    let subs = &n.rest[1..];
    let mut cases = Vec::new();
    let mut premises = Vec::new();
    for p in subs {
        let pn = split(p)?;
        if pn.head == "case" {
            let [body] = pn.rest.as_slice() else { return malformed("`case` needs exactly one derivation") };
            cases.push(InductionCase { vars: pn.names("vars")?, labels: pn.names("labels")? });
            premises.push(from_sexpr(body, ds)?);
        } else {
            premises.push(from_sexpr(p, ds)?);
        }
    }
    let rule = match n.head {
        "assume" => Rule::Assume(n.atom("label")?),
        "imp-intro" => Rule::ImpIntro(n.atom("label")?),
        "imp-elim" => Rule::ImpElim,
        "and-intro" => Rule::AndIntro,
        "and-elim" => Rule::AndElim(n.side()?),
        "or-intro" => Rule::OrIntro(n.side()?),
        "or-elim" => match n.names("labels")?.as_slice() {
            [u, v] => Rule::OrElim(u.clone(), v.clone()),
            _ => return malformed("`or-elim` needs two labels"),
        },
        "exists-intro" => Rule::ExistsIntro(term(n.text("witness")?, ds)?),
        "exists-elim" => Rule::ExistsElim { label: n.atom("label")?, eigen: n.atom("eigen")? },
        "forall-intro" => Rule::ForallIntro(n.atom("eigen")?),
        "forall-elim" => Rule::ForallElim(term(n.text("term")?, ds)?),
        "data-intro" => Rule::DataIntro,
        "data-elim" => Rule::DataElim(n.index("index")?),
        "injectivity" => Rule::Injectivity(n.index("index")?),
        "separation" => Rule::Separation,
        "refl" => Rule::Refl,
        "eq-subst" => Rule::EqSubst(n.indices("at")?),
        "rewrite" => {
            let dir = match &*n.atom("dir")? {
                "forward" => Direction::Forward,
                "backward" => Direction::Backward,
                other => return malformed(format!("direction must be `forward` or `backward`, found `{other}`")),
            };
            Rule::Rewrite { eq: EqRef { function: n.atom("eq")?, clause: n.index("clause")? }, dir, at: n.indices("at")? }
        }
        "induction" => Rule::Induction {
            pred: n.atom("pred")?,
            var: n.atom("var")?,
            phi: formula(n.text("phi")?, ds)?,
            cases: std::mem::take(&mut cases),
        },
        "coinduction" => Rule::Coinduction {
            pred: n.atom("pred")?,
            var: n.atom("var")?,
            phi: formula(n.text("phi")?, ds)?,
            eigen: n.atom("eigen")?,
            label: n.atom("label")?,
        },
        other => return malformed(format!("unknown rule `{other}`")),
    };
    if !cases.is_empty() {
        return malformed("`case` blocks are only allowed under `induction`");
    }
    Ok(Derivation { rule, conclusion, premises })
}
