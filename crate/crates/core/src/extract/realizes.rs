//! Finite-depth realizability: does a stream realize a strongly-positive
//! formula under an environment?

use std::collections::BTreeMap;
use std::fmt;

use crate::data_system::{DataSystem, PredKind};
use crate::eval::{OmegaResult, Session};
use crate::logic::Formula;
use crate::program::Substitution;
use crate::term::{Name, Term};

use super::streams::StreamOps;
use super::ExtractError;

/// How equality atoms are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EqualityRealizers {
    /// The realizer is the common value of both sides.
    #[default]
    Value,
    /// Any stream realizes a true equation; only the equation is checked.
    Erased,
}

#[derive(Debug, Clone)]
pub struct RealizabilityJudgment {
    /// Values of the free variables, as terms of the session program.
    pub eta: BTreeMap<Name, Term>,
    pub realizer: Term,
    pub formula: Formula,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizes {
    HoldsUpToDepth,
    /// Clause path to the failing atom.
    Fails(Vec<String>),
    Stalled(Vec<String>, String),
}

impl Realizes {
    pub fn holds(&self) -> bool {
        *self == Realizes::HoldsUpToDepth
    }
}

impl fmt::Display for Realizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Realizes::HoldsUpToDepth => f.write_str("holds-up-to-depth"),
            Realizes::Fails(p) => write!(f, "fails at {}", p.join("/")),
            Realizes::Stalled(p, r) => write!(f, "stalled at {}: {r}", p.join("/")),
        }
    }
}

/// True when `x` is used as a boolean: as the argument of an inductive
/// atom or as the head of a stream constructor.
fn is_boolean_var(phi: &Formula, x: &str, ds: &DataSystem, ops: &StreamOps) -> bool {
    fn in_term(t: &Term, x: &str, ops: &StreamOps) -> bool {
        match t {
            Term::Var(_) => false,
            Term::Con(c, xs) if *c == ops.shape.cons && matches!(&xs[0], Term::Var(v) if &**v == x) => true,
            Term::Con(_, xs) | Term::Fun(_, xs) => xs.iter().any(|s| in_term(s, x, ops)),
        }
    }
    match phi {
        Formula::Atom(p, t) => {
            let inductive = ds.predicate(p).is_some_and(|d| d.kind == PredKind::Inductive);
            (inductive && matches!(t, Term::Var(v) if &**v == x)) || in_term(t, x, ops)
        }
        Formula::Eq(a, b) => in_term(a, x, ops) || in_term(b, x, ops),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            is_boolean_var(a, x, ds, ops) || is_boolean_var(b, x, ds, ops)
        }
        Formula::Exists(y, b) | Formula::Forall(y, b) => &**y != x && is_boolean_var(b, x, ds, ops),
    }
}

pub struct Realizer<'s, 'e> {
    pub session: &'s mut Session<'e>,
    pub ds: &'s DataSystem,
    pub ops: &'s StreamOps,
    pub equality: EqualityRealizers,
    pub budget: usize,
}

impl Realizer<'_, '_> {
    pub fn realizes(&mut self, j: &RealizabilityJudgment) -> Result<Realizes, ExtractError> {
        if !j.formula.is_strongly_positive() {
            return Err(ExtractError::NotStronglyPositive(j.formula.to_string()));
        }
        let mut path = Vec::new();
        self.go(&j.eta, &j.realizer, &j.formula, j.depth, &mut path)
    }

    fn omega(&mut self, a: &Term, b: &Term, depth: usize, path: &[String]) -> Option<Realizes> {
        match self.session.derives_omega(a, b, depth, self.budget) {
            OmegaResult::EqualUpToDepth => None,
            OmegaResult::Differs(_) => Some(Realizes::Fails(path.to_vec())),
            OmegaResult::Stalled(p, r) => Some(Realizes::Stalled(path.to_vec(), format!("{r} at {p:?}"))),
        }
    }

    fn is_constant_valued(&mut self, t: &Term) -> bool {
        matches!(self.session.head(t, self.budget), Ok(c) if self.ops.shape.bools.contains(&c))
    }

    fn go(
        &mut self,
        eta: &BTreeMap<Name, Term>,
        sigma: &Term,
        phi: &Formula,
        depth: usize,
        path: &mut Vec<String>,
    ) -> Result<Realizes, ExtractError> {
        let inst = |t: &Term| Substitution(eta.clone()).apply(t);
        let ops = self.ops;
        let out = match phi {
            Formula::Atom(p, t) => {
                path.push(format!("{p}-atom"));
                let t = inst(t);
                let inductive = self.ds.predicate(p).is_some_and(|d| d.kind == PredKind::Inductive);
                let r = if inductive {
                    self.omega(&ops.hd(sigma.clone()), &t, depth, path)
                } else {
                    self.omega(sigma, &t, depth, path)
                };
                r.unwrap_or(Realizes::HoldsUpToDepth)
            }
            Formula::Eq(a, b) => {
                path.push("eq-atom".into());
                let (a, b) = (inst(a), inst(b));
                let r = match self.equality {
                    EqualityRealizers::Erased => self.omega(&a, &b, depth, path),
                    EqualityRealizers::Value => {
                        let s = if self.is_constant_valued(&a) { ops.hd(sigma.clone()) } else { sigma.clone() };
                        self.omega(&s, &a, depth, path).or_else(|| self.omega(&s, &b, depth, path))
                    }
                };
                r.unwrap_or(Realizes::HoldsUpToDepth)
            }
            Formula::And(a, b) => {
                path.push("and.0".into());
                let r = self.go(eta, &ops.split(sigma.clone(), 0), a, depth, path)?;
                path.pop();
                if !r.holds() {
                    return Ok(r);
                }
                path.push("and.1".into());
                self.go(eta, &ops.split(sigma.clone(), 1), b, depth, path)?
            }
            Formula::Or(a, b) => {
                let tag = match self.session.head(&ops.hd(sigma.clone()), self.budget) {
                    Ok(c) => c,
                    Err(s) => {
                        return Ok(Realizes::Stalled(path.clone(), s.reason.to_string()));
                    }
                };
                let left = tag == ops.shape.bools[0];
                path.push(if left { "or.left" } else { "or.right" }.into());
                self.go(eta, &ops.tl(sigma.clone()), if left { a } else { b }, depth, path)?
            }
            Formula::Exists(x, body) => {
                let w = ops.split(sigma.clone(), 0);
                let w = if is_boolean_var(body, x, self.ds, ops) { ops.hd(w) } else { w };
                let mut eta2 = eta.clone();
                eta2.insert(x.clone(), w);
                path.push(format!("exists.{x}"));
                self.go(&eta2, &ops.split(sigma.clone(), 1), body, depth, path)?
            }
            Formula::Imp(..) | Formula::Forall(..) => {
                return Err(ExtractError::NotStronglyPositive(phi.to_string()));
            }
        };
        path.pop();
        Ok(out)
    }
}
