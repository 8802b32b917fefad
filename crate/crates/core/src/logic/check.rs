use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::data_system::{DataSystem, PredKind};
use crate::program::{match_term, Program};
use crate::term::{fresh_name, name, Name, Term};

use super::derivation::{Derivation, Direction, Rule, Side};
use super::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Restrict coinduction to strongly-positive eigen-formulas.
    pub sp_coinduction: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { sp_coinduction: true }
    }
}

/// Open assumptions (deduplicated by label) and conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub assumptions: Vec<(Name, Formula)>,
    pub conclusion: Formula,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hyps: Vec<String> = self.assumptions.iter().map(|(u, a)| format!("{u}: {a}")).collect();
        write!(f, "{{{}}} |- {}", hyps.join(", "), self.conclusion)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {path:?} ({rule}): {reason}")]
pub struct Violation {
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DcmError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(Name),
    #[error("predicate `{0}` has no constructor types")]
    NoConstructors(Name),
}

/// `E^phi(u)`: `phi[u/z]` when `e` is the predicate under consideration.
fn e_phi(e: &Name, pred: &str, phi: &Formula, z: &str, u: &Term) -> Formula {
    if &**e == pred {
        phi.subst(z, u)
    } else {
        Formula::Atom(e.clone(), u.clone())
    }
}

/// The decomposition disjunction for coinduction on `pred` with eigen
/// formula `phi[z]` at variable `x`, one disjunct per constructor type in
/// declaration order.
pub fn build_dcm(ds: &DataSystem, pred: &str, phi: &Formula, z: &str, x: &str) -> Result<Formula, DcmError> {
    if ds.predicate(pred).is_none() {
        return Err(DcmError::UnknownPredicate(name(pred)));
    }
    let mut used = BTreeSet::new();
    phi.all_vars(&mut used);
    used.insert(name(z));
    used.insert(name(x));
    let disjuncts: Vec<Formula> = ds
        .types_of(pred)
        .into_iter()
        .map(|ty| {
            let mut used = used.clone();
            let zs: Vec<Name> = (0..ty.args.len())
                .map(|i| {
                    let v = fresh_name(&format!("z{i}"), &used);
                    used.insert(v.clone());
                    v
                })
                .collect();
            let vars: Vec<Term> = zs.iter().map(|v| Term::Var(v.clone())).collect();
            let mut parts: Vec<Formula> =
                ty.args.iter().zip(&vars).map(|(e, v)| e_phi(e, pred, phi, z, v)).collect();
            parts.push(Formula::eq(Term::var(x), Term::Con(ty.constructor.clone(), vars)));
            let body = Formula::conj(parts).expect("non-empty conjunction");
            zs.iter().rev().fold(body, |acc, v| Formula::Exists(v.clone(), Box::new(acc)))
        })
        .collect();
    Formula::disj(disjuncts).ok_or_else(|| DcmError::NoConstructors(name(pred)))
}

/// Checks every node of `d` and returns its judgment.
pub fn check_proof(ds: &DataSystem, p: &Program, d: &Derivation) -> Result<Judgment, Violation> {
    check_proof_with(ds, p, d, CheckOptions::default())
}

pub fn check_proof_with(ds: &DataSystem, p: &Program, d: &Derivation, opts: CheckOptions) -> Result<Judgment, Violation> {
    let checker = Checker { ds, p, opts };
    let open = checker.check(d, &mut Vec::new())?;
    let mut assumptions: Vec<(Name, Formula)> = Vec::new();
    for (u, a) in open {
        match assumptions.iter().find(|(v, _)| *v == u) {
            Some((_, b)) if !b.alpha_eq(&a) => {
                return Err(Violation {
                    path: Vec::new(),
                    rule: "assume",
                    reason: format!("label `{u}` names both `{b}` and `{a}`"),
                })
            }
            Some(_) => {}
            None => assumptions.push((u, a)),
        }
    }
    Ok(Judgment { assumptions, conclusion: d.conclusion.clone() })
}

struct Checker<'a> {
    ds: &'a DataSystem,
    p: &'a Program,
    opts: CheckOptions,
}

type Open = Vec<(Name, Formula)>;

fn fv_of(open: &Open, skip: &[Name]) -> BTreeSet<Name> {
    open.iter().filter(|(u, _)| !skip.contains(u)).flat_map(|(_, a)| a.free_vars()).collect()
}

impl Checker<'_> {
    fn check(&self, d: &Derivation, path: &mut Vec<usize>) -> Result<Open, Violation> {
        let mut opens = Vec::with_capacity(d.premises.len());
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            opens.push(self.check(p, path)?);
            path.pop();
        }
        let fail = |reason: String| Violation { path: path.clone(), rule: d.rule.name(), reason };
        self.check_node(d, &opens).map_err(fail)?;
        let mut open = Vec::new();
        for (i, o) in opens.into_iter().enumerate() {
            let (_, labels) = d.rule.binders(i);
            open.extend(o.into_iter().filter(|(u, _)| !labels.contains(u)));
        }
        if let Rule::Assume(u) = &d.rule {
            open.push((u.clone(), d.conclusion.clone()));
        }
        Ok(open)
    }

    fn check_node(&self, d: &Derivation, opens: &[Open]) -> Result<(), String> {
        let c = &d.conclusion;
        let prem: Vec<&Formula> = d.premises.iter().map(|p| &p.conclusion).collect();
        let arity = |n: usize| -> Result<(), String> {
            if prem.len() == n {
                Ok(())
            } else {
                Err(format!("expected {n} premise(s), found {}", prem.len()))
            }
        };
        let same = |a: &Formula, b: &Formula, what: &str| -> Result<(), String> {
            if a.alpha_eq(b) {
                Ok(())
            } else {
                Err(format!("{what}: expected `{b}`, found `{a}`"))
            }
        };
        // A discharged label must stand for the expected formula.
        let discharged = |i: usize, u: &Name, expect: &Formula| -> Result<(), String> {
            for (v, a) in &opens[i] {
                if v == u && !a.alpha_eq(expect) {
                    return Err(format!("assumption `{u}` is `{a}`, expected `{expect}`"));
                }
            }
            Ok(())
        };
        match &d.rule {
            Rule::Assume(_) => arity(0),
            Rule::ImpIntro(u) => {
                arity(1)?;
                let Formula::Imp(a, b) = c else { return Err(format!("conclusion `{c}` is not an implication")) };
                same(prem[0], b, "premise")?;
                discharged(0, u, a)
            }
            Rule::ImpElim => {
                arity(2)?;
                let Formula::Imp(a, b) = prem[0] else {
                    return Err(format!("major premise `{}` is not an implication", prem[0]));
                };
                same(prem[1], a, "minor premise")?;
                same(c, b, "conclusion")
            }
            Rule::AndIntro => {
                arity(2)?;
                let Formula::And(a, b) = c else { return Err(format!("conclusion `{c}` is not a conjunction")) };
                same(prem[0], a, "left premise")?;
                same(prem[1], b, "right premise")
            }
            Rule::AndElim(side) => {
                arity(1)?;
                let Formula::And(a, b) = prem[0] else {
                    return Err(format!("premise `{}` is not a conjunction", prem[0]));
                };
                same(c, if *side == Side::Left { a } else { b }, "conclusion")
            }
            Rule::OrIntro(side) => {
                arity(1)?;
                let Formula::Or(a, b) = c else { return Err(format!("conclusion `{c}` is not a disjunction")) };
                same(prem[0], if *side == Side::Left { a } else { b }, "premise")
            }
            Rule::OrElim(u, v) => {
                arity(3)?;
                let Formula::Or(a, b) = prem[0] else {
                    return Err(format!("major premise `{}` is not a disjunction", prem[0]));
                };
                same(prem[1], c, "left case")?;
                same(prem[2], c, "right case")?;
                discharged(1, u, a)?;
                discharged(2, v, b)
            }
            Rule::ExistsIntro(w) => {
                arity(1)?;
                let Formula::Exists(x, body) = c else {
                    return Err(format!("conclusion `{c}` is not existential"));
                };
                same(prem[0], &body.subst(x, w), "premise")
            }
            Rule::ExistsElim { label, eigen } => {
                arity(2)?;
                let Formula::Exists(x, body) = prem[0] else {
                    return Err(format!("major premise `{}` is not existential", prem[0]));
                };
                same(prem[1], c, "minor premise")?;
                let inst = body.subst(x, &Term::Var(eigen.clone()));
                discharged(1, label, &inst)?;
                if prem[0].is_free(eigen) || c.is_free(eigen) || fv_of(&opens[1], &[label.clone()]).contains(eigen) {
                    return Err(format!("eigenvariable `{eigen}` occurs free outside its scope"));
                }
                Ok(())
            }
            Rule::ForallIntro(y) => {
                arity(1)?;
                let Formula::Forall(x, body) = c else {
                    return Err(format!("conclusion `{c}` is not universal"));
                };
                same(prem[0], &body.subst(x, &Term::Var(y.clone())), "premise")?;
                if c.is_free(y) || fv_of(&opens[0], &[]).contains(y) {
                    return Err(format!("eigenvariable `{y}` occurs free outside its scope"));
                }
                Ok(())
            }
            Rule::ForallElim(t) => {
                arity(1)?;
                let Formula::Forall(x, body) = prem[0] else {
                    return Err(format!("premise `{}` is not universal", prem[0]));
                };
                same(c, &body.subst(x, t), "conclusion")
            }
            Rule::DataIntro => self.data_intro(c, &prem),
            Rule::DataElim(i) => {
                arity(1)?;
                self.data_elim(*i, prem[0], c)
            }
            Rule::Injectivity(i) => {
                arity(1)?;
                let Formula::Eq(Term::Con(c1, a1), Term::Con(c2, a2)) = prem[0] else {
                    return Err(format!("premise `{}` is not an equality of constructor terms", prem[0]));
                };
                if c1 != c2 || a1.len() != a2.len() {
                    return Err(format!("premise `{}` relates distinct constructors", prem[0]));
                }
                if *i == 0 || *i > a1.len() {
                    return Err(format!("component {i} out of range for `{c1}`"));
                }
                same(c, &Formula::eq(a1[i - 1].clone(), a2[i - 1].clone()), "conclusion")
            }
            Rule::Separation => {
                arity(1)?;
                match prem[0] {
                    Formula::Eq(Term::Con(c1, _), Term::Con(c2, _)) if c1 != c2 => Ok(()),
                    other => Err(format!("premise `{other}` does not equate distinct constructors")),
                }
            }
            Rule::Refl => {
                arity(0)?;
                match c {
                    Formula::Eq(a, b) if a == b => Ok(()),
                    _ => Err(format!("conclusion `{c}` is not an instance of reflexivity")),
                }
            }
            Rule::EqSubst(pos) => {
                arity(2)?;
                let Formula::Eq(s, t) = prem[0] else {
                    return Err(format!("major premise `{}` is not an equality", prem[0]));
                };
                match prem[1].atom_at(pos) {
                    Some(u) if u == s => {}
                    Some(u) => return Err(format!("position {pos:?} of `{}` holds `{u}`, not `{s}`", prem[1])),
                    None => return Err(format!("no atomic position {pos:?} in `{}`", prem[1])),
                }
                let expect = prem[1].atom_replace(pos, t.clone()).expect("position checked");
                same(c, &expect, "conclusion")
            }
            Rule::Rewrite { eq, dir, at } => {
                arity(1)?;
                let e = self.p.equation(eq).ok_or_else(|| format!("no equation {eq}"))?;
                let (from, to) = match (prem[0].atom_at(at), c.atom_at(at)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(format!("no atomic position {at:?} in premise and conclusion")),
                };
                if prem[0].atom_replace(at, to.clone()).as_ref() != Some(c) {
                    return Err("premise and conclusion differ outside the rewritten position".into());
                }
                let (l, r) = match dir {
                    Direction::Forward => (e.lhs(), e.rhs.clone()),
                    Direction::Backward => (e.rhs.clone(), e.lhs()),
                };
                let pair = |a: Term, b: Term| Term::Fun(name("(pair)"), vec![a, b]);
                if match_term(&pair(l, r), &pair(from.clone(), to.clone())).is_none() {
                    return Err(format!("`{from}` to `{to}` is not an instance of {eq}"));
                }
                Ok(())
            }
            Rule::Induction { pred, var, phi, cases } => self.induction(d, pred, var, phi, cases, opens),
            Rule::Coinduction { pred, var, phi, eigen, label } => {
                arity(2)?;
                match self.ds.predicate(pred) {
                    Some(dp) if dp.kind == PredKind::Coinductive => {}
                    _ => return Err(format!("`{pred}` is not a coinductive predicate")),
                }
                if self.opts.sp_coinduction && !phi.is_strongly_positive() {
                    return Err(format!("eigen-formula `{phi}` is not strongly positive"));
                }
                let Formula::Atom(q, t) = c else { return Err(format!("conclusion `{c}` is not a data atom")) };
                if q != pred {
                    return Err(format!("conclusion predicate `{q}` differs from `{pred}`"));
                }
                same(prem[0], &phi.subst(var, t), "left premise")?;
                let dcm = build_dcm(self.ds, pred, phi, var, eigen).map_err(|e| e.to_string())?;
                same(prem[1], &dcm, "decomposition premise")?;
                discharged(1, label, &phi.subst(var, &Term::Var(eigen.clone())))?;
                let mut outside = phi.free_vars();
                outside.remove(var);
                if outside.contains(eigen) || fv_of(&opens[1], &[label.clone()]).contains(eigen) {
                    return Err(format!("eigenvariable `{eigen}` occurs free outside its scope"));
                }
                Ok(())
            }
        }
    }

    fn data_intro(&self, c: &Formula, prem: &[&Formula]) -> Result<(), String> {
        let Formula::Atom(p, Term::Con(k, args)) = c else {
            return Err(format!("conclusion `{c}` is not a data atom of a constructor term"));
        };
        match self.ds.predicate(p) {
            Some(dp) if dp.kind == PredKind::Inductive => {}
            _ => return Err(format!("`{p}` is not an inductive predicate")),
        }
        let fits = self.ds.types_of(p).into_iter().any(|ty| {
            ty.constructor == *k
                && ty.args.len() == args.len()
                && prem.len() == args.len()
                && ty.args.iter().zip(args).zip(prem).all(|((e, a), f)| *f == &Formula::Atom(e.clone(), a.clone()))
        });
        if fits {
            Ok(())
        } else {
            Err(format!("no constructor type of `{k}` into `{p}` matches the premises"))
        }
    }

    /// Literal form `E_0(c(t..)) / E_i(t_i)`; projection form
    /// `E_0(s) / E_i(pi_i(s))` when `E_0` has exactly one constructor type.
    fn data_elim(&self, i: usize, prem: &Formula, c: &Formula) -> Result<(), String> {
        let Formula::Atom(p, s) = prem else { return Err(format!("premise `{prem}` is not a data atom")) };
        let Formula::Atom(q, u) = c else { return Err(format!("conclusion `{c}` is not a data atom")) };
        match self.ds.predicate(p) {
            Some(dp) if dp.kind == PredKind::Coinductive => {}
            _ => return Err(format!("`{p}` is not a coinductive predicate")),
        }
        let types = self.ds.types_of(p);
        let literal = match s {
            Term::Con(k, args) => types.iter().any(|ty| {
                ty.constructor == *k
                    && ty.args.len() == args.len()
                    && i >= 1
                    && i <= args.len()
                    && ty.args[i - 1] == *q
                    && args[i - 1] == *u
            }),
            _ => false,
        };
        let projection = types.len() == 1
            && i >= 1
            && i <= types[0].args.len()
            && types[0].args[i - 1] == *q
            && *u == Term::Fun(self.ds.destructor_name(i), vec![s.clone()]);
        if literal || projection {
            Ok(())
        } else {
            Err(format!("`{c}` is not component {i} of `{prem}`"))
        }
    }

    fn induction(
        &self,
        d: &Derivation,
        pred: &Name,
        var: &Name,
        phi: &Formula,
        cases: &[super::derivation::InductionCase],
        opens: &[Open],
    ) -> Result<(), String> {
        match self.ds.predicate(pred) {
            Some(dp) if dp.kind == PredKind::Inductive => {}
            _ => return Err(format!("`{pred}` is not an inductive predicate")),
        }
        let types = self.ds.types_of(pred);
        if d.premises.len() != types.len() + 1 || cases.len() != types.len() {
            return Err(format!(
                "expected the major premise and {} case(s), found {} premise(s)",
                types.len(),
                d.premises.len()
            ));
        }
        let Formula::Atom(q, t) = &d.premises[0].conclusion else {
            return Err("major premise is not a data atom".into());
        };
        if q != pred {
            return Err(format!("major premise predicate `{q}` differs from `{pred}`"));
        }
        let expect = phi.subst(var, t);
        if !d.conclusion.alpha_eq(&expect) {
            return Err(format!("conclusion: expected `{expect}`, found `{}`", d.conclusion));
        }
        let mut outside = phi.free_vars();
        outside.remove(var);
        for (j, (ty, case)) in types.iter().zip(cases).enumerate() {
            let r = ty.args.len();
            if case.vars.len() != r || case.labels.len() != r {
                return Err(format!("case {} for `{}` needs {r} variable(s) and label(s)", j + 1, ty.constructor));
            }
            if case.vars.iter().collect::<BTreeSet<_>>().len() != r {
                return Err(format!("case {} repeats an eigenvariable", j + 1));
            }
            let xs: Vec<Term> = case.vars.iter().map(|v| Term::Var(v.clone())).collect();
            let goal = phi.subst(var, &Term::Con(ty.constructor.clone(), xs.clone()));
            let got = &d.premises[j + 1].conclusion;
            if !got.alpha_eq(&goal) {
                return Err(format!("case {}: expected `{goal}`, found `{got}`", j + 1));
            }
            for ((e, x), u) in ty.args.iter().zip(&xs).zip(&case.labels) {
                let hyp = e_phi(e, pred, phi, var, x);
                for (v, a) in &opens[j + 1] {
                    if v == u && !a.alpha_eq(&hyp) {
                        return Err(format!("assumption `{u}` is `{a}`, expected `{hyp}`"));
                    }
                }
            }
            let rest = fv_of(&opens[j + 1], &case.labels);
            for v in &case.vars {
                if outside.contains(v) || rest.contains(v) || d.conclusion.is_free(v) {
                    return Err(format!("eigenvariable `{v}` occurs free outside its scope"));
                }
            }
        }
        Ok(())
    }
}
