use std::collections::BTreeSet;
use std::fmt;

use crate::program::EqRef;
use crate::term::{fresh_name, Name, Term};

use super::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Premise contains an instance of the left-hand side.
    Forward,
    /// Premise contains an instance of the right-hand side.
    Backward,
}

/// Eigenvariables and assumption labels of one induction case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InductionCase {
    pub vars: Vec<Name>,
    pub labels: Vec<Name>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Assume(Name),
    ImpIntro(Name),
    ImpElim,
    AndIntro,
    AndElim(Side),
    OrIntro(Side),
    OrElim(Name, Name),
    ExistsIntro(Term),
    ExistsElim { label: Name, eigen: Name },
    ForallIntro(Name),
    ForallElim(Term),
    DataIntro,
    /// 1-based component index.
    DataElim(usize),
    Injectivity(usize),
    Separation,
    Refl,
    /// Leibniz substitution at an atomic position: from `s = t` and `a[s]`
    /// infer `a[t]`.
    EqSubst(Vec<usize>),
    Rewrite { eq: EqRef, dir: Direction, at: Vec<usize> },
    /// Premises: the major `D(t)` followed by one case per constructor type.
    Induction { pred: Name, var: Name, phi: Formula, cases: Vec<InductionCase> },
    /// Premises: `phi[t]` and the decomposition derivation from `phi[eigen]`.
    Coinduction { pred: Name, var: Name, phi: Formula, eigen: Name, label: Name },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Assume(_) => "assume",
            Rule::ImpIntro(_) => "imp-intro",
            Rule::ImpElim => "imp-elim",
            Rule::AndIntro => "and-intro",
            Rule::AndElim(_) => "and-elim",
            Rule::OrIntro(_) => "or-intro",
            Rule::OrElim(..) => "or-elim",
            Rule::ExistsIntro(_) => "exists-intro",
            Rule::ExistsElim { .. } => "exists-elim",
            Rule::ForallIntro(_) => "forall-intro",
            Rule::ForallElim(_) => "forall-elim",
            Rule::DataIntro => "data-intro",
            Rule::DataElim(_) => "data-elim",
            Rule::Injectivity(_) => "injectivity",
            Rule::Separation => "separation",
            Rule::Refl => "refl",
            Rule::EqSubst(_) => "eq-subst",
            Rule::Rewrite { .. } => "rewrite",
            Rule::Induction { .. } => "induction",
            Rule::Coinduction { .. } => "coinduction",
        }
    }

    /// Eigenvariables and labels bound in premise `i`.
    pub fn binders(&self, i: usize) -> (Vec<Name>, Vec<Name>) {
        match (self, i) {
            (Rule::ImpIntro(u), 0) => (vec![], vec![u.clone()]),
            (Rule::OrElim(u, _), 1) | (Rule::OrElim(_, u), 2) => (vec![], vec![u.clone()]),
            (Rule::ExistsElim { label, eigen }, 1) => (vec![eigen.clone()], vec![label.clone()]),
            (Rule::ForallIntro(y), 0) => (vec![y.clone()], vec![]),
            (Rule::Induction { cases, .. }, j) if j >= 1 && j <= cases.len() => {
                (cases[j - 1].vars.clone(), cases[j - 1].labels.clone())
            }
            (Rule::Coinduction { eigen, label, .. }, 1) => (vec![eigen.clone()], vec![label.clone()]),
            _ => (vec![], vec![]),
        }
    }

    fn rename_binder_var(&mut self, i: usize, old: &Name, new: &Name) {
        let swap = |x: &mut Name| {
            if x == old {
                *x = new.clone();
            }
        };
        match (self, i) {
            (Rule::ExistsElim { eigen, .. }, 1) => swap(eigen),
            (Rule::ForallIntro(y), 0) => swap(y),
            (Rule::Induction { cases, .. }, j) if j >= 1 => cases[j - 1].vars.iter_mut().for_each(swap),
            (Rule::Coinduction { eigen, .. }, 1) => swap(eigen),
            _ => {}
        }
    }

    fn rename_binder_label(&mut self, i: usize, old: &Name, new: &Name) {
        let swap = |x: &mut Name| {
            if x == old {
                *x = new.clone();
            }
        };
        match (self, i) {
            (Rule::ImpIntro(u), 0) => swap(u),
            (Rule::OrElim(u, _), 1) | (Rule::OrElim(_, u), 2) => swap(u),
            (Rule::ExistsElim { label, .. }, 1) => swap(label),
            (Rule::Induction { cases, .. }, j) if j >= 1 => cases[j - 1].labels.iter_mut().for_each(swap),
            (Rule::Coinduction { label, .. }, 1) => swap(label),
            _ => {}
        }
    }

    /// Terms and formulas carried by the rule, with `var` bound in `phi`.
    fn subst_term(&self, y: &str, t: &Term) -> Rule {
        let lam = |var: &Name, phi: &Formula| -> (Name, Formula) {
            match Formula::Forall(var.clone(), Box::new(phi.clone())).subst(y, t) {
                Formula::Forall(v, body) => (v, *body),
                _ => unreachable!("substitution preserves the connective"),
            }
        };
        match self {
            Rule::ExistsIntro(w) => Rule::ExistsIntro(w.subst_var(y, t)),
            Rule::ForallElim(w) => Rule::ForallElim(w.subst_var(y, t)),
            Rule::Induction { pred, var, phi, cases } => {
                let (var, phi) = lam(var, phi);
                Rule::Induction { pred: pred.clone(), var, phi, cases: cases.clone() }
            }
            Rule::Coinduction { pred, var, phi, eigen, label } => {
                let (var, phi) = lam(var, phi);
                Rule::Coinduction { pred: pred.clone(), var, phi, eigen: eigen.clone(), label: label.clone() }
            }
            other => other.clone(),
        }
    }

    fn names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Rule::Assume(u) | Rule::ImpIntro(u) => {
                out.insert(u.clone());
            }
            Rule::OrElim(u, v) => {
                out.insert(u.clone());
                out.insert(v.clone());
            }
            Rule::ExistsIntro(t) | Rule::ForallElim(t) => t.collect_vars(out),
            Rule::ExistsElim { label, eigen } => {
                out.insert(label.clone());
                out.insert(eigen.clone());
            }
            Rule::ForallIntro(y) => {
                out.insert(y.clone());
            }
            Rule::Induction { var, phi, cases, .. } => {
                out.insert(var.clone());
                phi.all_vars(out);
                for c in cases {
                    out.extend(c.vars.iter().cloned());
                    out.extend(c.labels.iter().cloned());
                }
            }
            Rule::Coinduction { var, phi, eigen, label, .. } => {
                out.insert(var.clone());
                phi.all_vars(out);
                out.insert(eigen.clone());
                out.insert(label.clone());
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Formula,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: Rule, conclusion: Formula, premises: Vec<Derivation>) -> Derivation {
        Derivation { rule, conclusion, premises }
    }

    pub fn assume(label: &Name, f: Formula) -> Derivation {
        Derivation::new(Rule::Assume(label.clone()), f, Vec::new())
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Nodes in pre-order with their premise-index paths.
    pub fn nodes(&self) -> Vec<(Vec<usize>, &Derivation)> {
        fn go<'a>(d: &'a Derivation, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Derivation)>) {
            out.push((path.clone(), d));
            for (i, p) in d.premises.iter().enumerate() {
                path.push(i);
                go(p, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn at(&self, path: &[usize]) -> Option<&Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get(*i)?.at(rest),
        }
    }

    /// Every variable and label name occurring anywhere.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for (_, d) in self.nodes() {
            d.conclusion.all_vars(&mut out);
            d.rule.names(&mut out);
        }
        out
    }

    /// Open assumptions as (label, formula), in left-to-right leaf order.
    pub fn open_assumptions(&self) -> Vec<(Name, Formula)> {
        fn go(d: &Derivation, bound: &mut Vec<Name>, out: &mut Vec<(Name, Formula)>) {
            if let Rule::Assume(u) = &d.rule {
                if !bound.contains(u) {
                    out.push((u.clone(), d.conclusion.clone()));
                }
                return;
            }
            for (i, p) in d.premises.iter().enumerate() {
                let (_, labels) = d.rule.binders(i);
                let n = labels.len();
                bound.extend(labels);
                go(p, bound, out);
                bound.truncate(bound.len() - n);
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn open_labels(&self) -> BTreeSet<Name> {
        self.open_assumptions().into_iter().map(|(u, _)| u).collect()
    }

    /// Capture-avoiding substitution of `t` for the free variable `y`.
    pub fn subst_term(&self, y: &str, t: &Term) -> Derivation {
        let tv = t.vars();
        let mut rule = self.rule.subst_term(y, t);
        let mut premises = Vec::with_capacity(self.premises.len());
        for (i, p) in self.premises.iter().enumerate() {
            let (vars, _) = self.rule.binders(i);
            if vars.iter().any(|v| &**v == y) {
                premises.push(p.clone());
                continue;
            }
            let mut p = p.clone();
            for v in vars.iter().filter(|v| tv.contains(*v)) {
                let mut used = p.names();
                used.extend(tv.iter().cloned());
                used.insert(crate::term::name(y));
                let v2 = fresh_name(v, &used);
                p = p.subst_term(v, &Term::Var(v2.clone()));
                rule.rename_binder_var(i, v, &v2);
            }
            premises.push(p.subst_term(y, t));
        }
        Derivation { rule, conclusion: self.conclusion.subst(y, t), premises }
    }

    /// Renames free occurrences of assumption label `old`.
    pub fn rename_label(&self, old: &Name, new: &Name) -> Derivation {
        if let Rule::Assume(u) = &self.rule {
            if u == old {
                return Derivation::assume(new, self.conclusion.clone());
            }
            return self.clone();
        }
        let premises = self
            .premises
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if self.rule.binders(i).1.contains(old) {
                    p.clone()
                } else {
                    p.rename_label(old, new)
                }
            })
            .collect();
        Derivation { rule: self.rule.clone(), conclusion: self.conclusion.clone(), premises }
    }

    /// Replaces open assumptions labelled `u` by `e`, renaming inner
    /// binders that would capture labels or variables of `e`.
    pub fn graft(&self, u: &Name, e: &Derivation) -> Derivation {
        let e_labels = e.open_labels();
        let e_names = e.names();
        self.graft_with(u, e, &e_labels, &e_names)
    }

    fn graft_with(&self, u: &Name, e: &Derivation, e_labels: &BTreeSet<Name>, e_names: &BTreeSet<Name>) -> Derivation {
        if let Rule::Assume(v) = &self.rule {
            return if v == u { e.clone() } else { self.clone() };
        }
        let mut rule = self.rule.clone();
        let mut premises = Vec::with_capacity(self.premises.len());
        for (i, p) in self.premises.iter().enumerate() {
            let (vars, labels) = self.rule.binders(i);
            if labels.contains(u) || !p.open_labels().contains(u) {
                premises.push(p.clone());
                continue;
            }
            let mut p = p.clone();
            let mut used = p.names();
            used.extend(e_names.iter().cloned());
            used.insert(u.clone());
            for l in labels.iter().filter(|l| e_labels.contains(*l)) {
                let l2 = fresh_name(l, &used);
                used.insert(l2.clone());
                p = p.rename_label(l, &l2);
                rule.rename_binder_label(i, l, &l2);
            }
            for v in vars.iter().filter(|v| e_names.contains(*v)) {
                let v2 = fresh_name(v, &used);
                used.insert(v2.clone());
                p = p.subst_term(v, &Term::Var(v2.clone()));
                rule.rename_binder_var(i, v, &v2);
            }
            premises.push(p.graft_with(u, e, e_labels, e_names));
        }
        Derivation { rule, conclusion: self.conclusion.clone(), premises }
    }

    /// True when no introduction rule directly feeds the major premise of
    /// the matching elimination.
    pub fn is_detour_free(&self) -> bool {
        self.nodes().iter().all(|(_, d)| !d.is_redex())
    }

    pub fn is_redex(&self) -> bool {
        let major = self.premises.first().map(|p| &p.rule);
        matches!(
            (&self.rule, major),
            (Rule::ImpElim, Some(Rule::ImpIntro(_)))
                | (Rule::AndElim(_), Some(Rule::AndIntro))
                | (Rule::OrElim(..), Some(Rule::OrIntro(_)))
                | (Rule::ExistsElim { .. }, Some(Rule::ExistsIntro(_)))
                | (Rule::ForallElim(_), Some(Rule::ForallIntro(_)))
        )
    }
}

impl fmt::Display for Derivation {
    /// Indented tree, conclusion first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &Derivation, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(f, "{}{}  [{}]", "  ".repeat(depth), d.conclusion, d.rule.name())?;
            d.premises.iter().try_for_each(|p| go(p, depth + 1, f))
        }
        go(self, 0, f)
    }
}
