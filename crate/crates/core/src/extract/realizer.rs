//! Program extraction: a corecursive realizer for each strongly-positive
//! derivation over a stream system.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::corec::{compile_schema, Component, CorecFunction, Production, Schema, Slot, Stratum, VectorCall};
use crate::data_system::DataSystem;
use crate::logic::{Derivation, Rule, Side};
use crate::program::Program;
use crate::term::{name, Name, Term};

use super::streams::{StreamOps, StreamShape};
use super::ExtractError;

/// Variable standing for the realizer of the assumption labelled `u`.
pub fn realizer_var(u: &str) -> Name {
    name(&format!("r@{u}"))
}

/// One line of the extraction certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateEntry {
    pub path: Vec<usize>,
    pub rule: &'static str,
    pub realizer: Term,
    /// Nesting of `even`/`odd` around inputs: observing the realizer to
    /// depth `d` reads its inputs to depth at most `d * 2^splits`
    /// outside corecursive calls.
    pub splits: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub entries: Vec<CertificateEntry>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let path: Vec<String> = e.path.iter().map(|i| i.to_string()).collect();
            let path = if path.is_empty() { "root".to_string() } else { path.join(".") };
            writeln!(f, "{path}\t{}\t{}\tsplits={}", e.rule, e.realizer, e.splits)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub schema: Schema,
    pub program: Program,
    /// Parameters of the extracted principal: free variables of the
    /// judgment, then one realizer per open assumption.
    pub params: Vec<Name>,
    pub assumptions: Vec<Name>,
    pub certificate: Certificate,
}

struct Extractor<'a> {
    ops: StreamOps,
    ds: &'a DataSystem,
    strata: Vec<Stratum>,
    defined: Vec<Name>,
    counter: usize,
    certificate: Vec<CertificateEntry>,
}

fn splits(t: &Term, ops: &StreamOps) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::Con(_, xs) => xs.iter().map(|x| splits(x, ops)).max().unwrap_or(0),
        Term::Fun(f, xs) => {
            let inner = xs.iter().map(|x| splits(x, ops)).max().unwrap_or(0);
            inner + usize::from(*f == ops.even || *f == ops.odd)
        }
    }
}

/// Extracts a primitive corecursive program from a checked, normal,
/// strongly-positive derivation. The principal is named `{principal}_0`.
pub fn extract(d: &Derivation, ds: &DataSystem, principal: &str) -> Result<Extraction, ExtractError> {
    let ops = StreamOps::new(StreamShape::of(ds)?, "");
    let strata = ops.library_strata();
    let defined = strata.iter().flat_map(Stratum::names).collect();
    let mut ex = Extractor { ops, ds, strata, defined, counter: 0, certificate: Vec::new() };
    let body = ex.realize(d, &mut Vec::new())?;

    let mut open = Vec::new();
    for (u, a) in d.open_assumptions() {
        if !open.iter().any(|(v, _)| *v == u) {
            open.push((u, a));
        }
    }
    let mut params: Vec<Name> = Vec::new();
    let mut seen = BTreeSet::new();
    for f in open.iter().map(|(_, a)| a).chain(std::iter::once(&d.conclusion)) {
        let mut occ = Vec::new();
        formula_var_order(f, &mut occ);
        for v in occ {
            if seen.insert(v.clone()) {
                params.push(v);
            }
        }
    }
    let assumptions: Vec<Name> = open.iter().map(|(u, _)| u.clone()).collect();
    params.extend(assumptions.iter().map(|u| realizer_var(u)));

    let f0 = name(&format!("{principal}_0"));
    let body = ex.component(&body, &params)?;
    ex.strata.push(Stratum::Explicit { name: f0.clone(), arity: params.len(), body });
    let schema = Schema { name: f0.clone(), principal: f0, strata: ex.strata };
    let program = compile_schema(&schema, ds).map_err(|e| ExtractError::Internal(e.to_string()))?;
    ex.certificate.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(Extraction { schema, program, params, assumptions, certificate: Certificate { entries: ex.certificate } })
}

/// Free variables of a formula in order of first occurrence.
fn formula_var_order(f: &crate::logic::Formula, out: &mut Vec<Name>) {
    let free = f.free_vars();
    fn terms(f: &crate::logic::Formula, out: &mut Vec<Term>) {
        use crate::logic::Formula as F;
        match f {
            F::Atom(_, t) => out.push(t.clone()),
            F::Eq(a, b) => {
                out.push(a.clone());
                out.push(b.clone());
            }
            F::And(a, b) | F::Or(a, b) | F::Imp(a, b) => {
                terms(a, out);
                terms(b, out);
            }
            F::Exists(_, b) | F::Forall(_, b) => terms(b, out),
        }
    }
    let mut ts = Vec::new();
    terms(f, &mut ts);
    for t in ts {
        let mut occ = Vec::new();
        t.var_occurrences(&mut occ);
        for v in occ {
            if free.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
    }
}

impl Extractor<'_> {
    fn record(&mut self, path: &[usize], rule: &'static str, t: &Term) {
        let splits = splits(t, &self.ops);
        self.certificate.push(CertificateEntry { path: path.to_vec(), rule, realizer: t.clone(), splits });
    }

    fn realize(&mut self, d: &Derivation, path: &mut Vec<usize>) -> Result<Term, ExtractError> {
        let mut sub = |this: &mut Self, i: usize| -> Result<Term, ExtractError> {
            path.push(i);
            let r = this.realize(&d.premises[i], path);
            path.pop();
            r
        };
        let ops = self.ops.clone();
        let t = match &d.rule {
            Rule::Assume(u) => Term::Var(realizer_var(u)),
            Rule::AndIntro => {
                let (a, b) = (sub(self, 0)?, sub(self, 1)?);
                ops.pair(a, b)
            }
            Rule::AndElim(side) => {
                let r = sub(self, 0)?;
                ops.split(r, if *side == Side::Left { 0 } else { 1 })
            }
            Rule::OrIntro(side) => {
                let tag = if *side == Side::Left { &ops.shape.bools[0] } else { &ops.shape.bools[1] };
                ops.cons(Term::Con(tag.clone(), Vec::new()), sub(self, 0)?)
            }
            Rule::OrElim(u, v) => {
                let sigma = sub(self, 0)?;
                let tail = ops.tl(sigma.clone());
                let left = sub(self, 1)?.subst_var(&realizer_var(u), &tail);
                let right = sub(self, 2)?.subst_var(&realizer_var(v), &tail);
                let branches = BTreeMap::from([(ops.shape.bools[0].clone(), left), (ops.shape.bools[1].clone(), right)]);
                ops.case(ops.hd(sigma), &branches)
            }
            Rule::ExistsIntro(w) => {
                let body = sub(self, 0)?;
                ops.pair(self.witness(w), body)
            }
            Rule::ExistsElim { label, eigen } => {
                let sigma = sub(self, 0)?;
                sub(self, 1)?
                    .subst_var(eigen, &ops.split(sigma.clone(), 0))
                    .subst_var(&realizer_var(label), &ops.split(sigma, 1))
            }
            Rule::DataIntro => match &d.conclusion {
                crate::logic::Formula::Atom(_, Term::Con(c, xs)) if xs.is_empty() => {
                    ops.boolean(Term::Con(c.clone(), Vec::new()))
                }
                _ => return Err(self.unsupported(d, "data-intro with arguments")),
            },
            Rule::DataElim(i) => {
                let r = sub(self, 0)?;
                match i {
                    1 => ops.boolean(ops.hd(r)),
                    2 => ops.tl(r),
                    _ => return Err(self.unsupported(d, "component index")),
                }
            }
            Rule::Injectivity(_) | Rule::Separation | Rule::Refl => ops.zeros(),
            Rule::Rewrite { .. } => sub(self, 0)?,
            Rule::EqSubst(_) => sub(self, 1)?,
            Rule::Induction { pred, cases, .. } => {
                if *pred != ops.shape.boolean || cases.iter().any(|c| !c.vars.is_empty()) {
                    return Err(self.unsupported(d, "induction other than finite case analysis on booleans"));
                }
                let major = sub(self, 0)?;
                let mut branches = BTreeMap::new();
                let types = self.ds.types_of(pred);
                for (j, ty) in types.iter().enumerate() {
                    branches.insert(ty.constructor.clone(), sub(self, j + 1)?);
                }
                ops.case(ops.hd(major), &branches)
            }
            Rule::Coinduction { eigen, label, .. } => {
                let g = sub(self, 0)?;
                let h = sub(self, 1)?.subst_var(eigen, &ops.zeros());
                self.corecurrence(g, h, label)?
            }
            Rule::ImpIntro(_) | Rule::ImpElim | Rule::ForallIntro(_) | Rule::ForallElim(_) => {
                return Err(self.unsupported(d, "not strongly positive"));
            }
        };
        self.record(path, d.rule.name(), &t);
        Ok(t)
    }

    fn unsupported(&self, d: &Derivation, why: &str) -> ExtractError {
        ExtractError::UnsupportedRule { rule: d.rule.name(), reason: why.into() }
    }

    /// The stream value of a witness term: streams as themselves, booleans
    /// by their head, anything else as `zeros`.
    fn witness(&self, w: &Term) -> Term {
        self.as_stream(w)
            .or_else(|| self.as_bool(w).map(|b| self.ops.boolean(b)))
            .unwrap_or_else(|| self.ops.zeros())
    }

    fn as_stream(&self, t: &Term) -> Option<Term> {
        let ops = &self.ops;
        let sh = &ops.shape;
        match t {
            Term::Var(_) => Some(t.clone()),
            Term::Con(c, xs) if *c == sh.cons => Some(ops.cons(self.as_bool(&xs[0])?, self.as_stream(&xs[1])?)),
            Term::Fun(f, xs) if *f == sh.tl => Some(ops.tl(self.as_stream(&xs[0])?)),
            _ => None,
        }
    }

    fn as_bool(&self, t: &Term) -> Option<Term> {
        let ops = &self.ops;
        let sh = &ops.shape;
        match t {
            Term::Var(_) => Some(ops.hd(t.clone())),
            Term::Con(c, xs) if xs.is_empty() && sh.bools.contains(c) => Some(t.clone()),
            Term::Fun(f, xs) if *f == sh.hd => Some(ops.hd(self.as_stream(&xs[0])?)),
            Term::Fun(f, xs) if *f == sh.delta => {
                let mut args = vec![self.as_bool(&xs[0])?];
                for x in &xs[1..] {
                    args.push(self.as_bool(x).unwrap_or_else(|| sh.bools[0].clone().into_const()));
                }
                Some(Term::Fun(f.clone(), args))
            }
            _ => None,
        }
    }

    /// `r(p.., w) = hd(B-realizer) : r(p.., phi[z1]-realizer)` where both
    /// realizers are read off the decomposition realizer `h[w]`.
    fn corecurrence(&mut self, g: Term, h: Term, label: &Name) -> Result<Term, ExtractError> {
        let ops = self.ops.clone();
        let u = realizer_var(label);
        let mut free = BTreeSet::new();
        h.collect_vars(&mut free);
        free.remove(&u);
        let params: Vec<Name> = free.into_iter().collect();
        self.counter += 1;
        let r = name(&format!("corec{}", self.counter));
        let w = name("w@");
        let hw = h.subst_var(&u, &Term::Var(w.clone()));
        // exists z0. exists z1. B(z0) /\ (phi[z1] /\ x = z0 : z1)
        let body = ops.split(ops.split(hw, 1), 1);
        let head = ops.hd(ops.split(body.clone(), 0));
        let next = ops.split(ops.split(body, 1), 0);
        let mut all = params.clone();
        all.push(w);
        let head_c = self.component(&head, &all)?;
        let next_c = self.component(&next, &all)?;
        let mut args: Vec<Component> = (0..params.len()).map(Component::Param).collect();
        args.push(next_c);
        self.strata.push(Stratum::Vector(vec![CorecFunction {
            name: r.clone(),
            arity: all.len(),
            production: Production::Destructor {
                ctor: ops.shape.cons.clone(),
                slots: vec![Slot::Emit(head_c), Slot::Call(VectorCall { target: 0, args })],
            },
        }]));
        self.defined.push(r.clone());
        let mut call: Vec<Term> = params.into_iter().map(Term::Var).collect();
        call.push(g);
        Ok(Term::Fun(r, call))
    }

    /// Converts a realizer term over `params` into a component.
    fn component(&self, t: &Term, params: &[Name]) -> Result<Component, ExtractError> {
        let sh = &self.ops.shape;
        let all = |xs: &[Term]| xs.iter().map(|x| self.component(x, params)).collect::<Result<Vec<_>, _>>();
        match t {
            Term::Var(v) => params
                .iter()
                .position(|p| p == v)
                .map(Component::Param)
                .ok_or_else(|| ExtractError::Internal(format!("realizer mentions unbound `{v}`"))),
            Term::Con(c, xs) => Ok(Component::Ctor(c.clone(), all(xs)?)),
            Term::Fun(f, xs) if *f == sh.hd || *f == sh.tl => {
                let i = if *f == sh.hd { 1 } else { 2 };
                Ok(Component::Dest(i, Box::new(self.component(&xs[0], params)?)))
            }
            Term::Fun(f, xs) if *f == sh.delta => Ok(Component::Delta(all(xs)?)),
            Term::Fun(f, xs) if self.defined.contains(f) => Ok(Component::Prev(f.clone(), all(xs)?)),
            Term::Fun(f, _) => Err(ExtractError::Internal(format!("realizer uses unknown function `{f}`"))),
        }
    }
}

trait IntoConst {
    fn into_const(self) -> Term;
}

impl IntoConst for Name {
    fn into_const(self) -> Term {
        Term::Con(self, Vec::new())
    }
}

/// Argument list for applying an extraction to input streams: each free
/// variable and each assumption realizer `S(x)` receives the input for `x`.
pub fn realizer_arguments(
    ex: &Extraction,
    d: &Derivation,
    inputs: &BTreeMap<Name, Term>,
) -> Result<Vec<Term>, ExtractError> {
    let open: BTreeMap<Name, crate::logic::Formula> = d.open_assumptions().into_iter().collect();
    ex.params
        .iter()
        .map(|p| {
            if let Some(t) = inputs.get(p) {
                return Ok(t.clone());
            }
            let label = ex.assumptions.iter().find(|u| realizer_var(u) == *p);
            match label.and_then(|u| open.get(u)) {
                Some(crate::logic::Formula::Atom(_, Term::Var(x))) => {
                    inputs.get(x).cloned().ok_or_else(|| ExtractError::Internal(format!("no input for `{x}`")))
                }
                _ => Err(ExtractError::Internal(format!("cannot supply parameter `{p}`"))),
            }
        })
        .collect()
}
