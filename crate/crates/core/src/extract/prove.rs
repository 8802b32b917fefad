//! Coinductive proofs of productivity for primitive corecursive programs.
//!
//! For a corecurrence vector `f_1 .. f_m` the eigen-formula is
//! `phi[z] = psi_1 \/ .. \/ psi_m` with
//! `psi_j = exists y.. . S(y_1) /\ .. /\ f_j(y..) = z`; component
//! sub-proofs are generated from the component structure.

use std::collections::{BTreeMap, BTreeSet};

use crate::corec::{Component, CorecFunction, Production, Schema, Slot, Stratum};
use crate::data_system::DataSystem;
use crate::logic::{build_dcm, Derivation, Direction, Formula, InductionCase, Rule, Side};
use crate::program::{EqRef, Program};
use crate::term::{fresh_name, name, Name, Term};

use super::streams::StreamShape;
use super::ExtractError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Bool,
    Stream,
}

/// `S(f(y..))` from the open assumptions `labels_i : S(y_i)`.
#[derive(Debug, Clone)]
struct Lemma {
    params: Vec<Name>,
    labels: Vec<Name>,
    proof: Derivation,
}

/// Label of the assumption `S(x)` for parameter `x`.
pub fn assumption_label(x: &str) -> Name {
    name(&format!("h{x}"))
}

struct Prover<'a> {
    ds: &'a DataSystem,
    p: &'a Program,
    shape: StreamShape,
    lemmas: BTreeMap<Name, Lemma>,
    counter: usize,
}

/// Derives `S(f(x..))` from `S(x)` for each parameter, where `f` is the
/// principal of `schema` and `program` contains its compiled equations.
pub fn prove_corec(schema: &Schema, program: &Program, ds: &DataSystem) -> Result<Derivation, ExtractError> {
    let mut pr = Prover { ds, p: program, shape: StreamShape::of(ds)?, lemmas: BTreeMap::new(), counter: 0 };
    for st in &schema.strata {
        match st {
            Stratum::Explicit { name: f, arity, body } => {
                let lemma = pr.explicit_lemma(f, *arity, body)?;
                pr.lemmas.insert(f.clone(), lemma);
            }
            Stratum::Vector(fs) => {
                for j in 0..fs.len() {
                    let lemma = pr.vector_lemma(fs, j)?;
                    pr.lemmas.insert(fs[j].name.clone(), lemma);
                }
            }
        }
    }
    let lemma = pr.lemmas.get(&schema.principal).ok_or_else(|| ExtractError::MissingEquation(schema.principal.clone()))?;
    let xs = crate::corec::param_names(lemma.params.len());
    let args: Vec<Term> = xs.iter().map(|x| Term::Var(x.clone())).collect();
    let hyps: Vec<Derivation> =
        xs.iter().zip(&args).map(|(x, a)| Derivation::assume(&assumption_label(x), pr.s(a.clone()))).collect();
    Ok(pr.instantiate(lemma, &args, &hyps))
}

/// Discharges the open assumptions, innermost last: `S(x) -> S(y) -> C`.
pub fn discharge_all(d: &Derivation) -> Derivation {
    let mut seen = Vec::new();
    for (u, a) in d.open_assumptions() {
        if !seen.iter().any(|(v, _)| *v == u) {
            seen.push((u, a));
        }
    }
    seen.into_iter().rev().fold(d.clone(), |acc, (u, a)| {
        let c = Formula::imp(a, acc.conclusion.clone());
        Derivation::new(Rule::ImpIntro(u), c, vec![acc])
    })
}

fn and_elims(d: Derivation, rights: usize, left: bool) -> Derivation {
    let mut d = d;
    for _ in 0..rights {
        let Formula::And(_, b) = &d.conclusion else { unreachable!("conjunction expected") };
        let c = (**b).clone();
        d = Derivation::new(Rule::AndElim(Side::Right), c, vec![d]);
    }
    if left {
        let Formula::And(a, _) = &d.conclusion else { unreachable!("conjunction expected") };
        let c = (**a).clone();
        d = Derivation::new(Rule::AndElim(Side::Left), c, vec![d]);
    }
    d
}

/// Proves a right-nested conjunction from proofs of its conjuncts.
fn and_intros(f: &Formula, mut leaves: Vec<Derivation>) -> Derivation {
    if leaves.len() == 1 {
        return leaves.pop().expect("one leaf");
    }
    let Formula::And(_, b) = f else { unreachable!("conjunction expected") };
    let first = leaves.remove(0);
    let rest = and_intros(b, leaves);
    Derivation::new(Rule::AndIntro, f.clone(), vec![first, rest])
}

/// Proves `exists y_1 .. y_k. body` from a proof of the instance at `ws`.
fn exists_intros(f: &Formula, ws: &[Term], body: impl FnOnce(&Formula) -> Derivation) -> Derivation {
    match ws.split_first() {
        None => body(f),
        Some((w, rest)) => {
            let Formula::Exists(y, b) = f else { unreachable!("existential expected") };
            let inner = exists_intros(&b.subst(y, w), rest, body);
            Derivation::new(Rule::ExistsIntro(w.clone()), f.clone(), vec![inner])
        }
    }
}

fn disjuncts(f: &Formula, m: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    let mut cur = f.clone();
    for _ in 1..m {
        let Formula::Or(a, b) = cur else { unreachable!("disjunction expected") };
        out.push(*a);
        cur = *b;
    }
    out.push(cur);
    out
}

impl Prover<'_> {
    fn fresh(&mut self, base: &str) -> Name {
        self.counter += 1;
        name(&format!("{base}{}", self.counter))
    }

    fn s(&self, t: Term) -> Formula {
        Formula::Atom(self.shape.stream.clone(), t)
    }

    fn b(&self, t: Term) -> Formula {
        Formula::Atom(self.shape.boolean.clone(), t)
    }

    fn eq_ref(&self, f: &Name) -> Result<EqRef, ExtractError> {
        self.p
            .clauses(f)
            .position(|e| e.patterns.iter().all(Term::is_var))
            .map(|clause| EqRef { function: f.clone(), clause })
            .ok_or_else(|| ExtractError::MissingEquation(f.clone()))
    }

    /// Instantiates a lemma at `args`, grafting the argument proofs.
    fn instantiate(&self, lemma: &Lemma, args: &[Term], proofs: &[Derivation]) -> Derivation {
        let mut used = lemma.proof.names();
        for (a, p) in args.iter().zip(proofs) {
            a.collect_vars(&mut used);
            used.extend(p.names());
        }
        let mut d = lemma.proof.clone();
        let mut params = Vec::new();
        let mut labels = Vec::new();
        for (x, u) in lemma.params.iter().zip(&lemma.labels) {
            let x2 = fresh_name(&format!("{x}_"), &used);
            used.insert(x2.clone());
            let u2 = fresh_name(&format!("{u}_"), &used);
            used.insert(u2.clone());
            d = d.subst_term(x, &Term::Var(x2.clone())).rename_label(u, &u2);
            params.push(x2);
            labels.push(u2);
        }
        for ((x, u), (a, p)) in params.iter().zip(&labels).zip(args.iter().zip(proofs)) {
            d = d.subst_term(x, a).graft(u, p);
        }
        d
    }

    fn missing(&self, c: &Component, params: &[Term], why: &str) -> ExtractError {
        ExtractError::MissingSubProof { component: c.to_term(self.ds, params).to_string(), reason: why.into() }
    }

    /// A proof of `B(c)` or `S(c)` from proofs of `S(param)`.
    fn component(&mut self, c: &Component, sort: Sort, params: &[Term], hyps: &[Derivation]) -> Result<Derivation, ExtractError> {
        let term = c.to_term(self.ds, params);
        match (c, sort) {
            (Component::Param(i), Sort::Stream) => Ok(hyps[*i].clone()),
            (Component::Dest(1, x), Sort::Bool) | (Component::Dest(2, x), Sort::Stream) => {
                let i = if sort == Sort::Bool { 1 } else { 2 };
                let px = self.component(x, Sort::Stream, params, hyps)?;
                let concl = if sort == Sort::Bool { self.b(term) } else { self.s(term) };
                Ok(Derivation::new(Rule::DataElim(i), concl, vec![px]))
            }
            (Component::Ctor(k, xs), Sort::Bool) if xs.is_empty() && self.shape.bools.contains(k) => {
                Ok(Derivation::new(Rule::DataIntro, self.b(term), Vec::new()))
            }
            (Component::Delta(xs), _) if xs.len() == self.shape.constructors.len() + 1 => {
                let scrut = self.component(&xs[0], Sort::Bool, params, hyps)?;
                let branches: Vec<Term> = xs[1..].iter().map(|x| x.to_term(self.ds, params)).collect();
                let mut used = BTreeSet::new();
                branches.iter().for_each(|b| b.collect_vars(&mut used));
                let z = fresh_name("z", &used);
                let mut inners = Vec::new();
                for b in self.shape.bools.clone() {
                    let ci = self.shape.constructors.iter().position(|c| *c == b).expect("known constructor");
                    inners.push((b, ci, self.component(&xs[ci + 1], sort, params, hyps)?));
                }
                let atom = |t: Term| {
                    if sort == Sort::Bool {
                        self.b(t)
                    } else {
                        self.s(t)
                    }
                };
                let case_term = |s: Term| {
                    let mut args = vec![s];
                    args.extend(branches.iter().cloned());
                    Term::Fun(self.shape.delta.clone(), args)
                };
                let phi = atom(case_term(Term::Var(z.clone())));
                let mut premises = vec![scrut];
                let mut cases = Vec::new();
                for (b, ci, inner) in inners {
                    let concl = atom(case_term(Term::Con(b.clone(), Vec::new())));
                    premises.push(Derivation::new(
                        Rule::Rewrite {
                            eq: EqRef { function: self.shape.delta.clone(), clause: ci },
                            dir: Direction::Backward,
                            at: vec![0],
                        },
                        concl,
                        vec![inner],
                    ));
                    cases.push(InductionCase { vars: Vec::new(), labels: Vec::new() });
                }
                let rule = Rule::Induction { pred: self.shape.boolean.clone(), var: z, phi, cases };
                Ok(Derivation::new(rule, atom(term), premises))
            }
            (Component::Prev(g, xs), Sort::Stream) => {
                let lemma = self.lemmas.get(g).cloned().ok_or_else(|| self.missing(c, params, "no lemma for function"))?;
                let args: Vec<Term> = xs.iter().map(|x| x.to_term(self.ds, params)).collect();
                let proofs = xs
                    .iter()
                    .map(|x| self.component(x, Sort::Stream, params, hyps))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(self.instantiate(&lemma, &args, &proofs))
            }
            (Component::Ctor(..), Sort::Stream) => {
                Err(self.missing(c, params, "stream construction inside a component needs its own coinduction"))
            }
            _ => Err(self.missing(c, params, &format!("component has no proof at sort {sort:?}"))),
        }
    }

    fn params(&mut self, arity: usize) -> (Vec<Name>, Vec<Name>, Vec<Term>, Vec<Derivation>) {
        let xs: Vec<Name> = (0..arity).map(|_| self.fresh("x")).collect();
        let labels: Vec<Name> = xs.iter().map(|x| assumption_label(x)).collect();
        let terms: Vec<Term> = xs.iter().map(|x| Term::Var(x.clone())).collect();
        let hyps = labels.iter().zip(&terms).map(|(u, t)| Derivation::assume(u, self.s(t.clone()))).collect();
        (xs, labels, terms, hyps)
    }

    fn explicit_lemma(&mut self, f: &Name, arity: usize, body: &Component) -> Result<Lemma, ExtractError> {
        let (xs, labels, terms, hyps) = self.params(arity);
        let inner = self.component(body, Sort::Stream, &terms, &hyps)?;
        let rule = Rule::Rewrite { eq: self.eq_ref(f)?, dir: Direction::Backward, at: vec![0] };
        let proof = Derivation::new(rule, self.s(Term::Fun(f.clone(), terms)), vec![inner]);
        Ok(Lemma { params: xs, labels, proof })
    }

    fn eigen_formula(&mut self, fs: &[CorecFunction], z: &Name) -> Formula {
        let parts: Vec<Formula> = fs
            .iter()
            .map(|f| {
                let ys: Vec<Name> = if f.arity == 1 {
                    vec![name("y")]
                } else {
                    (1..=f.arity).map(|i| name(&format!("y{i}"))).collect()
                };
                let ts: Vec<Term> = ys.iter().map(|y| Term::Var(y.clone())).collect();
                let mut conj: Vec<Formula> = ts.iter().map(|t| self.s(t.clone())).collect();
                conj.push(Formula::eq(Term::Fun(f.name.clone(), ts), Term::Var(z.clone())));
                let body = Formula::conj(conj).expect("non-empty");
                ys.iter().rev().fold(body, |acc, y| Formula::Exists(y.clone(), Box::new(acc)))
            })
            .collect();
        Formula::disj(parts).expect("non-empty vector")
    }

    /// Proves `phi[f_j(args)]`.
    fn intro_phi(&self, phi_t: &Formula, m: usize, j: usize, args: &[Term], proofs: Vec<Derivation>) -> Derivation {
        let psi = disjuncts(phi_t, m).swap_remove(j);
        let mut d = exists_intros(&psi, args, |body| {
            let Formula::Eq(l, _) = last_conjunct(body) else { unreachable!("equation expected") };
            let refl = Derivation::new(Rule::Refl, Formula::eq(l.clone(), l.clone()), Vec::new());
            let mut leaves = proofs;
            leaves.push(refl);
            and_intros(body, leaves)
        });
        // Walk back out through the disjunction.
        let tails: Vec<Formula> = {
            let mut v = vec![phi_t.clone()];
            for _ in 1..m {
                let Formula::Or(_, b) = v.last().expect("nonempty").clone() else { unreachable!() };
                v.push(*b);
            }
            v
        };
        if j + 1 < m {
            d = Derivation::new(Rule::OrIntro(Side::Left), tails[j].clone(), vec![d]);
        }
        for i in (0..j).rev() {
            d = Derivation::new(Rule::OrIntro(Side::Right), tails[i].clone(), vec![d]);
        }
        d
    }

    fn vector_lemma(&mut self, fs: &[CorecFunction], j: usize) -> Result<Lemma, ExtractError> {
        let (xs, labels, terms, hyps) = self.params(fs[j].arity);
        let z = name("z");
        let phi = self.eigen_formula(fs, &z);
        let m = fs.len();
        let target = Term::Fun(fs[j].name.clone(), terms.clone());
        let left = self.intro_phi(&phi.subst(&z, &target), m, j, &terms, hyps);
        let w = self.fresh("w");
        let u = self.fresh("u");
        let dcm = build_dcm(self.ds, &self.shape.stream, &phi, &z, &w).map_err(|e| ExtractError::UnsupportedSystem(e.to_string()))?;
        let phi_w = phi.subst(&z, &Term::Var(w.clone()));
        let major = Derivation::assume(&u, phi_w.clone());
        let right = self.eliminate_disjunction(fs, &phi, &z, &w, major, &dcm, 0)?;
        let rule = Rule::Coinduction { pred: self.shape.stream.clone(), var: z, phi, eigen: w, label: u };
        let proof = Derivation::new(rule, self.s(target), vec![left, right]);
        Ok(Lemma { params: xs, labels, proof })
    }

    /// Proves `dcm` from `major : psi_from \/ .. \/ psi_m [w]` by cases.
    fn eliminate_disjunction(
        &mut self,
        fs: &[CorecFunction],
        phi: &Formula,
        z: &Name,
        w: &Name,
        major: Derivation,
        dcm: &Formula,
        from: usize,
    ) -> Result<Derivation, ExtractError> {
        if from + 1 == fs.len() {
            return self.decompose(fs, phi, z, w, from, major, dcm);
        }
        let Formula::Or(a, b) = major.conclusion.clone() else { unreachable!("disjunction expected") };
        let (la, lb) = (self.fresh("c"), self.fresh("c"));
        let left = self.decompose(fs, phi, z, w, from, Derivation::assume(&la, *a), dcm)?;
        let right = self.eliminate_disjunction(fs, phi, z, w, Derivation::assume(&lb, *b), dcm, from + 1)?;
        Ok(Derivation::new(Rule::OrElim(la, lb), dcm.clone(), vec![major, left, right]))
    }

    /// Case `j`: from `exists y.. . S(y..) /\ f_j(y..) = w` to the
    /// decomposition `exists z0 z1. B(z0) /\ phi[z1] /\ w = z0 : z1`.
    #[allow(clippy::too_many_arguments)]
    fn decompose(
        &mut self,
        fs: &[CorecFunction],
        phi: &Formula,
        z: &Name,
        w: &Name,
        j: usize,
        major: Derivation,
        dcm: &Formula,
    ) -> Result<Derivation, ExtractError> {
        let f = &fs[j];
        let Production::Destructor { slots, .. } = &f.production else {
            return Err(ExtractError::UnsupportedProduction(f.name.clone()));
        };
        let [Slot::Emit(h), Slot::Call(call)] = slots.as_slice() else {
            return Err(ExtractError::UnsupportedProduction(f.name.clone()));
        };
        // Open the existentials: F_0 = psi_j[w], F_{i+1} = F_i[v_i / y_i].
        let mut stages = vec![major.conclusion.clone()];
        let mut eigens = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..f.arity {
            let Formula::Exists(y, b) = stages.last().expect("nonempty").clone() else {
                unreachable!("existential expected")
            };
            let v = self.fresh("v");
            stages.push(b.subst(&y, &Term::Var(v.clone())));
            eigens.push(v);
            labels.push(self.fresh("e"));
        }
        let body = stages.last().expect("nonempty").clone();
        let body_proof = match labels.last() {
            Some(l) => Derivation::assume(l, body.clone()),
            None => major.clone(),
        };
        let params: Vec<Term> = eigens.iter().map(|v| Term::Var(v.clone())).collect();
        let hyps: Vec<Derivation> = (0..f.arity).map(|i| and_elims(body_proof.clone(), i, true)).collect();
        let eq_proof = and_elims(body_proof, f.arity, false);

        let lhs = Term::Fun(f.name.clone(), params.clone());
        let head = h.to_term(self.ds, &params);
        let args: Vec<Term> = call.args.iter().map(|a| a.to_term(self.ds, &params)).collect();
        let next = Term::Fun(fs[call.target].name.clone(), args.clone());
        let unfolded = Term::Con(self.shape.cons.clone(), vec![head.clone(), next.clone()]);
        let refl = Derivation::new(Rule::Refl, Formula::eq(lhs.clone(), lhs.clone()), Vec::new());
        let rewrite = Rule::Rewrite { eq: self.eq_ref(&f.name)?, dir: Direction::Forward, at: vec![1] };
        let r1 = Derivation::new(rewrite, Formula::eq(lhs, unfolded.clone()), vec![refl]);
        let r2 = Derivation::new(Rule::EqSubst(vec![0]), Formula::eq(Term::Var(w.clone()), unfolded), vec![eq_proof, r1]);

        let b_proof = self.component(h, Sort::Bool, &params, &hyps)?;
        let arg_proofs = call
            .args
            .iter()
            .map(|a| self.component(a, Sort::Stream, &params, &hyps))
            .collect::<Result<Vec<_>, _>>()?;
        let phi_proof = self.intro_phi(&phi.subst(z, &next), fs.len(), call.target, &args, arg_proofs);
        let mut inner = exists_intros(dcm, &[head, next], |b| and_intros(b, vec![b_proof, phi_proof, r2]));

        for i in (0..f.arity).rev() {
            let maj = if i == 0 { major.clone() } else { Derivation::assume(&labels[i - 1], stages[i].clone()) };
            let rule = Rule::ExistsElim { label: labels[i].clone(), eigen: eigens[i].clone() };
            inner = Derivation::new(rule, dcm.clone(), vec![maj, inner]);
        }
        Ok(inner)
    }
}

fn last_conjunct(f: &Formula) -> &Formula {
    match f {
        Formula::And(_, b) => last_conjunct(b),
        other => other,
    }
}
