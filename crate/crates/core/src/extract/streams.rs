//! Stream shape of a data system and the realizer-stream algebra:
//! `even`, `odd`, `merge`, `zeros` and the splits `sigma_i`.

use std::collections::BTreeMap;

use crate::corec::{compile_schema, Component, CorecFunction, Production, Schema, Slot, Stratum, VectorCall};
use crate::data_system::{DataSystem, PredKind};
use crate::eval::{Approximation, DiagramEnv, Session};
use crate::program::{Equation, Program};
use crate::term::{name, Name, Term};

use super::ExtractError;

/// A data system of boolean-like streams: one coinductive predicate whose
/// only constructor type is `c : B * S -> S`, with `B` inductive and built
/// from constants only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamShape {
    pub stream: Name,
    pub boolean: Name,
    pub cons: Name,
    /// Constants of `B` in declaration order; the first selects the left
    /// disjunct of a realized disjunction.
    pub bools: Vec<Name>,
    pub hd: Name,
    pub tl: Name,
    pub delta: Name,
    /// All constructors in declaration order (the `delta` branch order).
    pub constructors: Vec<Name>,
}

impl StreamShape {
    pub fn of(ds: &DataSystem) -> Result<StreamShape, ExtractError> {
        let unsupported = |m: &str| Err(ExtractError::UnsupportedSystem(format!("{}: {m}", ds.name)));
        let co: Vec<_> = ds.predicates.iter().filter(|p| p.kind == PredKind::Coinductive).collect();
        let [s] = co.as_slice() else { return unsupported("needs exactly one coinductive predicate") };
        let types = ds.types_of(&s.name);
        let [ty] = types.as_slice() else { return unsupported("stream predicate needs exactly one constructor type") };
        let [b, s2] = ty.args.as_slice() else { return unsupported("stream constructor must be binary") };
        if s2 != &s.name || ds.predicate(b).map(|p| p.kind) != Some(PredKind::Inductive) {
            return unsupported("stream constructor must have type B * S -> S with B inductive");
        }
        let btypes = ds.types_of(b);
        if btypes.iter().any(|t| !t.args.is_empty()) || btypes.len() < 2 {
            return unsupported("B must consist of at least two constants");
        }
        if ds.max_arity() != 2 {
            return unsupported("the stream constructor must be the only non-constant constructor");
        }
        Ok(StreamShape {
            stream: s.name.clone(),
            boolean: b.clone(),
            cons: ty.constructor.clone(),
            bools: btypes.iter().map(|t| t.constructor.clone()).collect(),
            hd: ds.destructor_name(1),
            tl: ds.destructor_name(2),
            delta: ds.discriminator_name(),
            constructors: ds.constructors.iter().map(|c| c.name.clone()).collect(),
        })
    }

    pub fn zero(&self) -> Term {
        Term::Con(self.bools[0].clone(), Vec::new())
    }
}

/// Names of the realizer library functions, optionally suffixed so that
/// they can live next to a user program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamOps {
    pub shape: StreamShape,
    pub even: Name,
    pub odd: Name,
    pub merge: Name,
    pub zeros: Name,
}

impl StreamOps {
    pub fn new(shape: StreamShape, suffix: &str) -> StreamOps {
        let n = |s: &str| name(&format!("{s}{suffix}"));
        StreamOps { shape, even: n("even"), odd: n("odd"), merge: n("merge"), zeros: n("zeros") }
    }

    pub fn zeros(&self) -> Term {
        Term::Fun(self.zeros.clone(), Vec::new())
    }

    fn is_zeros(&self, t: &Term) -> bool {
        matches!(t, Term::Fun(f, xs) if *f == self.zeros && xs.is_empty())
    }

    /// Applies a projection to each branch of a case on a boolean; `None`
    /// when `t` is not such a case.
    fn into_branches(&self, t: Term, op: impl Fn(&Self, Term) -> Term) -> Result<Term, Term> {
        match t {
            Term::Fun(f, xs) if f == self.shape.delta => {
                let mut it = xs.into_iter();
                let mut args = vec![it.next().expect("scrutinee")];
                args.extend(it.map(|b| op(self, b)));
                Ok(Term::Fun(f, args))
            }
            t => Err(t),
        }
    }

    pub fn hd(&self, t: Term) -> Term {
        if self.is_zeros(&t) {
            return self.shape.zero();
        }
        match self.into_branches(t, Self::hd) {
            Ok(t) => t,
            Err(Term::Con(c, mut xs)) if c == self.shape.cons => xs.swap_remove(0),
            Err(t) => Term::Fun(self.shape.hd.clone(), vec![t]),
        }
    }

    pub fn tl(&self, t: Term) -> Term {
        if self.is_zeros(&t) {
            return t;
        }
        match self.into_branches(t, Self::tl) {
            Ok(t) => t,
            Err(Term::Con(c, mut xs)) if c == self.shape.cons => xs.pop().expect("binary constructor"),
            Err(t) => Term::Fun(self.shape.tl.clone(), vec![t]),
        }
    }

    pub fn cons(&self, h: Term, t: Term) -> Term {
        Term::Con(self.shape.cons.clone(), vec![h, t])
    }

    pub fn even(&self, t: Term) -> Term {
        if self.is_zeros(&t) {
            return t;
        }
        match self.into_branches(t, Self::even) {
            Ok(t) => t,
            Err(Term::Fun(f, mut xs)) if f == self.merge => xs.swap_remove(0),
            Err(t) => Term::Fun(self.even.clone(), vec![t]),
        }
    }

    pub fn odd(&self, t: Term) -> Term {
        if self.is_zeros(&t) {
            return t;
        }
        match self.into_branches(t, Self::odd) {
            Ok(t) => t,
            Err(Term::Fun(f, mut xs)) if f == self.merge => xs.pop().expect("binary merge"),
            Err(t) => Term::Fun(self.odd.clone(), vec![t]),
        }
    }

    pub fn merge(&self, a: Term, b: Term) -> Term {
        Term::Fun(self.merge.clone(), vec![a, b])
    }

    /// `sigma_i = even(odd^i(sigma))`.
    pub fn split(&self, t: Term, i: usize) -> Term {
        self.even((0..i).fold(t, |acc, _| self.odd(acc)))
    }

    /// The stream whose splits 0 and 1 are `a` and `b`.
    pub fn pair(&self, a: Term, b: Term) -> Term {
        self.merge(a, self.merge(b, self.zeros()))
    }

    /// A boolean encoded as a stream by its head.
    pub fn boolean(&self, b: Term) -> Term {
        self.cons(b, self.zeros())
    }

    /// Case analysis on a boolean; constructors outside `B` get `zeros`.
    pub fn case(&self, scrutinee: Term, branches: &BTreeMap<Name, Term>) -> Term {
        let mut distinct = self.shape.bools.iter().map(|b| branches.get(b));
        if let Some(Some(first)) = distinct.next() {
            if distinct.all(|b| b == Some(first)) {
                return first.clone();
            }
        }
        if let Term::Con(c, xs) = &scrutinee {
            if xs.is_empty() {
                if let Some(b) = branches.get(c) {
                    return b.clone();
                }
            }
        }
        let mut args = vec![scrutinee];
        args.extend(self.shape.constructors.iter().map(|c| branches.get(c).cloned().unwrap_or_else(|| self.zeros())));
        Term::Fun(self.shape.delta.clone(), args)
    }

    /// `zeros`, `even`, `odd` and `merge` as a stratified schema.
    pub fn library_strata(&self) -> Vec<Stratum> {
        let x = || Component::Param(0);
        let hd = |c: Component| Component::Dest(1, Box::new(c));
        let tl = |c: Component| Component::Dest(2, Box::new(c));
        let single = |f: &Name, arity: usize, head: Component, args: Vec<Component>| {
            Stratum::Vector(vec![CorecFunction {
                name: f.clone(),
                arity,
                production: Production::Destructor {
                    ctor: self.shape.cons.clone(),
                    slots: vec![Slot::Emit(head), Slot::Call(VectorCall { target: 0, args })],
                },
            }])
        };
        vec![
            single(&self.zeros, 0, Component::Ctor(self.shape.bools[0].clone(), Vec::new()), Vec::new()),
            single(&self.even, 1, hd(x()), vec![tl(tl(x()))]),
            Stratum::Explicit { name: self.odd.clone(), arity: 1, body: Component::Prev(self.even.clone(), vec![tl(x())]) },
            single(&self.merge, 2, hd(x()), vec![Component::Param(1), tl(x())]),
        ]
    }

    pub fn library_program(&self, ds: &DataSystem) -> Program {
        let s = Schema { name: name("streams"), principal: self.merge.clone(), strata: self.library_strata() };
        compile_schema(&s, ds).expect("library schema is well formed")
    }
}

/// Renames defined functions of `p` (not the standard ones) by `suffix`.
pub fn suffix_functions(p: &Program, ds: &DataSystem, suffix: &str) -> Program {
    let defined: Vec<Name> = p.user_equations(ds).map(|e| e.function.clone()).collect();
    let rename = |f: &Name| if defined.contains(f) { name(&format!("{f}{suffix}")) } else { f.clone() };
    let eqs: Vec<Equation> = p
        .user_equations(ds)
        .map(|e| Equation {
            function: rename(&e.function),
            patterns: e.patterns.clone(),
            rhs: rename_funs(&e.rhs, &rename),
            style: e.style,
        })
        .collect();
    Program::new(&p.name, ds, &rename(&p.principal), eqs)
}

pub fn rename_funs(t: &Term, f: &dyn Fn(&Name) -> Name) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Con(c, xs) => Term::Con(c.clone(), xs.iter().map(|x| rename_funs(x, f)).collect()),
        Term::Fun(g, xs) => Term::Fun(f(g), xs.iter().map(|x| rename_funs(x, f)).collect()),
    }
}

/// Union of the user equations of several programs over one system.
/// Functions defined by more than one program keep the first definition.
pub fn combine(ds: &DataSystem, principal: &Program, others: &[&Program]) -> Program {
    let mut eqs: Vec<Equation> = principal.user_equations(ds).cloned().collect();
    for p in others {
        let have: Vec<Name> = eqs.iter().map(|e| e.function.clone()).collect();
        eqs.extend(p.user_equations(ds).filter(|e| !have.contains(&e.function)).cloned());
    }
    Program::new(&principal.name, ds, &principal.principal, eqs)
}

/// Suffix used for the realizer library inside combined sessions.
pub const LIBRARY_SUFFIX: &str = "@r";

/// A session program containing `p` and the suffixed realizer library.
pub fn with_library(p: &Program, ds: &DataSystem) -> Result<(Program, StreamOps), ExtractError> {
    let ops = StreamOps::new(StreamShape::of(ds)?, LIBRARY_SUFFIX);
    let lib = ops.library_program(ds);
    Ok((combine(ds, p, &[&lib]), ops))
}

/// Observes `sigma_i` to `depth`.
pub fn split(
    p: &Program,
    ds: &DataSystem,
    env: &DiagramEnv,
    sigma: &Term,
    i: usize,
    depth: usize,
    budget: usize,
) -> Result<Approximation, ExtractError> {
    let (prog, ops) = with_library(p, ds)?;
    Ok(Session::new(&prog, env).observe(&ops.split(sigma.clone(), i), depth, budget))
}

/// Observes the interleaving of `a` (even positions) and `b` (odd positions).
pub fn merge(
    p: &Program,
    ds: &DataSystem,
    env: &DiagramEnv,
    a: &Term,
    b: &Term,
    depth: usize,
    budget: usize,
) -> Result<Approximation, ExtractError> {
    let (prog, ops) = with_library(p, ds)?;
    Ok(Session::new(&prog, env).observe(&ops.merge(a.clone(), b.clone()), depth, budget))
}
