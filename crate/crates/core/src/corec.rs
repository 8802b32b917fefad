//! The primitive-corecurrence schema: components, schemas, the syntactic
//! recognizer and compilation back to equational programs.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::data_system::DataSystem;
use crate::program::{Equation, EquationStyle, Program};
use crate::term::{name, Name, Term};

/// Name of the constructor-selecting function of the general schema.
pub const COCASE: &str = "cocase";

/// A function generated from constructors, destructors, the discriminator
/// and previously defined functions by composition, written as a term over
/// the enclosing function's parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Component {
    Param(usize),
    Ctor(Name, Vec<Component>),
    /// 1-based destructor index.
    Dest(usize, Box<Component>),
    Delta(Vec<Component>),
    Prev(Name, Vec<Component>),
}

impl Component {
    pub fn to_term(&self, ds: &DataSystem, params: &[Term]) -> Term {
        match self {
            Component::Param(i) => params[*i].clone(),
            Component::Ctor(c, xs) => Term::Con(c.clone(), xs.iter().map(|x| x.to_term(ds, params)).collect()),
            Component::Dest(i, x) => Term::Fun(ds.destructor_name(*i), vec![x.to_term(ds, params)]),
            Component::Delta(xs) => {
                Term::Fun(ds.discriminator_name(), xs.iter().map(|x| x.to_term(ds, params)).collect())
            }
            Component::Prev(f, xs) => Term::Fun(f.clone(), xs.iter().map(|x| x.to_term(ds, params)).collect()),
        }
    }

    /// Previously-defined functions used, in first-occurrence order.
    pub fn uses(&self, out: &mut Vec<Name>) {
        match self {
            Component::Param(_) => {}
            Component::Dest(_, x) => x.uses(out),
            Component::Ctor(_, xs) | Component::Delta(xs) => xs.iter().for_each(|x| x.uses(out)),
            Component::Prev(f, xs) => {
                if !out.contains(f) {
                    out.push(f.clone());
                }
                xs.iter().for_each(|x| x.uses(out));
            }
        }
    }
}

/// `f_target(args..)`, a recursive call in an exact corecurrence slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorCall {
    /// Index into the enclosing vector.
    pub target: usize,
    pub args: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slot {
    Emit(Component),
    Call(VectorCall),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Production {
    /// `f(x..) = c(s_1 .. s_r)`; for the single non-constant constructor
    /// this is the destructor form `pi_i(f(x..)) = s_i`.
    Destructor { ctor: Name, slots: Vec<Slot> },
    /// `f(x..) = cocase(h(x..), e_1 .. e_k)`.
    Cocase { selector: Component, calls: Vec<VectorCall> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorecFunction {
    pub name: Name,
    pub arity: usize,
    pub production: Production,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stratum {
    Explicit { name: Name, arity: usize, body: Component },
    Vector(Vec<CorecFunction>),
}

impl Stratum {
    pub fn names(&self) -> Vec<Name> {
        match self {
            Stratum::Explicit { name, .. } => vec![name.clone()],
            Stratum::Vector(fs) => fs.iter().map(|f| f.name.clone()).collect(),
        }
    }
}

/// A program presented as a stratified sequence of explicit definitions
/// and corecurrence vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schema {
    pub name: Name,
    pub principal: Name,
    pub strata: Vec<Stratum>,
}

impl Schema {
    pub fn function(&self, f: &str) -> Option<&CorecFunction> {
        self.strata.iter().find_map(|s| match s {
            Stratum::Vector(fs) => fs.iter().find(|g| &*g.name == f),
            _ => None,
        })
    }

    pub fn stratum_of(&self, f: &str) -> Option<usize> {
        self.strata.iter().position(|s| s.names().iter().any(|n| &**n == f))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    PrimitiveCorecursive(Schema),
    Rejected { function: Name, reason: String, equation: Option<Equation> },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::PrimitiveCorecursive(_))
    }

    pub fn schema(&self) -> Option<&Schema> {
        match self {
            Verdict::PrimitiveCorecursive(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("component refers to undefined function `{0}`")]
    UndefinedComponent(Name),
    #[error("call target {target} outside vector of length {len}")]
    BadTarget { target: usize, len: usize },
    #[error("`{function}` called with {found} arguments, expected {expected}")]
    CallArity { function: Name, expected: usize, found: usize },
}

/// Parameter names used when compiling a function of the given arity.
pub fn param_names(arity: usize) -> Vec<Name> {
    const SMALL: [&str; 3] = ["x", "y", "z"];
    if arity <= SMALL.len() {
        SMALL[..arity].iter().map(|s| name(s)).collect()
    } else {
        (1..=arity).map(|i| name(&format!("x{i}"))).collect()
    }
}

/// The `cocase` equations: `cocase(c(y..), v_1..v_m) = c(v_1..v_r)`.
pub fn cocase_equations(ds: &DataSystem) -> Vec<Equation> {
    let m = ds.max_arity();
    let vs: Vec<Term> = (1..=m).map(|i| Term::var(&format!("v{i}"))).collect();
    ds.constructors
        .iter()
        .map(|c| {
            let ys = (1..=c.arity).map(|i| Term::var(&format!("y{i}"))).collect();
            let mut pats = vec![Term::Con(c.name.clone(), ys)];
            pats.extend(vs.iter().cloned());
            Equation::new(COCASE, pats, Term::Con(c.name.clone(), vs[..c.arity].to_vec()))
        })
        .collect()
}

fn call_term(ds: &DataSystem, fs: &[CorecFunction], c: &VectorCall, params: &[Term]) -> Term {
    Term::Fun(fs[c.target].name.clone(), c.args.iter().map(|a| a.to_term(ds, params)).collect())
}

/// Emits the equations of a schema.
pub fn compile_schema(s: &Schema, ds: &DataSystem) -> Result<Program, CompileError> {
    let mut defined: Vec<(Name, usize)> = Vec::new();
    let mut eqs = Vec::new();
    let mut needs_cocase = false;
    let check = |c: &Component, defined: &[(Name, usize)]| -> Result<(), CompileError> {
        fn go(c: &Component, defined: &[(Name, usize)]) -> Result<(), CompileError> {
            match c {
                Component::Param(_) => Ok(()),
                Component::Dest(_, x) => go(x, defined),
                Component::Ctor(_, xs) | Component::Delta(xs) => xs.iter().try_for_each(|x| go(x, defined)),
                Component::Prev(f, xs) => {
                    let (_, a) = defined
                        .iter()
                        .find(|(g, _)| g == f)
                        .ok_or_else(|| CompileError::UndefinedComponent(f.clone()))?;
                    if *a != xs.len() {
                        return Err(CompileError::CallArity { function: f.clone(), expected: *a, found: xs.len() });
                    }
                    xs.iter().try_for_each(|x| go(x, defined))
                }
            }
        }
        go(c, defined)
    };
    for st in &s.strata {
        match st {
            Stratum::Explicit { name: f, arity, body } => {
                check(body, &defined)?;
                let params: Vec<Term> = param_names(*arity).into_iter().map(Term::Var).collect();
                eqs.push(Equation::new(f, params.clone(), body.to_term(ds, &params)));
                defined.push((f.clone(), *arity));
            }
            Stratum::Vector(fs) => {
                let check_call = |c: &VectorCall| -> Result<(), CompileError> {
                    let g = fs.get(c.target).ok_or(CompileError::BadTarget { target: c.target, len: fs.len() })?;
                    if g.arity != c.args.len() {
                        return Err(CompileError::CallArity {
                            function: g.name.clone(),
                            expected: g.arity,
                            found: c.args.len(),
                        });
                    }
                    c.args.iter().try_for_each(|a| check(a, &defined))
                };
                for f in fs {
                    let params: Vec<Term> = param_names(f.arity).into_iter().map(Term::Var).collect();
                    let eq = match &f.production {
                        Production::Destructor { ctor, slots } => {
                            let mut terms = Vec::new();
                            for sl in slots {
                                terms.push(match sl {
                                    Slot::Emit(c) => {
                                        check(c, &defined)?;
                                        c.to_term(ds, &params)
                                    }
                                    Slot::Call(c) => {
                                        check_call(c)?;
                                        call_term(ds, fs, c, &params)
                                    }
                                });
                            }
                            let style = if ds.single_non_constant().is_some_and(|c| c.name == *ctor) {
                                EquationStyle::Destructor
                            } else {
                                EquationStyle::Plain
                            };
                            Equation {
                                function: f.name.clone(),
                                patterns: params.clone(),
                                rhs: Term::Con(ctor.clone(), terms),
                                style,
                            }
                        }
                        Production::Cocase { selector, calls } => {
                            needs_cocase = true;
                            check(selector, &defined)?;
                            let mut args = vec![selector.to_term(ds, &params)];
                            for c in calls {
                                check_call(c)?;
                                args.push(call_term(ds, fs, c, &params));
                            }
                            Equation::new(&f.name, params.clone(), Term::Fun(name(COCASE), args))
                        }
                    };
                    eqs.push(eq);
                }
                defined.extend(fs.iter().map(|f| (f.name.clone(), f.arity)));
            }
        }
    }
    if needs_cocase {
        eqs.extend(cocase_equations(ds));
    }
    Ok(Program::new(&s.name, ds, &s.principal, eqs))
}

struct Reject {
    reason: String,
}

fn reject(reason: impl Into<String>) -> Reject {
    Reject { reason: reason.into() }
}

struct Ctx<'a> {
    ds: &'a DataSystem,
    /// Already stratified functions with arities.
    defined: &'a [(Name, usize)],
    /// The vector being recognized.
    group: &'a [Name],
    params: &'a [Name],
}

impl Ctx<'_> {
    fn component(&self, t: &Term) -> Result<Component, Reject> {
        match t {
            Term::Var(v) => self
                .params
                .iter()
                .position(|p| p == v)
                .map(Component::Param)
                .ok_or_else(|| reject(format!("unbound variable `{v}`"))),
            Term::Con(c, xs) => Ok(Component::Ctor(c.clone(), self.components(xs)?)),
            Term::Fun(f, xs) => {
                if self.group.contains(f) {
                    return Err(reject(format!(
                        "recursive occurrence under non-component context: `{t}`"
                    )));
                }
                if let Some(i) = self.ds.destructor_index(f) {
                    if xs.len() != 1 {
                        return Err(reject(format!("destructor `{f}` applied to {} arguments", xs.len())));
                    }
                    return Ok(Component::Dest(i, Box::new(self.component(&xs[0])?)));
                }
                if *f == self.ds.discriminator_name() {
                    return Ok(Component::Delta(self.components(xs)?));
                }
                if self.defined.iter().any(|(g, _)| g == f) {
                    return Ok(Component::Prev(f.clone(), self.components(xs)?));
                }
                Err(reject(format!("`{f}` is not a component")))
            }
        }
    }

    fn components(&self, xs: &[Term]) -> Result<Vec<Component>, Reject> {
        xs.iter().map(|x| self.component(x)).collect()
    }

    /// Recursive-occurrence-aware wrapper: names the enclosing context.
    fn component_in(&self, t: &Term) -> Result<Component, Reject> {
        self.component(t).map_err(|r| {
            if r.reason.starts_with("recursive occurrence") && self.group.iter().any(|g| !is_exact_call(t, g)) {
                reject(format!("{} inside `{t}`", r.reason))
            } else {
                r
            }
        })
    }

    fn call(&self, t: &Term) -> Option<Result<VectorCall, Reject>> {
        let Term::Fun(f, xs) = t else { return None };
        let target = self.group.iter().position(|g| g == f)?;
        Some(self.components(xs).map(|args| VectorCall { target, args }))
    }

    fn slot(&self, t: &Term) -> Result<Slot, Reject> {
        match self.call(t) {
            Some(c) => c.map(Slot::Call),
            None => self.component_in(t).map(Slot::Emit),
        }
    }
}

fn is_exact_call(t: &Term, g: &Name) -> bool {
    matches!(t, Term::Fun(f, _) if f == g)
}

/// Syntactic recognizer for primitive corecursion. Functions are
/// stratified in declaration order: each is either an explicit composition
/// of components over earlier functions, or belongs to a vector of
/// corecurrence equations whose recursive calls occupy exactly the
/// corecurrence slots.
pub fn check_primitive_corecursive(p: &Program, ds: &DataSystem) -> Verdict {
    let fns: Vec<(Name, usize)> = p
        .functions()
        .into_iter()
        .filter(|(f, _)| !ds.is_standard_function(f) && &**f != COCASE)
        .collect();
    let mut defined: Vec<(Name, usize)> = Vec::new();
    let mut strata = Vec::new();
    let pending = |defined: &[(Name, usize)], f: &Name| !defined.iter().any(|(g, _)| g == f);
    for (f, arity) in &fns {
        if !pending(&defined, f) {
            continue;
        }
        fn eq_of<'p>(p: &'p Program, g: &'p Name) -> Result<&'p Equation, (Reject, Option<Equation>)> {
            let eqs: Vec<&Equation> = p.clauses(g).collect();
            if eqs.len() != 1 {
                return Err((
                    reject(format!("`{g}` has {} equations; corecurrence uses exactly one", eqs.len())),
                    None,
                ));
            }
            let e = eqs[0];
            let mut seen = BTreeSet::new();
            if !e.patterns.iter().all(|x| matches!(x, Term::Var(v) if seen.insert(v.clone()))) {
                return Err((
                    reject(format!("`{g}` matches on constructors; corecurrence takes distinct variables")),
                    Some(e.clone()),
                ));
            }
            Ok(e)
        }
        let result = (|| -> Result<Stratum, (Name, Reject, Option<Equation>)> {
            let e = eq_of(p, f).map_err(|(r, e)| (f.clone(), r, e))?;
            // closure over not-yet-stratified functions mentioned
            let mut group: Vec<Name> = vec![f.clone()];
            let mut i = 0;
            while i < group.len() {
                let g = group[i].clone();
                let eg = eq_of(p, &g).map_err(|(r, e)| (g.clone(), r, e))?;
                let mut used = BTreeSet::new();
                eg.rhs.functions(&mut used);
                for h in used {
                    if ds.is_standard_function(&h) || &*h == COCASE || !pending(&defined, &h) {
                        continue;
                    }
                    if !p.defines(&h) {
                        return Err((g.clone(), reject(format!("undefined function `{h}`")), Some(eg.clone())));
                    }
                    if !group.contains(&h) {
                        group.push(h);
                    }
                }
                i += 1;
            }
            let recursive = group.len() > 1 || e.rhs.mentions_function(f);
            if !recursive {
                let params: Vec<Name> = e.patterns.iter().map(|x| x.head_var()).collect();
                let ctx = Ctx { ds, defined: &defined, group: &group, params: &params };
                let body = ctx.component(&e.rhs).map_err(|r| (f.clone(), r, Some(e.clone())))?;
                return Ok(Stratum::Explicit { name: f.clone(), arity: *arity, body });
            }
            let mut vector = Vec::new();
            for g in &group {
                let eg = eq_of(p, g).map_err(|(r, e)| (g.clone(), r, e))?;
                let params: Vec<Name> = eg.patterns.iter().map(|x| x.head_var()).collect();
                let ctx = Ctx { ds, defined: &defined, group: &group, params: &params };
                let fail = |r: Reject| (g.clone(), r, Some(eg.clone()));
                let production = match &eg.rhs {
                    Term::Con(c, xs) => Production::Destructor {
                        ctor: c.clone(),
                        slots: xs.iter().map(|x| ctx.slot(x)).collect::<Result<_, _>>().map_err(fail)?,
                    },
                    Term::Fun(cc, xs) if &**cc == COCASE && !xs.is_empty() => {
                        let selector = ctx.component_in(&xs[0]).map_err(|r| {
                            fail(if r.reason.starts_with("recursive occurrence") {
                                r
                            } else {
                                reject(format!("selector is not a component: {}", r.reason))
                            })
                        })?;
                        if xs.len() - 1 != ds.max_arity() {
                            return Err(fail(reject(format!(
                                "cocase takes {} branches, found {}",
                                ds.max_arity(),
                                xs.len() - 1
                            ))));
                        }
                        let mut calls = Vec::new();
                        for x in &xs[1..] {
                            match ctx.call(x) {
                                Some(c) => calls.push(c.map_err(fail)?),
                                None => {
                                    return Err(fail(reject(format!(
                                        "cocase branch `{x}` is not a call into the vector"
                                    ))))
                                }
                            }
                        }
                        Production::Cocase { selector, calls }
                    }
                    other => {
                        return Err(fail(
                            if group.iter().any(|h| other.mentions_function(h)) {
                                reject(format!(
                                    "recursive occurrence under non-component context: `{other}` is not a corecurrence"
                                ))
                            } else {
                                reject(format!("forward reference: `{g}` is used before it is defined"))
                            },
                        ))
                    }
                };
                vector.push(CorecFunction { name: g.clone(), arity: eg.patterns.len(), production });
            }
            Ok(Stratum::Vector(vector))
        })();
        match result {
            Ok(st) => {
                match &st {
                    Stratum::Explicit { name, arity, .. } => defined.push((name.clone(), *arity)),
                    Stratum::Vector(fs) => defined.extend(fs.iter().map(|g| (g.name.clone(), g.arity))),
                }
                strata.push(st);
            }
            Err((function, r, equation)) => return Verdict::Rejected { function, reason: r.reason, equation },
        }
    }
    Verdict::PrimitiveCorecursive(Schema { name: p.name.clone(), principal: p.principal.clone(), strata })
}

trait HeadVar {
    fn head_var(&self) -> Name;
}

impl HeadVar for Term {
    fn head_var(&self) -> Name {
        match self {
            Term::Var(v) => v.clone(),
            _ => unreachable!("patterns checked to be variables"),
        }
    }
}

/// Renders a verdict as a report listing the matched slots per function.
pub struct VerdictReport<'a> {
    pub verdict: &'a Verdict,
    pub ds: &'a DataSystem,
}

impl fmt::Display for VerdictReport<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds = self.ds;
        match self.verdict {
            Verdict::Rejected { function, reason, equation } => {
                writeln!(f, "verdict: rejected")?;
                writeln!(f, "function: {function}")?;
                writeln!(f, "reason: {reason}")?;
                if let Some(e) = equation {
                    writeln!(f, "equation: {}", e.display(ds))?;
                }
                Ok(())
            }
            Verdict::PrimitiveCorecursive(s) => {
                writeln!(f, "verdict: primitive-corecursive")?;
                for (k, st) in s.strata.iter().enumerate() {
                    match st {
                        Stratum::Explicit { name, arity, body } => {
                            let ps: Vec<Term> = param_names(*arity).into_iter().map(Term::Var).collect();
                            writeln!(f, "stratum {k}: explicit {name} = {}", body.to_term(ds, &ps))?;
                        }
                        Stratum::Vector(fs) => {
                            let names: Vec<&str> = fs.iter().map(|g| &*g.name).collect();
                            writeln!(f, "stratum {k}: vector <{}>", names.join(", "))?;
                            for g in fs {
                                let ps: Vec<Term> = param_names(g.arity).into_iter().map(Term::Var).collect();
                                match &g.production {
                                    Production::Destructor { slots, .. } => {
                                        for (i, sl) in slots.iter().enumerate() {
                                            let d = ds.destructor_name(i + 1);
                                            match sl {
                                                Slot::Emit(c) => {
                                                    writeln!(f, "  {d}({}): emit {}", g.name, c.to_term(ds, &ps))?
                                                }
                                                Slot::Call(c) => {
                                                    writeln!(f, "  {d}({}): call {}", g.name, call_term(ds, fs, c, &ps))?
                                                }
                                            }
                                        }
                                    }
                                    Production::Cocase { selector, calls } => {
                                        writeln!(f, "  {}: selector {}", g.name, selector.to_term(ds, &ps))?;
                                        for (i, c) in calls.iter().enumerate() {
                                            writeln!(f, "  {}: e{} = {}", g.name, i + 1, call_term(ds, fs, c, &ps))?;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}
