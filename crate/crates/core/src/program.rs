//! Equational programs: equations, unification-based compatibility, the
//! standard destructor/discriminator equations, and program validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::data_system::DataSystem;
use crate::term::{name, Name, SyntacticClass, Term};

/// How an equation is presented. `Destructor` equations have the shape
/// `f(p..) = c(e_1, .., e_r)` for the unique non-constant constructor `c`
/// and print as `pi_i(f(p..)) = e_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EquationStyle {
    #[default]
    Plain,
    Destructor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub function: Name,
    pub patterns: Vec<Term>,
    pub rhs: Term,
    pub style: EquationStyle,
}

impl Equation {
    pub fn new(function: &str, patterns: Vec<Term>, rhs: Term) -> Self {
        Equation { function: name(function), patterns, rhs, style: EquationStyle::Plain }
    }

    pub fn destructor_style(mut self) -> Self {
        self.style = EquationStyle::Destructor;
        self
    }

    /// The definiendum `f(t_1 .. t_k)`.
    pub fn lhs(&self) -> Term {
        Term::Fun(self.function.clone(), self.patterns.clone())
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.patterns.iter().for_each(|p| p.collect_vars(&mut out));
        self.rhs.collect_vars(&mut out);
        out
    }

    pub fn is_left_linear(&self) -> bool {
        let mut occ = Vec::new();
        self.patterns.iter().for_each(|p| p.var_occurrences(&mut occ));
        let set: BTreeSet<_> = occ.iter().collect();
        set.len() == occ.len()
    }

    pub fn rename_apart(&self, suffix: &str) -> Equation {
        let map: BTreeMap<Name, Name> =
            self.vars().into_iter().map(|v| (v.clone(), name(&format!("{v}{suffix}")))).collect();
        Equation {
            function: self.function.clone(),
            patterns: self.patterns.iter().map(|p| p.rename_vars(&map)).collect(),
            rhs: self.rhs.rename_vars(&map),
            style: self.style,
        }
    }

    /// Destructor-form view: `(i, pi_i(f(p..)), e_i)` per constructor slot.
    pub fn destructor_view(&self, ds: &DataSystem) -> Option<Vec<(usize, Term, Term)>> {
        let Term::Con(c, slots) = &self.rhs else { return None };
        let cons = ds.single_non_constant()?;
        if cons.name != *c {
            return None;
        }
        Some(
            slots
                .iter()
                .enumerate()
                .map(|(i, e)| (i + 1, Term::Fun(ds.destructor_name(i + 1), vec![self.lhs()]), e.clone()))
                .collect(),
        )
    }

    pub fn display<'a>(&'a self, ds: &'a DataSystem) -> EquationDisplay<'a> {
        EquationDisplay { eq: self, ds }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs(), self.rhs)
    }
}

pub struct EquationDisplay<'a> {
    eq: &'a Equation,
    ds: &'a DataSystem,
}

impl fmt::Display for EquationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.eq.style, self.eq.destructor_view(self.ds)) {
            (EquationStyle::Destructor, Some(view)) => {
                for (k, (_, lhs, rhs)) in view.iter().enumerate() {
                    if k > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{lhs} = {rhs}")?;
                }
                Ok(())
            }
            _ => write!(f, "{}", self.eq),
        }
    }
}

/// Finite map from variables to terms, kept in solved (idempotent) form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Substitution(pub BTreeMap<Name, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn get(&self, v: &str) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Name, t: Term) {
        self.0.insert(v, t);
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Con(c, a) => Term::Con(c.clone(), a.iter().map(|x| self.apply(x)).collect()),
            Term::Fun(g, a) => Term::Fun(g.clone(), a.iter().map(|x| self.apply(x)).collect()),
        }
    }

    /// `self` followed by `other`: `(self ; other)(t) = other(self(t))`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<Name, Term> =
            self.0.iter().map(|(v, t)| (v.clone(), other.apply(t))).collect();
        for (v, t) in &other.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|v, t| !matches!(t, Term::Var(x) if x == v));
        Substitution(out)
    }

    pub fn is_idempotent(&self) -> bool {
        self.0.values().all(|t| self.apply(t) == *t)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

fn same_head(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Con(c, x), Term::Con(d, y)) | (Term::Fun(c, x), Term::Fun(d, y)) => {
            c == d && x.len() == y.len()
        }
        _ => false,
    }
}

/// Most general unifier with occurs-check.
pub fn unify(t1: &Term, t2: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    let mut work = vec![(t1.clone(), t2.clone())];
    while let Some((a, b)) = work.pop() {
        let a = subst.apply(&a);
        let b = subst.apply(&b);
        match (&a, &b) {
            _ if a == b => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(x) {
                    return None;
                }
                let single = Substitution([(x.clone(), t.clone())].into_iter().collect());
                subst = subst.then(&single);
            }
            _ if same_head(&a, &b) => {
                work.extend(a.args().iter().cloned().zip(b.args().iter().cloned()));
            }
            _ => return None,
        }
    }
    Some(subst)
}

/// One-way matching: `pattern` instantiated by the result equals `t`.
pub fn match_term(pattern: &Term, t: &Term) -> Option<Substitution> {
    fn go(p: &Term, t: &Term, s: &mut Substitution) -> bool {
        match p {
            Term::Var(v) => match s.get(v) {
                Some(bound) => bound == t,
                None => {
                    s.insert(v.clone(), t.clone());
                    true
                }
            },
            _ => same_head(p, t) && p.args().iter().zip(t.args()).all(|(a, b)| go(a, b, s)),
        }
    }
    let mut s = Substitution::new();
    go(pattern, t, &mut s).then_some(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    Incompatible(Substitution),
}

/// Compatible iff the definiendums (renamed apart) do not unify.
pub fn check_compatibility(e1: &Equation, e2: &Equation) -> Compatibility {
    if e1.function != e2.function || e1.patterns.len() != e2.patterns.len() {
        return Compatibility::Compatible;
    }
    let e2 = e2.rename_apart("'");
    match unify(&e1.lhs(), &e2.lhs()) {
        None => Compatibility::Compatible,
        Some(s) => Compatibility::Incompatible(s),
    }
}

fn vars_named(prefix: &str, n: usize) -> Vec<Term> {
    (1..=n).map(|i| Term::var(&format!("{prefix}{i}"))).collect()
}

/// The destructor equations `pi_{i,m}` and discriminator equations `delta_k`.
pub fn standard_functions(ds: &DataSystem) -> Vec<Equation> {
    let m = ds.max_arity();
    let k = ds.constructors.len();
    let mut out = Vec::new();
    for i in 1..=m {
        let pi = ds.destructor_name(i);
        for c in &ds.constructors {
            let xs = vars_named("x", c.arity);
            let arg = Term::Con(c.name.clone(), xs.clone());
            let rhs = if i <= c.arity { xs[i - 1].clone() } else { arg.clone() };
            out.push(Equation { function: pi.clone(), patterns: vec![arg], rhs, style: EquationStyle::Plain });
        }
    }
    let delta = ds.discriminator_name();
    let ys = vars_named("y", k);
    for (i, c) in ds.constructors.iter().enumerate() {
        let mut patterns = vec![Term::Con(c.name.clone(), vars_named("x", c.arity))];
        patterns.extend(ys.iter().cloned());
        out.push(Equation {
            function: delta.clone(),
            patterns,
            rhs: ys[i].clone(),
            style: EquationStyle::Plain,
        });
    }
    out
}

/// Composition of destructors, applied first-to-last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DeepDestructor {
    pub path: Vec<usize>,
}

impl DeepDestructor {
    pub fn new(path: Vec<usize>) -> Self {
        DeepDestructor { path }
    }

    pub fn apply(&self, ds: &DataSystem, t: &Term) -> Term {
        self.path
            .iter()
            .fold(t.clone(), |acc, &i| Term::Fun(ds.destructor_name(i), vec![acc]))
    }
}

/// Returns the deep destructor context for `path`; indices must lie in `1..=m`.
pub fn deep_destructor(ds: &DataSystem, path: &[usize]) -> Option<DeepDestructor> {
    let m = ds.max_arity();
    path.iter().all(|&i| i >= 1 && i <= m).then(|| DeepDestructor::new(path.to_vec()))
}

/// Reference to an equation: the `clause`-th equation (0-based) of `function`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqRef {
    pub function: Name,
    pub clause: usize,
}

impl fmt::Display for EqRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.function, self.clause)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: Name,
    pub principal: Name,
    pub arity: usize,
    /// User equations in declaration order followed by the standard ones.
    pub equations: Vec<Equation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramViolation {
    UnboundVariable { equation: String, var: Name },
    NonLinear { equation: String },
    PatternNotBase { equation: String },
    Vocabulary { equation: String, error: String },
    UnknownFunction { equation: String, function: Name },
    FunctionArity { function: Name, expected: usize, found: usize },
    FunctionIsConstructor(Name),
    Incompatible { first: String, second: String, unifier: Substitution },
    MissingStandard(String),
    Principal { function: Name, reason: String },
    DestructorStyle { equation: String },
}

impl fmt::Display for ProgramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProgramViolation::*;
        match self {
            UnboundVariable { equation, var } => {
                write!(f, "variable `{var}` of the right-hand side is not bound by a pattern in `{equation}`")
            }
            NonLinear { equation } => write!(f, "non-linear patterns in `{equation}`"),
            PatternNotBase { equation } => write!(f, "pattern is not a base-term in `{equation}`"),
            Vocabulary { equation, error } => write!(f, "{error} in `{equation}`"),
            UnknownFunction { equation, function } => {
                write!(f, "unknown function `{function}` in `{equation}`")
            }
            FunctionArity { function, expected, found } => {
                write!(f, "function `{function}` used with {found} arguments, defined with {expected}")
            }
            FunctionIsConstructor(g) => write!(f, "function `{g}` clashes with a constructor"),
            Incompatible { first, second, unifier } => {
                write!(f, "incompatible equations `{first}` and `{second}` (unifier {unifier})")
            }
            MissingStandard(e) => write!(f, "missing standard equation `{e}`"),
            Principal { function, reason } => write!(f, "principal function `{function}`: {reason}"),
            DestructorStyle { equation } => {
                write!(f, "destructor-form equation `{equation}` does not build the single non-constant constructor")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProgramReport {
    pub violations: Vec<ProgramViolation>,
}

impl ProgramReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ProgramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

impl Program {
    /// Builds a program from user equations, appending the standard ones.
    /// The arity is taken from the principal's first equation (0 if none).
    pub fn new(name_: &str, ds: &DataSystem, principal: &str, user: Vec<Equation>) -> Program {
        let arity = user
            .iter()
            .find(|e| &*e.function == principal)
            .map(|e| e.patterns.len())
            .unwrap_or(0);
        let mut equations = user;
        equations.extend(standard_functions(ds));
        Program { name: name(name_), principal: name(principal), arity, equations }
    }

    /// Equations that are not standard destructor/discriminator equations.
    pub fn user_equations<'a>(&'a self, ds: &'a DataSystem) -> impl Iterator<Item = &'a Equation> + 'a {
        self.equations.iter().filter(move |e| !ds.is_standard_function(&e.function))
    }

    /// Defined functions in order of first definition, with arities.
    pub fn functions(&self) -> Vec<(Name, usize)> {
        let mut out: Vec<(Name, usize)> = Vec::new();
        for e in &self.equations {
            if !out.iter().any(|(f, _)| *f == e.function) {
                out.push((e.function.clone(), e.patterns.len()));
            }
        }
        out
    }

    pub fn defines(&self, f: &str) -> bool {
        self.equations.iter().any(|e| &*e.function == f)
    }

    pub fn arity_of(&self, f: &str) -> Option<usize> {
        self.equations.iter().find(|e| &*e.function == f).map(|e| e.patterns.len())
    }

    pub fn clauses<'a>(&'a self, f: &'a str) -> impl Iterator<Item = &'a Equation> + 'a {
        self.equations.iter().filter(move |e| &*e.function == f)
    }

    pub fn equation(&self, r: &EqRef) -> Option<&Equation> {
        self.equations.iter().filter(|e| e.function == r.function).nth(r.clause)
    }

    pub fn eq_ref(&self, index: usize) -> EqRef {
        let e = &self.equations[index];
        let clause = self.equations[..index].iter().filter(|x| x.function == e.function).count();
        EqRef { function: e.function.clone(), clause }
    }

    /// Appends user equations, keeping standard equations last.
    pub fn extend_with(&mut self, ds: &DataSystem, eqs: Vec<Equation>) {
        let split = self.equations.iter().position(|e| ds.is_standard_function(&e.function));
        let at = split.unwrap_or(self.equations.len());
        for (k, e) in eqs.into_iter().enumerate() {
            self.equations.insert(at + k, e);
        }
    }

    pub fn validate(&self, ds: &DataSystem) -> ProgramReport {
        let mut violations = Vec::new();
        let mut arities: BTreeMap<Name, usize> = BTreeMap::new();
        for e in &self.equations {
            match arities.get(&e.function) {
                Some(&a) if a != e.patterns.len() => violations.push(ProgramViolation::FunctionArity {
                    function: e.function.clone(),
                    expected: a,
                    found: e.patterns.len(),
                }),
                Some(_) => {}
                None => {
                    arities.insert(e.function.clone(), e.patterns.len());
                }
            }
        }
        for f in arities.keys() {
            if ds.is_constructor(f) {
                violations.push(ProgramViolation::FunctionIsConstructor(f.clone()));
            }
        }
        for e in &self.equations {
            let shown = e.to_string();
            if e.patterns.iter().any(|p| p.class() == SyntacticClass::Program) {
                violations.push(ProgramViolation::PatternNotBase { equation: shown.clone() });
            }
            if !e.is_left_linear() {
                violations.push(ProgramViolation::NonLinear { equation: shown.clone() });
            }
            let mut bound = BTreeSet::new();
            e.patterns.iter().for_each(|p| p.collect_vars(&mut bound));
            for v in e.rhs.vars() {
                if !bound.contains(&v) {
                    violations.push(ProgramViolation::UnboundVariable { equation: shown.clone(), var: v });
                }
            }
            for t in e.patterns.iter().chain(std::iter::once(&e.rhs)) {
                if let Err(err) = ds.check_term(t) {
                    violations.push(ProgramViolation::Vocabulary { equation: shown.clone(), error: err.to_string() });
                }
            }
            check_calls(&e.rhs, &arities, &shown, &mut violations);
            if e.style == EquationStyle::Destructor && e.destructor_view(ds).is_none() {
                violations.push(ProgramViolation::DestructorStyle { equation: shown.clone() });
            }
        }
        for (i, e1) in self.equations.iter().enumerate() {
            for e2 in &self.equations[i + 1..] {
                if let Compatibility::Incompatible(unifier) = check_compatibility(e1, e2) {
                    violations.push(ProgramViolation::Incompatible {
                        first: e1.to_string(),
                        second: e2.to_string(),
                        unifier,
                    });
                }
            }
        }
        for s in standard_functions(ds) {
            if !self.equations.iter().any(|e| e.function == s.function && e.patterns == s.patterns && e.rhs == s.rhs) {
                violations.push(ProgramViolation::MissingStandard(s.to_string()));
            }
        }
        match arities.get(&self.principal) {
            None => violations.push(ProgramViolation::Principal {
                function: self.principal.clone(),
                reason: "not defined".into(),
            }),
            Some(&a) if a != self.arity => violations.push(ProgramViolation::Principal {
                function: self.principal.clone(),
                reason: format!("declared arity {} but defined with {a}", self.arity),
            }),
            Some(_) => {}
        }
        ProgramReport { violations }
    }
}

fn check_calls(t: &Term, arities: &BTreeMap<Name, usize>, shown: &str, out: &mut Vec<ProgramViolation>) {
    if let Term::Fun(f, args) = t {
        match arities.get(f) {
            None => out.push(ProgramViolation::UnknownFunction { equation: shown.to_string(), function: f.clone() }),
            Some(&a) if a != args.len() => out.push(ProgramViolation::FunctionArity {
                function: f.clone(),
                expected: a,
                found: args.len(),
            }),
            Some(_) => {}
        }
    }
    for a in t.args() {
        check_calls(a, arities, shown, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_system::PredKind;

    fn sm() -> DataSystem {
        let mut ds = DataSystem::new("Sm");
        ds.add_predicate("B", PredKind::Inductive).add_predicate("S", PredKind::Coinductive);
        ds.add_type("0", &[], "B").add_type("1", &[], "B").add_type("cons", &["B", "S"], "S");
        ds.destructor_names = Some(vec![name("hd"), name("tl")]);
        ds
    }

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    fn flip_eqs() -> Vec<Equation> {
        vec![
            Equation::new(
                "flip",
                vec![Term::cons(Term::constant("0"), v("w"))],
                Term::cons(Term::constant("1"), Term::fun("flip", vec![v("w")])),
            ),
            Equation::new(
                "flip",
                vec![Term::cons(Term::constant("1"), v("w"))],
                Term::cons(Term::constant("0"), Term::fun("flip", vec![v("w")])),
            ),
        ]
    }

    #[test]
    fn unify_examples() {
        let s = unify(&v("x"), &Term::cons(v("y"), v("z"))).unwrap();
        assert_eq!(s.get("x"), Some(&Term::cons(v("y"), v("z"))));
        let eqs = flip_eqs();
        let e2 = eqs[1].rename_apart("'");
        assert!(unify(&eqs[0].lhs(), &e2.lhs()).is_none());
        assert!(unify(&v("x"), &Term::con("s", vec![v("x")])).is_none());
    }

    #[test]
    fn compatibility_examples() {
        let eqs = flip_eqs();
        assert_eq!(check_compatibility(&eqs[0], &eqs[1]), Compatibility::Compatible);
        let a = Equation::new("f", vec![v("x")], Term::constant("0"));
        let b = Equation::new("f", vec![Term::con("s", vec![v("y")])], Term::constant("1"));
        match check_compatibility(&a, &b) {
            Compatibility::Incompatible(w) => {
                assert_eq!(w.get("x"), Some(&Term::con("s", vec![v("y'")])));
            }
            c => panic!("expected overlap, got {c:?}"),
        }
        let g = Equation::new("g", vec![v("x")], v("x"));
        let h = Equation::new("h", vec![v("x")], v("x"));
        assert_eq!(check_compatibility(&g, &h), Compatibility::Compatible);
    }

    #[test]
    fn standard_function_counts() {
        let ds = sm();
        let eqs = standard_functions(&ds);
        let proj = eqs.iter().filter(|e| &*e.function != "delta").collect::<Vec<_>>();
        let moves = proj.iter().filter(|e| e.rhs.is_var()).count();
        let fixed = proj.iter().filter(|e| !e.rhs.is_var()).count();
        assert_eq!((moves, fixed), (2, 4));
        assert_eq!(eqs.iter().filter(|e| &*e.function == "delta").count(), 3);
        let mut only0 = DataSystem::new("C");
        only0.add_predicate("B", PredKind::Inductive).add_type("a", &[], "B").add_type("b", &[], "B");
        let eqs = standard_functions(&only0);
        assert!(eqs.iter().all(|e| &*e.function == "delta"));
        assert_eq!(eqs.len(), 2);
    }

    #[test]
    fn standard_functions_pairwise_compatible() {
        let eqs = standard_functions(&sm());
        for (i, a) in eqs.iter().enumerate() {
            for b in &eqs[i + 1..] {
                assert_eq!(check_compatibility(a, b), Compatibility::Compatible, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn validate_examples() {
        let ds = sm();
        let flip = Program::new("flip", &ds, "flip", flip_eqs());
        assert!(flip.validate(&ds).is_ok(), "{}", flip.validate(&ds));

        let overlap = Program::new(
            "o",
            &ds,
            "f",
            vec![
                Equation::new("f", vec![v("x")], Term::constant("0")),
                Equation::new("f", vec![Term::constant("0")], Term::constant("1")),
            ],
        );
        let r = overlap.validate(&ds);
        assert!(r.violations.iter().any(|v| matches!(v, ProgramViolation::Incompatible { unifier, .. }
            if unifier.get("x") == Some(&Term::constant("0")))));

        let unknown = Program::new("u", &ds, "f", vec![Equation::new("f", vec![v("x")], Term::fun("g", vec![v("x")]))]);
        let r = unknown.validate(&ds);
        assert!(r.to_string().contains("unknown function"));

        let mut missing = flip.clone();
        missing.equations.pop();
        assert!(matches!(missing.validate(&ds).violations.as_slice(), [ProgramViolation::MissingStandard(_)]));
    }

    #[test]
    fn destructor_view_and_display() {
        let ds = sm();
        let even = Equation::new(
            "even",
            vec![v("x")],
            Term::cons(
                Term::fun("hd", vec![v("x")]),
                Term::fun("even", vec![Term::fun("tl", vec![Term::fun("tl", vec![v("x")])])]),
            ),
        )
        .destructor_style();
        assert_eq!(
            even.display(&ds).to_string(),
            "hd(even(x)) = hd(x); tl(even(x)) = even(tl(tl(x)))"
        );
    }

    #[test]
    fn deep_destructor_paths() {
        let ds = sm();
        assert!(deep_destructor(&ds, &[3]).is_none());
        let d = deep_destructor(&ds, &[2, 2]).unwrap();
        assert_eq!(d.apply(&ds, &v("t")).to_string(), "tl(tl(t))");
        assert_eq!(deep_destructor(&ds, &[]).unwrap().apply(&ds, &v("t")), v("t"));
    }
}
