//! Constructor vocabularies, data systems, regular coterms and
//! depth-bounded membership in the canonical model.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::term::{name, Name, SyntacticClass, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constructor {
    pub name: Name,
    pub arity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredKind {
    Inductive,
    Coinductive,
}

impl fmt::Display for PredKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredKind::Inductive => "inductive",
            PredKind::Coinductive => "coinductive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DataPredicate {
    pub name: Name,
    pub kind: PredKind,
    /// Position in the ordered predicate list.
    pub index: usize,
}

/// `c : E_1 * ... * E_r -> E_0`, predicates referenced by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstructorType {
    pub constructor: Name,
    pub args: Vec<Name>,
    pub result: Name,
}

impl fmt::Display for ConstructorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.constructor)?;
        if !self.args.is_empty() {
            let args: Vec<&str> = self.args.iter().map(|a| &**a).collect();
            write!(f, "{} -> ", args.join(" * "))?;
        }
        write!(f, "{}", self.result)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSystem {
    pub name: Name,
    pub constructors: Vec<Constructor>,
    pub predicates: Vec<DataPredicate>,
    pub types: Vec<ConstructorType>,
    /// Optional user names for the destructors `pi_1 .. pi_m`.
    pub destructor_names: Option<Vec<Name>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateConstructor(Name),
    DuplicatePredicate(Name),
    PredicateIndex { predicate: Name, index: usize, position: usize },
    UnknownConstructor { ty: String },
    UnknownPredicate { ty: String, predicate: Name },
    ArityMismatch { ty: String, expected: usize, found: usize },
    ArgumentAfterResult { ty: String, argument: Name, result: Name },
    UntypedConstructor(Name),
    DestructorNames { expected: usize, found: usize },
    DestructorClash(Name),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateConstructor(c) => write!(f, "duplicate constructor `{c}`"),
            Violation::DuplicatePredicate(p) => write!(f, "duplicate predicate `{p}`"),
            Violation::PredicateIndex { predicate, index, position } => write!(
                f,
                "predicate `{predicate}` has index {index} but is listed at position {position}"
            ),
            Violation::UnknownConstructor { ty } => write!(f, "unknown constructor in type `{ty}`"),
            Violation::UnknownPredicate { ty, predicate } => {
                write!(f, "unknown predicate `{predicate}` in type `{ty}`")
            }
            Violation::ArityMismatch { ty, expected, found } => write!(
                f,
                "type `{ty}` has {found} argument predicates, constructor arity is {expected}"
            ),
            Violation::ArgumentAfterResult { ty, argument, result } => write!(
                f,
                "argument after result: `{argument}` comes after `{result}` in type `{ty}`"
            ),
            Violation::UntypedConstructor(c) => write!(f, "constructor `{c}` has no type"),
            Violation::DestructorNames { expected, found } => {
                write!(f, "expected {expected} destructor names, found {found}")
            }
            Violation::DestructorClash(d) => {
                write!(f, "destructor name `{d}` clashes with a constructor")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
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

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabularyError {
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(Name),
    #[error("constructor `{name}` expects {expected} arguments, got {found}")]
    Arity { name: Name, expected: usize, found: usize },
}

/// Result of a depth-bounded canonical-model membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Membership {
    No,
    YesUpToDepth,
    Yes,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::No => "no",
            Membership::YesUpToDepth => "yes-up-to-depth",
            Membership::Yes => "yes",
        })
    }
}

impl DataSystem {
    pub fn new(name_: &str) -> Self {
        DataSystem {
            name: name(name_),
            constructors: Vec::new(),
            predicates: Vec::new(),
            types: Vec::new(),
            destructor_names: None,
        }
    }

    pub fn add_predicate(&mut self, p: &str, kind: PredKind) -> &mut Self {
        let index = self.predicates.len();
        self.predicates.push(DataPredicate { name: name(p), kind, index });
        self
    }

    /// Declares a constructor type; the constructor is added to the
    /// vocabulary on first use with the arity implied by `args`.
    pub fn add_type(&mut self, c: &str, args: &[&str], result: &str) -> &mut Self {
        if self.constructor(c).is_none() {
            self.constructors.push(Constructor { name: name(c), arity: args.len() });
        }
        self.types.push(ConstructorType {
            constructor: name(c),
            args: args.iter().map(|a| name(a)).collect(),
            result: name(result),
        });
        self
    }

    pub fn constructor(&self, c: &str) -> Option<&Constructor> {
        self.constructors.iter().find(|k| &*k.name == c)
    }

    pub fn constructor_index(&self, c: &str) -> Option<usize> {
        self.constructors.iter().position(|k| &*k.name == c)
    }

    pub fn predicate(&self, p: &str) -> Option<&DataPredicate> {
        self.predicates.iter().find(|k| &*k.name == p)
    }

    pub fn is_constructor(&self, c: &str) -> bool {
        self.constructor(c).is_some()
    }

    /// Maximal constructor arity `m`.
    pub fn max_arity(&self) -> usize {
        self.constructors.iter().map(|c| c.arity).max().unwrap_or(0)
    }

    /// Name of destructor `pi_{i,m}`, 1-based.
    pub fn destructor_name(&self, i: usize) -> Name {
        match &self.destructor_names {
            Some(ns) if i >= 1 && i <= ns.len() => ns[i - 1].clone(),
            _ => name(&format!("pi{i}")),
        }
    }

    /// 1-based destructor index of a function name, if it names one.
    pub fn destructor_index(&self, f: &str) -> Option<usize> {
        (1..=self.max_arity()).find(|&i| &*self.destructor_name(i) == f)
    }

    pub fn discriminator_name(&self) -> Name {
        name("delta")
    }

    pub fn is_standard_function(&self, f: &str) -> bool {
        self.destructor_index(f).is_some() || *self.discriminator_name() == *f
    }

    /// Constructor types whose result is `pred` (the set `C_n` with types).
    pub fn types_of(&self, pred: &str) -> Vec<&ConstructorType> {
        self.types.iter().filter(|t| &*t.result == pred).collect()
    }

    /// The unique non-constant constructor, when there is exactly one.
    pub fn single_non_constant(&self) -> Option<&Constructor> {
        let mut it = self.constructors.iter().filter(|c| c.arity > 0);
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        for c in &self.constructors {
            if !seen.insert(c.name.clone()) {
                violations.push(Violation::DuplicateConstructor(c.name.clone()));
            }
        }
        let mut seen = HashSet::new();
        for (pos, p) in self.predicates.iter().enumerate() {
            if !seen.insert(p.name.clone()) {
                violations.push(Violation::DuplicatePredicate(p.name.clone()));
            }
            if p.index != pos {
                violations.push(Violation::PredicateIndex {
                    predicate: p.name.clone(),
                    index: p.index,
                    position: pos,
                });
            }
        }
        for ty in &self.types {
            let shown = ty.to_string();
            let Some(c) = self.constructor(&ty.constructor) else {
                violations.push(Violation::UnknownConstructor { ty: shown });
                continue;
            };
            if c.arity != ty.args.len() {
                violations.push(Violation::ArityMismatch {
                    ty: shown.clone(),
                    expected: c.arity,
                    found: ty.args.len(),
                });
            }
            let Some(result) = self.predicate(&ty.result) else {
                violations.push(Violation::UnknownPredicate {
                    ty: shown,
                    predicate: ty.result.clone(),
                });
                continue;
            };
            for a in &ty.args {
                match self.predicate(a) {
                    None => violations.push(Violation::UnknownPredicate {
                        ty: shown.clone(),
                        predicate: a.clone(),
                    }),
                    Some(arg) if arg.index > result.index => {
                        violations.push(Violation::ArgumentAfterResult {
                            ty: shown.clone(),
                            argument: a.clone(),
                            result: result.name.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        for c in &self.constructors {
            if !self.types.iter().any(|t| t.constructor == c.name) {
                violations.push(Violation::UntypedConstructor(c.name.clone()));
            }
        }
        if let Some(ns) = &self.destructor_names {
            if ns.len() != self.max_arity() {
                violations.push(Violation::DestructorNames {
                    expected: self.max_arity(),
                    found: ns.len(),
                });
            }
            for n in ns {
                if self.is_constructor(n) {
                    violations.push(Violation::DestructorClash(n.clone()));
                }
            }
        }
        ValidationReport { violations }
    }

    /// Smallest syntactic class of `t`, checking constructor names and arities.
    pub fn syntactic_class(&self, t: &Term) -> Result<SyntacticClass, VocabularyError> {
        self.check_term(t)?;
        Ok(t.class())
    }

    pub fn check_term(&self, t: &Term) -> Result<(), VocabularyError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Con(c, args) => {
                let k = self
                    .constructor(c)
                    .ok_or_else(|| VocabularyError::UnknownConstructor(c.clone()))?;
                if k.arity != args.len() {
                    return Err(VocabularyError::Arity {
                        name: c.clone(),
                        expected: k.arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Term::Fun(_, args) => args.iter().try_for_each(|a| self.check_term(a)),
        }
    }

    /// Membership of `v` in the canonical interpretation of `pred`.
    ///
    /// Inductive predicates are decided exactly along their own positions: a
    /// cycle that stays within an inductive predicate is never a member.
    /// Coinductive positions are unfolded `depth` layers; reaching the bound
    /// yields `YesUpToDepth`.
    pub fn canonical_member(&self, pred: &str, v: &RegularCoterm, depth: usize) -> Membership {
        let Some(p) = self.predicate(pred) else {
            return Membership::No;
        };
        let mut stack = HashSet::new();
        self.member_at(p.index, v, v.entry, depth, &mut stack)
    }

    fn member_at(
        &self,
        pred: usize,
        v: &RegularCoterm,
        node: usize,
        depth: usize,
        stack: &mut HashSet<(usize, usize)>,
    ) -> Membership {
        let p = &self.predicates[pred];
        let inductive = p.kind == PredKind::Inductive;
        if inductive {
            if !stack.insert((pred, node)) {
                return Membership::No;
            }
        } else if depth == 0 {
            return Membership::YesUpToDepth;
        }
        let child_depth = if inductive { depth } else { depth - 1 };
        let n = &v.nodes[node];
        let mut best = Membership::No;
        for ty in self.types.iter().filter(|t| t.constructor == n.ctor && t.result == p.name) {
            if ty.args.len() != n.children.len() {
                continue;
            }
            let mut this = Membership::Yes;
            for (arg, &child) in ty.args.iter().zip(&n.children) {
                let Some(ap) = self.predicate(arg) else {
                    this = Membership::No;
                    break;
                };
                this = this.min(self.member_at(ap.index, v, child, child_depth, stack));
                if this == Membership::No {
                    break;
                }
            }
            best = best.max(this);
            if best == Membership::Yes {
                break;
            }
        }
        if inductive {
            stack.remove(&(pred, node));
        }
        best
    }
}

/// A node of a regular coterm: constructor label plus child node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CotermNode {
    pub ctor: Name,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CotermError {
    #[error("node {node} refers to missing node {child}")]
    DanglingChild { node: usize, child: usize },
    #[error("entry {0} is not a node")]
    BadEntry(usize),
    #[error("term `{0}` is not a data-term")]
    NotData(String),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
    #[error("a stream cycle must be non-empty")]
    EmptyCycle,
}

/// Finite graph presentation of a possibly infinite constructor tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegularCoterm {
    pub nodes: Vec<CotermNode>,
    pub entry: usize,
}

impl RegularCoterm {
    pub fn new(nodes: Vec<CotermNode>, entry: usize) -> Result<Self, CotermError> {
        if entry >= nodes.len() {
            return Err(CotermError::BadEntry(entry));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let Some(&c) = n.children.iter().find(|&&c| c >= nodes.len()) {
                return Err(CotermError::DanglingChild { node: i, child: c });
            }
        }
        Ok(RegularCoterm { nodes, entry })
    }

    /// Embeds a finite data-term.
    pub fn from_term(t: &Term) -> Result<Self, CotermError> {
        fn go(t: &Term, nodes: &mut Vec<CotermNode>) -> Result<usize, CotermError> {
            let Term::Con(c, args) = t else {
                return Err(CotermError::NotData(t.to_string()));
            };
            let id = nodes.len();
            nodes.push(CotermNode { ctor: c.clone(), children: Vec::new() });
            let mut children = Vec::with_capacity(args.len());
            for a in args {
                children.push(go(a, nodes)?);
            }
            nodes[id].children = children;
            Ok(id)
        }
        let mut nodes = Vec::new();
        go(t, &mut nodes)?;
        Ok(RegularCoterm { nodes, entry: 0 })
    }

    /// The stream `prefix ++ cycle^ω` over 0-ary element constructors and `cons`.
    pub fn stream(prefix: &[&str], cycle: &[&str]) -> Result<Self, CotermError> {
        if cycle.is_empty() {
            return Err(CotermError::EmptyCycle);
        }
        let elems: Vec<&str> = prefix.iter().chain(cycle).copied().collect();
        let n = elems.len();
        let mut nodes = Vec::with_capacity(2 * n);
        // cons cells at 0..n, elements at n..2n
        for i in 0..n {
            let next = if i + 1 < n { i + 1 } else { prefix.len() };
            nodes.push(CotermNode { ctor: name(crate::term::CONS), children: vec![n + i, next] });
        }
        for e in &elems {
            nodes.push(CotermNode { ctor: name(e), children: Vec::new() });
        }
        Ok(RegularCoterm { nodes, entry: 0 })
    }

    pub fn check_arity(&self, ds: &DataSystem) -> Result<(), VocabularyError> {
        for n in &self.nodes {
            let k = ds
                .constructor(&n.ctor)
                .ok_or_else(|| VocabularyError::UnknownConstructor(n.ctor.clone()))?;
            if k.arity != n.children.len() {
                return Err(VocabularyError::Arity {
                    name: n.ctor.clone(),
                    expected: k.arity,
                    found: n.children.len(),
                });
            }
        }
        Ok(())
    }

    fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut todo = vec![self.entry];
        while let Some(n) = todo.pop() {
            if std::mem::replace(&mut seen[n], true) {
                continue;
            }
            order.push(n);
            todo.extend(self.nodes[n].children.iter().rev());
        }
        order
    }

    /// True when no cycle is reachable from the entry.
    pub fn is_acyclic(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn dfs(v: &RegularCoterm, n: usize, state: &mut [u8]) -> bool {
            match state[n] {
                1 => return false,
                2 => return true,
                _ => {}
            }
            state[n] = 1;
            let ok = v.nodes[n].children.iter().all(|&c| dfs(v, c, state));
            state[n] = 2;
            ok
        }
        let mut state = vec![0u8; self.nodes.len()];
        dfs(self, self.entry, &mut state)
    }

    /// The finite term, when acyclic.
    pub fn to_term(&self) -> Option<Term> {
        self.is_acyclic().then(|| self.unfold_node(self.entry, usize::MAX))
    }

    /// Unfolds `depth` constructor layers; deeper positions become the
    /// variable `_`.
    pub fn unfold(&self, depth: usize) -> Term {
        self.unfold_node(self.entry, depth)
    }

    fn unfold_node(&self, n: usize, depth: usize) -> Term {
        if depth == 0 {
            return Term::var("_");
        }
        let node = &self.nodes[n];
        Term::Con(
            node.ctor.clone(),
            node.children.iter().map(|&c| self.unfold_node(c, depth.saturating_sub(1))).collect(),
        )
    }

    /// Child node reached by a 1-based destructor index; a node with fewer
    /// children is its own projection.
    pub fn project(&self, node: usize, i: usize) -> usize {
        self.nodes[node].children.get(i.wrapping_sub(1)).copied().unwrap_or(node)
    }

    /// First `n` elements of a `cons`-stream, or `None` if it is not one.
    pub fn stream_prefix(&self, n: usize) -> Option<Vec<Name>> {
        let mut out = Vec::with_capacity(n);
        let mut cur = self.entry;
        for _ in 0..n {
            let node = &self.nodes[cur];
            if &*node.ctor != crate::term::CONS || node.children.len() != 2 {
                return None;
            }
            out.push(self.nodes[node.children[0]].ctor.clone());
            cur = node.children[1];
        }
        Some(out)
    }

    /// Re-numbers reachable nodes in depth-first pre-order.
    pub fn canonical(&self) -> RegularCoterm {
        let order = self.reachable();
        let index: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let nodes = order
            .iter()
            .map(|&n| CotermNode {
                ctor: self.nodes[n].ctor.clone(),
                children: self.nodes[n].children.iter().map(|c| index[c]).collect(),
            })
            .collect();
        RegularCoterm { nodes, entry: 0 }
    }
}

impl fmt::Display for RegularCoterm {
    /// `rec x. e` binders mark back-edge targets; `:` is `cons`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // find back-edge targets
        fn targets(v: &RegularCoterm, n: usize, stack: &mut Vec<usize>, out: &mut BTreeSet<usize>) {
            if stack.contains(&n) {
                out.insert(n);
                return;
            }
            stack.push(n);
            for &c in &v.nodes[n].children {
                targets(v, c, stack, out);
            }
            stack.pop();
        }
        fn render(
            v: &RegularCoterm,
            n: usize,
            binders: &BTreeSet<usize>,
            stack: &mut Vec<usize>,
            operand: bool,
        ) -> String {
            if stack.contains(&n) {
                return format!("r{n}");
            }
            stack.push(n);
            let node = &v.nodes[n];
            let body = if &*node.ctor == crate::term::CONS && node.children.len() == 2 {
                let h = render(v, node.children[0], binders, stack, true);
                let t = render(v, node.children[1], binders, stack, false);
                let s = format!("{h} : {t}");
                if operand { format!("({s})") } else { s }
            } else if node.children.is_empty() {
                node.ctor.to_string()
            } else {
                let args: Vec<String> = node
                    .children
                    .iter()
                    .map(|&c| render(v, c, binders, stack, false))
                    .collect();
                format!("{}({})", node.ctor, args.join(", "))
            };
            stack.pop();
            if binders.contains(&n) {
                let s = format!("rec r{n}. {body}");
                if operand { format!("({s})") } else { s }
            } else {
                body
            }
        }
        let mut binders = BTreeSet::new();
        targets(self, self.entry, &mut Vec::new(), &mut binders);
        f.write_str(&render(self, self.entry, &binders, &mut Vec::new(), false))
    }
}
