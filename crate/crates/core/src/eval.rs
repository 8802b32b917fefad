//! Observation-driven evaluation of program-terms over diagram environments.
//!
//! Terms are reduced lazily (leftmost-outermost) on a per-session graph, so
//! every head-normal form computed in a session is shared. Observation runs
//! breadth-first, which makes an approximation at depth `d` a prefix of the
//! work done for depth `d + 1`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::data_system::{DataSystem, RegularCoterm};
use crate::program::{Equation, Program};
use crate::term::{name, Name, Term, CONS};

pub const DEFAULT_BUDGET: usize = 10_000;

/// A diagram entry: a regular coterm, or `principal(args..)` of a
/// generator program whose arguments are other entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Coterm(RegularCoterm),
    Generator { program: Program, args: Vec<Name> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiagramEnv {
    pub name: Name,
    pub bindings: BTreeMap<Name, Binding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("binding `{0}` clashes with a constructor")]
    ClashesWithConstructor(Name),
    #[error("binding `{0}` clashes with a program function")]
    ClashesWithFunction(Name),
    #[error("binding `{binding}` refers to unknown entry `{missing}`")]
    UnknownEntry { binding: Name, missing: Name },
    #[error("binding `{binding}`: {reason}")]
    Invalid { binding: Name, reason: String },
}

impl DiagramEnv {
    pub fn new(name_: &str) -> Self {
        DiagramEnv { name: name(name_), bindings: BTreeMap::new() }
    }

    pub fn bind(&mut self, id: &str, v: RegularCoterm) -> &mut Self {
        self.bindings.insert(name(id), Binding::Coterm(v));
        self
    }

    pub fn bind_generator(&mut self, id: &str, program: Program, args: &[&str]) -> &mut Self {
        self.bindings.insert(
            name(id),
            Binding::Generator { program, args: args.iter().map(|a| name(a)).collect() },
        );
        self
    }

    pub fn contains(&self, id: &str) -> bool {
        self.bindings.contains_key(id)
    }

    pub fn validate(&self, ds: &DataSystem, program: &Program) -> Result<(), EnvError> {
        for (id, b) in &self.bindings {
            if ds.is_constructor(id) {
                return Err(EnvError::ClashesWithConstructor(id.clone()));
            }
            if program.defines(id) {
                return Err(EnvError::ClashesWithFunction(id.clone()));
            }
            match b {
                Binding::Coterm(v) => v.check_arity(ds).map_err(|e| EnvError::Invalid {
                    binding: id.clone(),
                    reason: e.to_string(),
                })?,
                Binding::Generator { program: g, args } => {
                    if let Some(missing) = args.iter().find(|a| !self.contains(a)) {
                        return Err(EnvError::UnknownEntry { binding: id.clone(), missing: missing.clone() });
                    }
                    let report = g.validate(ds);
                    if !report.is_ok() {
                        return Err(EnvError::Invalid { binding: id.clone(), reason: report.to_string() });
                    }
                    if g.arity != args.len() {
                        return Err(EnvError::Invalid {
                            binding: id.clone(),
                            reason: format!("generator arity {} but {} arguments", g.arity, args.len()),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StallReason {
    NoMatchingEquation,
    BudgetExhausted(usize),
}

impl fmt::Display for StallReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StallReason::NoMatchingEquation => f.write_str("no-match"),
            StallReason::BudgetExhausted(b) => write!(f, "budget@{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stall {
    /// Finite read-back of the irreducible term.
    pub term: Term,
    pub reason: StallReason,
}

/// Finite approximation of the value of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Approximation {
    Node(Name, Vec<Approximation>),
    Cut(usize),
    Stalled { term: Term, reason: StallReason },
}

impl Approximation {
    /// Approximation obtained by observing only to `depth`.
    pub fn restrict(&self, depth: usize) -> Approximation {
        fn go(a: &Approximation, level: usize, depth: usize) -> Approximation {
            match a {
                Approximation::Node(_, ch) if !ch.is_empty() && level >= depth => Approximation::Cut(level),
                Approximation::Node(c, ch) => {
                    Approximation::Node(c.clone(), ch.iter().map(|x| go(x, level + 1, depth)).collect())
                }
                Approximation::Cut(l) => Approximation::Cut((*l).min(depth)),
                other => other.clone(),
            }
        }
        go(self, 0, depth)
    }

    /// The data-term, when no leaf is cut or stalled.
    pub fn as_term(&self) -> Option<Term> {
        match self {
            Approximation::Node(c, ch) => {
                Some(Term::Con(c.clone(), ch.iter().map(Approximation::as_term).collect::<Option<_>>()?))
            }
            _ => None,
        }
    }

    pub fn first_stall(&self) -> Option<(Vec<usize>, &Term, StallReason)> {
        // breadth-first so the shallowest stall is reported
        let mut queue = VecDeque::from([(Vec::new(), self)]);
        while let Some((path, a)) = queue.pop_front() {
            match a {
                Approximation::Stalled { term, reason } => return Some((path, term, *reason)),
                Approximation::Node(_, ch) => {
                    for (i, c) in ch.iter().enumerate() {
                        let mut p = path.clone();
                        p.push(i + 1);
                        queue.push_back((p, c));
                    }
                }
                Approximation::Cut(_) => {}
            }
        }
        None
    }

    pub fn is_stalled(&self) -> bool {
        self.first_stall().is_some()
    }

    /// Element labels along the `cons` spine, stopping at the first non-cons.
    pub fn stream_elements(&self) -> Vec<Name> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Approximation::Node(c, ch) = cur {
            if &**c != CONS || ch.len() != 2 {
                break;
            }
            match &ch[0] {
                Approximation::Node(e, x) if x.is_empty() => out.push(e.clone()),
                _ => break,
            }
            cur = &ch[1];
        }
        out
    }
}

fn write_approx_operand(f: &mut fmt::Formatter<'_>, a: &Approximation) -> fmt::Result {
    match a {
        Approximation::Node(c, ch) if &**c == CONS && ch.len() == 2 => write!(f, "({a})"),
        _ => write!(f, "{a}"),
    }
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approximation::Cut(d) => write!(f, "<cut@{d}>"),
            Approximation::Stalled { reason, .. } => write!(f, "<stall:{reason}>"),
            Approximation::Node(c, ch) if &**c == CONS && ch.len() == 2 => {
                write_approx_operand(f, &ch[0])?;
                f.write_str(":")?;
                write!(f, "{}", ch[1])
            }
            Approximation::Node(c, ch) if ch.is_empty() => f.write_str(c),
            Approximation::Node(c, ch) => {
                write!(f, "{c}(")?;
                for (i, x) in ch.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Outcome of comparing two terms under all deep destructors up to a depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OmegaResult {
    EqualUpToDepth,
    /// Destructor path (1-based indices) where the head constructors differ.
    Differs(Vec<usize>),
    Stalled(Vec<usize>, StallReason),
}

impl OmegaResult {
    pub fn is_equal(&self) -> bool {
        matches!(self, OmegaResult::EqualUpToDepth)
    }
}

impl fmt::Display for OmegaResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = |p: &[usize]| p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        match self {
            OmegaResult::EqualUpToDepth => f.write_str("equal-up-to-depth"),
            OmegaResult::Differs(p) => write!(f, "differs [{}]", path(p)),
            OmegaResult::Stalled(p, r) => write!(f, "stalled [{}] {r}", path(p)),
        }
    }
}

type Ix = usize;

#[derive(Debug, Clone)]
enum Node {
    Con(Name, Vec<Ix>),
    App(Name, Vec<Ix>),
    Var(Name),
    Ind(Ix),
}

/// A single-threaded evaluation session: program, environment and the
/// shared reduction graph.
pub struct Session<'a> {
    env: &'a DiagramEnv,
    equations: Vec<Equation>,
    rules: HashMap<Name, Vec<usize>>,
    arena: Vec<Node>,
    env_roots: HashMap<Name, Ix>,
}

impl<'a> Session<'a> {
    pub fn new(program: &Program, env: &'a DiagramEnv) -> Self {
        let mut equations = program.equations.clone();
        for b in env.bindings.values() {
            if let Binding::Generator { program: g, .. } = b {
                for e in &g.equations {
                    if !equations.contains(e) {
                        equations.push(e.clone());
                    }
                }
            }
        }
        let mut rules: HashMap<Name, Vec<usize>> = HashMap::new();
        for (i, e) in equations.iter().enumerate() {
            rules.entry(e.function.clone()).or_default().push(i);
        }
        Session { env, equations, rules, arena: Vec::new(), env_roots: HashMap::new() }
    }

    fn push(&mut self, n: Node) -> Ix {
        self.arena.push(n);
        self.arena.len() - 1
    }

    fn env_root(&mut self, id: &Name) -> Option<Ix> {
        if let Some(&ix) = self.env_roots.get(id) {
            return Some(ix);
        }
        let binding = self.env.bindings.get(id)?;
        // placeholder first so recursive references resolve
        let root = self.push(Node::Var(id.clone()));
        self.env_roots.insert(id.clone(), root);
        match binding {
            Binding::Coterm(v) => {
                let base = self.arena.len();
                for n in &v.nodes {
                    let children = n.children.iter().map(|&c| base + c).collect();
                    self.arena.push(Node::Con(n.ctor.clone(), children));
                }
                self.arena[root] = Node::Ind(base + v.entry);
            }
            Binding::Generator { program, args } => {
                let args = args.clone();
                let principal = program.principal.clone();
                let mut ixs = Vec::with_capacity(args.len());
                for a in &args {
                    ixs.push(self.env_root(a).expect("validated environment"));
                }
                self.arena[root] = Node::App(principal, ixs);
            }
        }
        Some(root)
    }

    /// Places a term in the session graph.
    pub fn alloc(&mut self, t: &Term) -> Ix {
        match t {
            Term::Var(v) => self.push(Node::Var(v.clone())),
            Term::Con(c, args) => {
                let ixs = args.iter().map(|a| self.alloc(a)).collect();
                self.push(Node::Con(c.clone(), ixs))
            }
            Term::Fun(f, args) => {
                if args.is_empty() && !self.rules.contains_key(f) {
                    if let Some(root) = self.env_root(f) {
                        return root;
                    }
                }
                let ixs = args.iter().map(|a| self.alloc(a)).collect();
                self.push(Node::App(f.clone(), ixs))
            }
        }
    }

    fn alloc_rhs(&mut self, t: &Term, binds: &[(Name, Ix)]) -> Ix {
        match t {
            Term::Var(v) => match binds.iter().rev().find(|(x, _)| x == v) {
                Some(&(_, ix)) => ix,
                None => self.push(Node::Var(v.clone())),
            },
            Term::Con(c, args) => {
                let ixs = args.iter().map(|a| self.alloc_rhs(a, binds)).collect();
                self.push(Node::Con(c.clone(), ixs))
            }
            Term::Fun(f, args) => {
                let ixs = args.iter().map(|a| self.alloc_rhs(a, binds)).collect();
                self.push(Node::App(f.clone(), ixs))
            }
        }
    }

    fn resolve(&self, mut ix: Ix) -> Ix {
        while let Node::Ind(next) = self.arena[ix] {
            ix = next;
        }
        ix
    }

    /// Finite read-back of a graph node, cutting at `limit` levels.
    pub fn read_back(&self, ix: Ix, limit: usize) -> Term {
        let ix = self.resolve(ix);
        if limit == 0 {
            return Term::var("...");
        }
        match &self.arena[ix] {
            Node::Var(v) => Term::Var(v.clone()),
            Node::Con(c, ch) => Term::Con(c.clone(), ch.iter().map(|&x| self.read_back(x, limit - 1)).collect()),
            Node::App(f, ch) => Term::Fun(f.clone(), ch.iter().map(|&x| self.read_back(x, limit - 1)).collect()),
            Node::Ind(_) => unreachable!("resolved"),
        }
    }

    fn stall(&self, ix: Ix, reason: StallReason) -> Stall {
        Stall { term: self.read_back(ix, 6), reason }
    }

    /// Reduces `ix` to a constructor node, spending at most `budget` steps
    /// counted in `steps`.
    fn head_normalize(&mut self, ix: Ix, steps: &mut usize, budget: usize) -> Result<Ix, (Ix, StallReason)> {
        let mut ix = ix;
        loop {
            let cur = self.resolve(ix);
            ix = cur;
            let (f, args) = match &self.arena[cur] {
                Node::Con(..) => return Ok(cur),
                Node::Var(_) => return Err((cur, StallReason::NoMatchingEquation)),
                Node::App(f, args) => (f.clone(), args.clone()),
                Node::Ind(_) => unreachable!("resolved"),
            };
            if *steps >= budget {
                return Err((cur, StallReason::BudgetExhausted(budget)));
            }
            if args.is_empty() && !self.rules.contains_key(&f) {
                if let Some(root) = self.env_root(&f) {
                    if *steps >= budget {
                        return Err((cur, StallReason::BudgetExhausted(budget)));
                    }
                    *steps += 1;
                    self.arena[cur] = Node::Ind(root);
                    continue;
                }
            }
            let candidates = self.rules.get(&f).cloned().unwrap_or_default();
            let mut pending: Option<StallReason> = None;
            let mut chosen = None;
            for r in candidates {
                let patterns = self.equations[r].patterns.clone();
                if patterns.len() != args.len() {
                    continue;
                }
                let mut binds = Vec::new();
                let mut ok = true;
                for (p, &a) in patterns.iter().zip(&args) {
                    match self.match_pattern(p, a, &mut binds, steps, budget) {
                        Ok(true) => {}
                        Ok(false) => {
                            ok = false;
                            break;
                        }
                        Err((_, reason)) => {
                            pending.get_or_insert(reason);
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    chosen = Some((r, binds));
                    break;
                }
            }
            let Some((r, binds)) = chosen else {
                return Err((cur, pending.unwrap_or(StallReason::NoMatchingEquation)));
            };
            if *steps >= budget {
                return Err((cur, StallReason::BudgetExhausted(budget)));
            }
            *steps += 1;
            let rhs = self.equations[r].rhs.clone();
            let new = self.alloc_rhs(&rhs, &binds);
            self.arena[cur] = Node::Ind(new);
        }
    }

    fn match_pattern(
        &mut self,
        p: &Term,
        ix: Ix,
        binds: &mut Vec<(Name, Ix)>,
        steps: &mut usize,
        budget: usize,
    ) -> Result<bool, (Ix, StallReason)> {
        match p {
            Term::Var(v) => {
                binds.push((v.clone(), ix));
                Ok(true)
            }
            Term::Con(c, ps) => {
                let h = self.head_normalize(ix, steps, budget)?;
                let Node::Con(d, children) = &self.arena[h] else { unreachable!("head normal") };
                if d != c || children.len() != ps.len() {
                    return Ok(false);
                }
                let children = children.clone();
                for (q, ch) in ps.iter().zip(children) {
                    if !self.match_pattern(q, ch, binds, steps, budget)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Term::Fun(..) => Ok(false),
        }
    }

    /// Head constructor and children of the head-normal form of `ix`.
    pub fn whnf(&mut self, ix: Ix, budget: usize) -> Result<(Name, Vec<Ix>), Stall> {
        let mut steps = 0;
        let h = self.head_normalize(ix, &mut steps, budget).map_err(|(at, reason)| self.stall(at, reason))?;
        match &self.arena[h] {
            Node::Con(c, ch) => Ok((c.clone(), ch.clone())),
            _ => unreachable!("head normal"),
        }
    }

    /// Breadth-first observation of `ix` to `depth`.
    pub fn observe_ix(&mut self, root: Ix, depth: usize, budget: usize) -> Approximation {
        enum Shape {
            Pending,
            Node(Name, Vec<usize>),
            Leaf(Approximation),
        }
        let mut entries: Vec<(Ix, usize, Shape)> = vec![(root, 0, Shape::Pending)];
        let mut next = 0;
        while next < entries.len() {
            let (ix, level, _) = entries[next];
            let shape = match self.whnf(ix, budget) {
                Err(s) => Shape::Leaf(Approximation::Stalled { term: s.term, reason: s.reason }),
                Ok((c, children)) if children.is_empty() => Shape::Node(c, Vec::new()),
                Ok(_) if level >= depth => Shape::Leaf(Approximation::Cut(level)),
                Ok((c, children)) => {
                    let ids = children
                        .into_iter()
                        .map(|ch| {
                            entries.push((ch, level + 1, Shape::Pending));
                            entries.len() - 1
                        })
                        .collect();
                    Shape::Node(c, ids)
                }
            };
            entries[next].2 = shape;
            next += 1;
        }
        fn build(entries: &[(Ix, usize, Shape)], i: usize) -> Approximation {
            match &entries[i].2 {
                Shape::Node(c, ids) => Approximation::Node(c.clone(), ids.iter().map(|&j| build(entries, j)).collect()),
                Shape::Leaf(a) => a.clone(),
                Shape::Pending => unreachable!("all entries processed"),
            }
        }
        build(&entries, 0)
    }

    pub fn observe(&mut self, t: &Term, depth: usize, budget: usize) -> Approximation {
        let root = self.alloc(t);
        self.observe_ix(root, depth, budget)
    }

    /// Compares head constructors of `Pi(t)` and `Pi(t2)` for all deep
    /// destructors `Pi` of length at most `depth`, breadth-first.
    pub fn derives_omega(&mut self, t: &Term, t2: &Term, depth: usize, budget: usize) -> OmegaResult {
        let a = self.alloc(t);
        let b = self.alloc(t2);
        let mut queue = VecDeque::from([(a, b, Vec::new())]);
        while let Some((a, b, path)) = queue.pop_front() {
            let (ca, cha) = match self.whnf(a, budget) {
                Ok(x) => x,
                Err(s) => return OmegaResult::Stalled(path, s.reason),
            };
            let (cb, chb) = match self.whnf(b, budget) {
                Ok(x) => x,
                Err(s) => return OmegaResult::Stalled(path, s.reason),
            };
            if ca != cb || cha.len() != chb.len() {
                return OmegaResult::Differs(path);
            }
            if path.len() < depth {
                for (i, (x, y)) in cha.into_iter().zip(chb).enumerate() {
                    let mut p = path.clone();
                    p.push(i + 1);
                    queue.push_back((x, y, p));
                }
            }
        }
        OmegaResult::EqualUpToDepth
    }

    /// First `n` element labels of a `cons` stream.
    pub fn stream_prefix(&mut self, t: &Term, n: usize, budget: usize) -> Result<Vec<Name>, Stall> {
        let mut cur = self.alloc(t);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let (c, ch) = self.whnf(cur, budget)?;
            if &*c != CONS || ch.len() != 2 {
                return Err(Stall { term: self.read_back(cur, 4), reason: StallReason::NoMatchingEquation });
            }
            let (e, _) = self.whnf(ch[0], budget)?;
            out.push(e);
            cur = ch[1];
        }
        Ok(out)
    }

    /// Head constructor of `t`.
    pub fn head(&mut self, t: &Term, budget: usize) -> Result<Name, Stall> {
        let ix = self.alloc(t);
        self.whnf(ix, budget).map(|(c, _)| c)
    }
}

/// Observes `t` in a fresh session.
pub fn observe(program: &Program, env: &DiagramEnv, t: &Term, depth: usize, budget: usize) -> Approximation {
    Session::new(program, env).observe(t, depth, budget)
}

/// Observational derivability of `t = t2` up to `depth`, in a fresh session.
pub fn derives_omega(
    program: &Program,
    env: &DiagramEnv,
    t: &Term,
    t2: &Term,
    depth: usize,
    budget: usize,
) -> OmegaResult {
    Session::new(program, env).derives_omega(t, t2, depth, budget)
}

/// `derives_omega` with the default budget.
pub fn bisim_depth(program: &Program, env: &DiagramEnv, t: &Term, t2: &Term, depth: usize) -> OmegaResult {
    derives_omega(program, env, t, t2, depth, DEFAULT_BUDGET)
}
