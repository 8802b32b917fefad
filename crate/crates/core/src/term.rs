//! First-order terms over constructors, variables and program-functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier. Cheap to clone and safe to share across threads.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Name of the binary constructor written infix as `:`.
pub const CONS: &str = "cons";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    /// Constructor application; children count equals the constructor arity.
    Con(Name, Vec<Term>),
    /// Program-function application. Diagram identifiers `v_a` are 0-ary
    /// function applications resolved by the evaluation environment.
    Fun(Name, Vec<Term>),
}

/// Smallest syntactic class containing a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SyntacticClass {
    Data,
    Base,
    Program,
}

impl fmt::Display for SyntacticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntacticClass::Data => "data",
            SyntacticClass::Base => "base",
            SyntacticClass::Program => "program",
        })
    }
}

impl Term {
    pub fn var(n: &str) -> Term {
        Term::Var(name(n))
    }

    pub fn con(c: &str, args: Vec<Term>) -> Term {
        Term::Con(name(c), args)
    }

    pub fn constant(c: &str) -> Term {
        Term::Con(name(c), Vec::new())
    }

    pub fn fun(f: &str, args: Vec<Term>) -> Term {
        Term::Fun(name(f), args)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Con(name(CONS), vec![head, tail])
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::Con(_, a) | Term::Fun(_, a) => a,
        }
    }

    pub fn head_symbol(&self) -> Option<&Name> {
        match self {
            Term::Var(_) => None,
            Term::Con(s, _) | Term::Fun(s, _) => Some(s),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Class ignoring vocabulary checks; see `DataSystem::syntactic_class`
    /// for the checked version.
    pub fn class(&self) -> SyntacticClass {
        match self {
            Term::Var(_) => SyntacticClass::Base,
            Term::Fun(..) => SyntacticClass::Program,
            Term::Con(_, args) => args
                .iter()
                .map(Term::class)
                .max()
                .unwrap_or(SyntacticClass::Data),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.args().iter().map(Term::height).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Con(_, a) | Term::Fun(_, a) => a.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Variables in left-to-right order of occurrence, with repetitions.
    pub fn var_occurrences(&self, out: &mut Vec<Name>) {
        match self {
            Term::Var(v) => out.push(v.clone()),
            Term::Con(_, a) | Term::Fun(_, a) => a.iter().for_each(|t| t.var_occurrences(out)),
        }
    }

    pub fn occurs(&self, v: &str) -> bool {
        match self {
            Term::Var(x) => &**x == v,
            Term::Con(_, a) | Term::Fun(_, a) => a.iter().any(|t| t.occurs(v)),
        }
    }

    pub fn functions(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(_) => {}
            Term::Con(_, a) => a.iter().for_each(|t| t.functions(out)),
            Term::Fun(f, a) => {
                out.insert(f.clone());
                a.iter().for_each(|t| t.functions(out));
            }
        }
    }

    pub fn mentions_function(&self, f: &str) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Con(_, a) => a.iter().any(|t| t.mentions_function(f)),
            Term::Fun(g, a) => &**g == f || a.iter().any(|t| t.mentions_function(f)),
        }
    }

    pub fn subst_var(&self, v: &str, by: &Term) -> Term {
        match self {
            Term::Var(x) if &**x == v => by.clone(),
            Term::Var(_) => self.clone(),
            Term::Con(c, a) => Term::Con(c.clone(), a.iter().map(|t| t.subst_var(v, by)).collect()),
            Term::Fun(f, a) => Term::Fun(f.clone(), a.iter().map(|t| t.subst_var(v, by)).collect()),
        }
    }

    pub fn rename_vars(&self, map: &BTreeMap<Name, Name>) -> Term {
        match self {
            Term::Var(x) => Term::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::Con(c, a) => Term::Con(c.clone(), a.iter().map(|t| t.rename_vars(map)).collect()),
            Term::Fun(f, a) => Term::Fun(f.clone(), a.iter().map(|t| t.rename_vars(map)).collect()),
        }
    }

    /// Subterm at a child-index path.
    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.args().get(*i)?.at(rest),
        }
    }

    /// Copy of `self` with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[usize], by: Term) -> Option<Term> {
        match path.split_first() {
            None => Some(by),
            Some((i, rest)) => {
                let (head, args, is_con) = match self {
                    Term::Var(_) => return None,
                    Term::Con(c, a) => (c, a, true),
                    Term::Fun(f, a) => (f, a, false),
                };
                let mut args = args.clone();
                let child = args.get(*i)?.replace_at(rest, by)?;
                args[*i] = child;
                Some(if is_con {
                    Term::Con(head.clone(), args)
                } else {
                    Term::Fun(head.clone(), args)
                })
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t {
        Term::Con(c, a) if &**c == CONS && a.len() == 2 => write!(f, "({t})"),
        _ => write!(f, "{t}"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Con(c, a) if &**c == CONS && a.len() == 2 => {
                write_operand(f, &a[0])?;
                f.write_str(":")?;
                write!(f, "{}", a[1])
            }
            Term::Con(c, a) if a.is_empty() => f.write_str(c),
            Term::Fun(g, a) if a.is_empty() => write!(f, "{g}()"),
            Term::Con(h, a) | Term::Fun(h, a) => {
                write!(f, "{h}(")?;
                for (i, t) in a.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Returns a name based on `base` that is not in `used`.
pub fn fresh_name(base: &str, used: &BTreeSet<Name>) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "v" } else { stem };
    if !used.contains(base) {
        return name(base);
    }
    (0..)
        .map(|i| format!("{stem}_{i}"))
        .find(|cand| !used.contains(cand.as_str()))
        .map(|s| name(&s))
        .expect("unbounded supply")
}
