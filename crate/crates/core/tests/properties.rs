mod common;

use std::collections::BTreeSet;

use common::section_example;
use eqcoind::eval::{observe, Approximation, DiagramEnv, OmegaResult, Session};
use eqcoind::program::{unify, Substitution};
use eqcoind::syntax::{parse_term_str, parse_workspace, Workspace};
use eqcoind::term::{name, SyntacticClass};
use eqcoind::{DataSystem, Membership, Program, RegularCoterm, Term};
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn base_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::constant("0")),
        prop::sample::select(VARS.to_vec()).prop_map(Term::var),
    ];
    leaf.prop_recursive(4, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::con("s", vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::con("c", vec![a, b])),
        ]
    })
    .prop_filter("size", |t| t.size() <= 8)
}

fn data_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::constant("0")), Just(Term::constant("1"))];
    leaf.prop_recursive(3, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::con("s", vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::con("c", vec![a, b])),
        ]
    })
}

/// All ground substitutions of `VARS` into the carrier `{0, s(0)}`.
fn carrier_substitutions() -> Vec<Substitution> {
    let values = [Term::constant("0"), Term::con("s", vec![Term::constant("0")])];
    (0..1 << VARS.len())
        .map(|bits: usize| {
            Substitution(
                VARS.iter().enumerate().map(|(i, v)| (name(v), values[(bits >> i) & 1].clone())).collect(),
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn unifiers_are_most_general(a in base_term(), b in base_term()) {
        let ground = carrier_substitutions();
        match unify(&a, &b) {
            Some(s) => {
                prop_assert_eq!(s.apply(&a), s.apply(&b));
                prop_assert!(s.is_idempotent());
                for theta in ground.iter().filter(|t| t.apply(&a) == t.apply(&b)) {
                    for v in VARS {
                        let x = Term::var(v);
                        prop_assert_eq!(theta.apply(&s.apply(&x)), theta.apply(&x), "{} does not factor", theta);
                    }
                }
            }
            None => {
                for theta in &ground {
                    prop_assert_ne!(theta.apply(&a), theta.apply(&b));
                }
            }
        }
    }

    #[test]
    fn grounding_a_base_term_gives_a_data_term(t in base_term(), xs in prop::collection::vec(data_term(), 3)) {
        let ds = section_example();
        let class = ds.syntactic_class(&t).unwrap();
        prop_assert!(class <= SyntacticClass::Base);
        let s = Substitution(VARS.iter().map(|v| name(v)).zip(xs).collect());
        prop_assert_eq!(ds.syntactic_class(&s.apply(&t)).unwrap(), SyntacticClass::Data);
    }
}

/// Every data-term over the example constructors with at most `max` nodes.
fn all_data_terms(max: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max + 1];
    by_size[1] = ["0", "1", "[]"].iter().map(|c| Term::constant(c)).collect();
    for n in 2..=max {
        let mut out = Vec::new();
        for c in ["s", "t"] {
            out.extend(by_size[n - 1].iter().map(|t| Term::con(c, vec![t.clone()])));
        }
        for k in 1..n - 1 {
            for a in &by_size[k] {
                for b in &by_size[n - 1 - k] {
                    out.push(Term::con("c", vec![a.clone(), b.clone()]));
                }
            }
        }
        by_size[n] = out;
    }
    by_size.concat()
}

/// Membership of a finite term by direct recursion over the declared types.
fn member_oracle(ds: &DataSystem, pred: &str, t: &Term) -> bool {
    let Term::Con(c, args) = t else { return false };
    ds.types_of(pred).iter().any(|ty| {
        ty.constructor == *c
            && ty.args.len() == args.len()
            && ty.args.iter().zip(args).all(|(e, a)| member_oracle(ds, e, a))
    })
}

#[test]
fn inductive_membership_matches_enumeration() {
    let ds = section_example();
    let terms = all_data_terms(6);
    assert!(terms.len() > 1000);
    let mut members = 0;
    for t in &terms {
        let v = RegularCoterm::from_term(t).unwrap();
        for pred in ["B", "N", "L"] {
            let expected = member_oracle(&ds, pred, t);
            members += expected as usize;
            let got = ds.canonical_member(pred, &v, 8);
            assert_eq!(got == Membership::Yes, expected, "{pred}({t})");
            assert_ne!(got, Membership::YesUpToDepth, "{pred}({t})");
        }
    }
    // B: 0, 1; N: 0 .. s^5(0); L: [] (lists need an infinite S head)
    assert_eq!(members, 9);
}

#[test]
fn cyclic_values_are_not_inductive() {
    let ws = parse_workspace(&format!(
        "{}\nenv E : Ex {{ n = rec a. s(a); l = rec a. c(rec b. c(0, b), a); }}",
        system_source()
    ))
    .unwrap();
    let (env, ds) = ws.env("E").unwrap();
    let coterm = |id: &str| match &env.bindings[&name(id)] {
        eqcoind::eval::Binding::Coterm(v) => v.clone(),
        other => panic!("{other:?}"),
    };
    assert_eq!(ds.canonical_member("N", &coterm("n"), 16), Membership::No);
    assert_eq!(ds.canonical_member("J", &coterm("n"), 16), Membership::YesUpToDepth);
    assert_eq!(ds.canonical_member("L", &coterm("l"), 16), Membership::No);
}

fn system_source() -> &'static str {
    "system Ex {
      inductive B; inductive N; coinductive J; coinductive S; inductive L;
      constructor 0 : B; constructor 0 : N; constructor 1 : B; constructor nil : L;
      constructor s : N -> N; constructor s : J -> J; constructor t : J -> J;
      constructor c : N * S -> S; constructor c : S * L -> L;
    }"
}

fn elements() -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(vec!["0", "1", "0", "1", "[]"]), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coinductive_membership_is_monotone_in_depth(prefix in elements(), cycle in elements(), d in 0usize..20) {
        prop_assume!(!cycle.is_empty());
        let ws = eqcoind::library::stock_library();
        let ds = ws.system("Sm").unwrap();
        let v = RegularCoterm::stream(&prefix, &cycle).unwrap();
        let shallow = ds.canonical_member("S", &v, d);
        let deep = ds.canonical_member("S", &v, d + 1);
        if deep != Membership::No {
            prop_assert_ne!(shallow, Membership::No);
        }
        let valid = prefix.iter().chain(&cycle).all(|e| *e != "[]");
        prop_assert_eq!(ds.canonical_member("S", &v, 64) != Membership::No, valid);
    }
}

fn stream_strategy() -> impl Strategy<Value = RegularCoterm> {
    let bit = prop::sample::select(vec!["0", "1"]);
    (prop::collection::vec(bit.clone(), 0..3), prop::collection::vec(bit, 1..3))
        .prop_map(|(p, c)| RegularCoterm::stream(&p, &c).unwrap())
}

fn stream_workspace() -> Workspace {
    eqcoind::library::stock_library()
}

const STREAM_TERMS: [&str; 9] = [
    "a",
    "b",
    "c",
    "flip(a)",
    "flip(flip(a))",
    "merge(a, b)",
    "merge(flip(a), flip(b))",
    "flip(merge(a, b))",
    "merge(b, a)",
];

fn stream_session_parts(a: RegularCoterm, b: RegularCoterm, c: RegularCoterm) -> (Program, DiagramEnv, Vec<Term>) {
    let ws = stream_workspace();
    let (p, ds) = ws.program("morse_thue").unwrap();
    let mut env = DiagramEnv::new("e");
    env.bind("a", a).bind("b", b).bind("c", c);
    let terms = STREAM_TERMS.iter().map(|s| parse_term_str(s, ds, &|x| env.contains(x)).unwrap()).collect();
    (p.clone(), env, terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn omega_equality_is_an_equivalence(a in stream_strategy(), b in stream_strategy(), c in stream_strategy()) {
        let (p, env, terms) = stream_session_parts(a, b, c);
        let mut s = Session::new(&p, &env);
        let n = terms.len();
        let mut eq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                let r = s.derives_omega(&terms[i], &terms[j], 24, 10_000);
                prop_assert!(!matches!(r, OmegaResult::Stalled(..)));
                eq[i][j] = r.is_equal();
            }
        }
        for i in 0..n {
            prop_assert!(eq[i][i]);
            for j in 0..n {
                prop_assert_eq!(eq[i][j], eq[j][i]);
                for k in 0..n {
                    if eq[i][j] && eq[j][k] {
                        prop_assert!(eq[i][k], "{} {} {}", STREAM_TERMS[i], STREAM_TERMS[j], STREAM_TERMS[k]);
                    }
                }
            }
        }
        // flip is an involution and merge commutes with it
        prop_assert!(eq[0][4]);
        prop_assert!(eq[6][7]);
    }

    #[test]
    fn observation_is_deterministic(a in stream_strategy(), b in stream_strategy(), c in stream_strategy(), d in 0usize..32) {
        let (p, env, terms) = stream_session_parts(a, b, c);
        for t in &terms {
            let once = observe(&p, &env, t, d, 10_000);
            let mut s = Session::new(&p, &env);
            s.observe(t, d, 10_000);
            prop_assert_eq!(s.observe(t, d, 10_000), once.clone());
            prop_assert_eq!(observe(&p, &env, t, d, 10_000), once);
        }
    }

    #[test]
    fn deeper_observation_restricts(a in stream_strategy(), b in stream_strategy(), c in stream_strategy(), d in 0usize..32) {
        let (p, env, terms) = stream_session_parts(a, b, c);
        for t in &terms {
            let deep = observe(&p, &env, t, d + 1, 10_000);
            prop_assert_eq!(deep.restrict(d), observe(&p, &env, t, d, 10_000));
        }
    }
}

const NAT_SOURCE: &str = "
system N { inductive N; constructor 0 : N; constructor s : N -> N; }
program add : N {
  add(0, y) = y;
  add(s(x), y) = s(add(x, y));
}
program f : N {
  f(0) = 0;
  f(s(s(x))) = f(s(s(s(x))));
}
";

fn nat(n: usize) -> Term {
    (0..n).fold(Term::constant("0"), |t, _| Term::con("s", vec![t]))
}

/// True when `small` and `big` agree everywhere `small` is not stalled.
fn refines(small: &Approximation, big: &Approximation) -> bool {
    match (small, big) {
        (Approximation::Stalled { .. }, _) => true,
        (Approximation::Node(c, xs), Approximation::Node(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| refines(x, y))
        }
        (a, b) => a == b,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn omega_against_data_terms_is_plain_evaluation(x in 0usize..6, y in 0usize..6, k in 0usize..12, extra in 0usize..3) {
        let ws = parse_workspace(NAT_SOURCE).unwrap();
        let (p, _) = ws.program("add").unwrap();
        let env = DiagramEnv::new("none");
        let t = Term::fun("add", vec![nat(x), nat(y)]);
        let target = nat(k);
        let depth = target.height() + extra;
        let omega = eqcoind::eval::derives_omega(p, &env, &t, &target, depth, 10_000);
        let value = observe(p, &env, &t, depth, 10_000).as_term();
        prop_assert_eq!(omega.is_equal(), value.as_ref() == Some(&target));
        prop_assert_eq!(omega.is_equal(), x + y == k);
    }

    #[test]
    fn more_budget_only_resolves_stalls(b in 1usize..200, extra in 1usize..500, n in 0usize..5, d in 0usize..12) {
        let ws = parse_workspace(NAT_SOURCE).unwrap();
        let stream = stream_workspace();
        let env = DiagramEnv::new("none");
        let (f, _) = ws.program("f").unwrap();
        let (add, _) = ws.program("add").unwrap();
        let (mt, _) = stream.program("morse_thue").unwrap();
        let cases = [
            (f, Term::fun("f", vec![nat(n)])),
            (add, Term::fun("add", vec![nat(n * 7), nat(n)])),
            (mt, Term::fun("mt", Vec::new())),
        ];
        for (p, t) in cases {
            let small = observe(p, &env, &t, d, b);
            let big = observe(p, &env, &t, d, b + extra);
            prop_assert!(refines(&small, &big), "{} at {}: {} vs {}", t, b, small, big);
            if !small.is_stalled() {
                prop_assert_eq!(&small, &big);
            }
        }
    }
}

#[test]
fn fresh_sessions_share_nothing() {
    let ws = stream_workspace();
    let (p, ds) = ws.program("flip").unwrap();
    let mut env = DiagramEnv::new("e");
    env.bind("a", RegularCoterm::stream(&["1"], &["0"]).unwrap());
    let t = parse_term_str("flip(a)", ds, &|x| env.contains(x)).unwrap();
    let results: BTreeSet<String> = (0..4).map(|_| observe(p, &env, &t, 8, 100).to_string()).collect();
    assert_eq!(results.len(), 1);
}
