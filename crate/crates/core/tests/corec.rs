use eqcoind::corec::{check_primitive_corecursive, compile_schema, Production, Slot, Stratum, Verdict};
use eqcoind::eval::{observe, DiagramEnv};
use eqcoind::library::{stock_library, PRODUCTIVE, REJECTED};
use eqcoind::syntax::parse_workspace;
use eqcoind::{RegularCoterm, Term};

#[test]
fn stock_verdicts() {
    let ws = stock_library();
    for n in PRODUCTIVE {
        let (p, ds) = ws.program(n).unwrap();
        let v = check_primitive_corecursive(p, ds);
        assert!(v.is_accepted(), "{n}: {v:?}");
    }
    for n in REJECTED {
        let (p, ds) = ws.program(n).unwrap();
        match check_primitive_corecursive(p, ds) {
            Verdict::Rejected { function, reason, .. } => {
                assert_eq!(&*function, "mt");
                assert!(reason.starts_with("recursive occurrence under non-component context"), "{reason}");
                assert!(reason.contains("merge(mt(), flip(mt()))"), "{reason}");
            }
            v => panic!("{n} accepted: {v:?}"),
        }
    }
}

#[test]
fn compile_then_recognize_is_identity() {
    let ws = stock_library();
    for n in PRODUCTIVE {
        let (p, ds) = ws.program(n).unwrap();
        let s = check_primitive_corecursive(p, ds).schema().cloned().unwrap();
        let compiled = compile_schema(&s, ds).unwrap();
        assert!(compiled.validate(ds).is_ok(), "{n}");
        let again = check_primitive_corecursive(&compiled, ds).schema().cloned().unwrap();
        assert_eq!(s, again, "{n}");
    }
}

#[test]
fn even_schema_and_compiled_equations() {
    let ws = stock_library();
    let (p, ds) = ws.program("even").unwrap();
    let s = check_primitive_corecursive(p, ds).schema().cloned().unwrap();
    let [Stratum::Vector(fs)] = &s.strata[..] else { panic!("{s:?}") };
    let Production::Destructor { slots, .. } = &fs[0].production else { panic!() };
    assert!(matches!(slots[0], Slot::Emit(_)));
    assert!(matches!(slots[1], Slot::Call(_)));
    let compiled = compile_schema(&s, ds).unwrap();
    let shown: Vec<String> = compiled.user_equations(ds).map(|e| e.display(ds).to_string()).collect();
    assert_eq!(shown, vec!["hd(even(x)) = hd(x); tl(even(x)) = even(tl(tl(x)))"]);
}

#[test]
fn odd_is_explicit_over_even() {
    let ws = stock_library();
    let (p, ds) = ws.program("odd").unwrap();
    let s = check_primitive_corecursive(p, ds).schema().cloned().unwrap();
    assert_eq!(s.strata.len(), 2);
    assert!(matches!(&s.strata[1], Stratum::Explicit { name, .. } if &**name == "odd"));
}

#[test]
fn pattern_matching_flip_is_not_in_schema_form() {
    let src = r#"
system Sm { inductive B; coinductive S; constructor 0 : B; constructor 1 : B;
  constructor cons : B * S -> S; destructors hd, tl; }
program flip { flip(0 : w) = 1 : flip(w); flip(1 : w) = 0 : flip(w); }
"#;
    let ws = parse_workspace(src).unwrap();
    let (p, ds) = ws.program("flip").unwrap();
    assert!(!check_primitive_corecursive(p, ds).is_accepted());
}

#[test]
fn recursion_under_defined_function_flips_verdict() {
    let ws = stock_library();
    let (p, ds) = ws.program("flip").unwrap();
    assert!(check_primitive_corecursive(p, ds).is_accepted());
    let mut bad = p.clone();
    let extra = eqcoind::syntax::parse_workspace(
        "system Sm { inductive B; coinductive S; constructor 0 : B; constructor 1 : B;
         constructor cons : B * S -> S; destructors hd, tl; }
         program g { g(x) = 0 : flip(g(x)); }",
    )
    .unwrap();
    let (gp, gds) = extra.program("g").unwrap();
    bad.extend_with(ds, gp.user_equations(gds).cloned().collect());
    assert!(!check_primitive_corecursive(&bad, ds).is_accepted());
}

#[test]
fn cocase_form_for_general_systems() {
    let src = r#"
system T {
  inductive B;
  coinductive S;
  constructor 0 : B;
  constructor 1 : B;
  constructor leaf : S;
  constructor node : B * S -> S;
}
program stop {
  stop(x) = cocase(delta(x, leaf, node(0, leaf), leaf, leaf), stop(x), stop(x));
}
"#;
    let ws = parse_workspace(src).unwrap();
    let (p, ds) = ws.program("stop").unwrap();
    let s = check_primitive_corecursive(p, ds).schema().cloned().unwrap();
    let compiled = compile_schema(&s, ds).unwrap();
    assert_eq!(check_primitive_corecursive(&compiled, ds).schema(), Some(&s));
    let env = DiagramEnv::new("E");
    let a = observe(&compiled, &env, &Term::fun("stop", vec![Term::constant("0")]), 8, 1000);
    assert_eq!(a.to_string(), "leaf");
    let b = observe(&compiled, &env, &Term::fun("stop", vec![Term::constant("1")]), 8, 1000);
    assert!(!b.is_stalled());
    assert!(b.to_string().starts_with("node(node("));
}

#[test]
fn mutual_pair_is_productive() {
    let ws = stock_library();
    let (p, _) = ws.program("alternate").unwrap();
    let mut env = DiagramEnv::new("E");
    env.bind("a", RegularCoterm::stream(&[], &["0", "1"]).unwrap());
    let t = Term::fun("p", vec![Term::fun("a", vec![])]);
    let obs = observe(p, &env, &t, 32, 100_000);
    assert!(!obs.is_stalled());
    assert_eq!(obs.stream_elements().len(), 32);
}

#[test]
fn merge_of_even_and_odd_restores_stream() {
    let ws = stock_library();
    let (odd, ds) = ws.program("odd").unwrap();
    let (merge, _) = ws.program("merge").unwrap();
    let mut p = odd.clone();
    p.extend_with(ds, merge.user_equations(ds).cloned().collect());
    let mut env = DiagramEnv::new("E");
    env.bind("s", RegularCoterm::stream(&["1", "1", "0"], &["0", "1", "1"]).unwrap());
    let s = Term::fun("s", vec![]);
    let t = Term::fun("merge", vec![Term::fun("even", vec![s.clone()]), Term::fun("odd", vec![s.clone()])]);
    assert!(eqcoind::eval::derives_omega(&p, &env, &t, &s, 16, 10_000).is_equal());
    let zeros = ws.program("zeros").unwrap().0;
    let z = observe(zeros, &env, &Term::fun("zeros", vec![]), 8, 1000);
    assert_eq!(z.stream_elements().iter().map(|e| &**e).collect::<String>(), "00000000");
}
