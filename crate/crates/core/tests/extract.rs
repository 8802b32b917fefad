mod common;

use std::collections::BTreeMap;

use common::{bit_at, proof, random_bits, stock_proofs};
use eqcoind::corec::check_primitive_corecursive;
use eqcoind::eval::{Approximation, DiagramEnv, OmegaResult, Session};
use eqcoind::extract::roundtrip::ROUNDTRIP_INPUTS;
use eqcoind::extract::streams::{combine, suffix_functions, with_library, LIBRARY_SUFFIX};
use eqcoind::extract::{
    extract, realizer_arguments, roundtrip, EqualityRealizers, RealizabilityJudgment, Realizer, Realizes, Stage,
    StageOutcome, StreamOps, StreamShape,
};
use eqcoind::library::{stock_library, PRODUCTIVE};
use eqcoind::logic::{normalize, parse_formula_str, Derivation};
use eqcoind::{DataSystem, Program, RegularCoterm, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUDGET: usize = 100_000;

fn sm_with(prog: &str) -> (Program, DataSystem) {
    let ws = stock_library();
    let (p, ds) = ws.program(prog).unwrap();
    (p.clone(), ds.clone())
}

fn env_ref(id: &str) -> Term {
    Term::fun(id, Vec::new())
}

fn stream(prefix: &[&str], cycle: &[&str]) -> RegularCoterm {
    RegularCoterm::stream(prefix, cycle).unwrap()
}

/// `v_a = 0:v_b`, `v_b = 1:v_a`.
fn flip_env() -> DiagramEnv {
    let mut env = DiagramEnv::new("E");
    env.bind("v_a", stream(&[], &["0", "1"])).bind("v_b", stream(&[], &["1", "0"]));
    env
}

fn bits(names: Vec<eqcoind::Name>) -> Vec<String> {
    names.iter().map(|n| n.to_string()).collect()
}

#[test]
fn even_split_of_alternating_stream() {
    let (p, ds) = sm_with("identity");
    let (prog, ops) = with_library(&p, &ds).unwrap();
    let mut env = DiagramEnv::new("e");
    env.bind("s", stream(&[], &["0", "1"]));
    let mut session = Session::new(&prog, &env);
    let got = session.stream_prefix(&ops.split(env_ref("s"), 0), 16, BUDGET).unwrap();
    assert_eq!(bits(got), vec!["0"; 16]);
}

#[test]
fn merge_of_constant_streams() {
    let (p, ds) = sm_with("identity");
    let (prog, ops) = with_library(&p, &ds).unwrap();
    let mut env = DiagramEnv::new("e");
    env.bind("z", stream(&[], &["0"])).bind("o", stream(&[], &["1"])).bind("a", stream(&[], &["0", "1"]));
    let m = ops.merge(env_ref("z"), env_ref("o"));
    assert_eq!(Session::new(&prog, &env).derives_omega(&m, &env_ref("a"), 16, BUDGET), OmegaResult::EqualUpToDepth);
    assert_eq!(Session::new(&prog, &env).observe(&m, 0, BUDGET), Approximation::Cut(0));
}

#[test]
fn split_and_merge_laws() {
    let (p, ds) = sm_with("identity");
    let (prog, ops) = with_library(&p, &ds).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..200 {
        let (sp, sc) = random_bits(&mut rng);
        let (tp, tc) = random_bits(&mut rng);
        let mut env = DiagramEnv::new("e");
        env.bind("s", stream(&sp, &sc)).bind("t", stream(&tp, &tc));
        let (s, t) = (env_ref("s"), env_ref("t"));
        let mut session = Session::new(&prog, &env);
        let m = ops.merge(s.clone(), t.clone());
        let laws = [
            (Term::fun(&ops.even, vec![m.clone()]), s.clone()),
            (Term::fun(&ops.odd, vec![m]), t.clone()),
            (ops.merge(ops.even(s.clone()), ops.odd(s.clone())), s.clone()),
        ];
        for (i, (l, r)) in laws.iter().enumerate() {
            assert_eq!(session.derives_omega(l, r, 64, BUDGET), OmegaResult::EqualUpToDepth, "stream {k} law {i}");
        }
        for i in 0..=3 {
            let head = session.head(&ops.hd(ops.split(s.clone(), i)), BUDGET).unwrap();
            assert_eq!(head.to_string(), bit_at(&sp, &sc, (1 << i) - 1), "stream {k} split {i}");
        }
        // positional form: split i takes positions congruent to 2^i - 1 mod 2^(i+1)
        for i in 0..=2 {
            let got = bits(session.stream_prefix(&ops.split(s.clone(), i), 8, BUDGET).unwrap());
            let want: Vec<String> = (0..8).map(|n| bit_at(&sp, &sc, (1 << i) - 1 + n * (1 << (i + 1)))).collect();
            assert_eq!(got, want, "stream {k} split {i}");
        }
    }
}

fn realizer_session(p: &Program, ds: &DataSystem) -> (Program, StreamOps) {
    with_library(p, ds).unwrap()
}

fn realizes(
    prog: &Program,
    ds: &DataSystem,
    ops: &StreamOps,
    env: &DiagramEnv,
    eta: &[(&str, Term)],
    sigma: Term,
    formula: &str,
    depth: usize,
) -> Realizes {
    let mut session = Session::new(prog, env);
    let mut r = Realizer { session: &mut session, ds, ops, equality: EqualityRealizers::Value, budget: BUDGET };
    let j = RealizabilityJudgment {
        eta: eta.iter().map(|(x, t)| (eqcoind::term::name(x), t.clone())).collect(),
        realizer: sigma,
        formula: parse_formula_str(formula, ds).unwrap(),
        depth,
    };
    r.realizes(&j).unwrap()
}

#[test]
fn stream_atom_realized_by_its_value() {
    let (p, ds) = sm_with("flip");
    let (prog, ops) = realizer_session(&p, &ds);
    let mut env = flip_env();
    env.bind("sigma", stream(&[], &["1", "0"]));
    let eta = [("x", env_ref("v_a"))];
    let r = realizes(&prog, &ds, &ops, &env, &eta, env_ref("sigma"), "S(flip(x))", 8);
    assert_eq!(r, Realizes::HoldsUpToDepth);
    let r = realizes(&prog, &ds, &ops, &env, &eta, env_ref("v_a"), "S(flip(x))", 8);
    assert!(matches!(r, Realizes::Fails(_)), "{r}");
}

#[test]
fn disjunction_selects_by_head() {
    let (p, ds) = sm_with("flip");
    let (prog, ops) = realizer_session(&p, &ds);
    let env = flip_env();
    let eta = [("y", env_ref("v_a"))];
    for tail in ["v_a", "v_b"] {
        let sigma = ops.cons(Term::constant("0"), env_ref(tail));
        let whole = realizes(&prog, &ds, &ops, &env, &eta, sigma, "y = y \\/ S(flip(y))", 8);
        let direct = realizes(&prog, &ds, &ops, &env, &eta, env_ref(tail), "y = y", 8);
        assert_eq!(whole.holds(), direct.holds(), "tail {tail}");
        assert_eq!(whole.holds(), tail == "v_a");
    }
}

#[test]
fn existential_witness_from_split() {
    let (p, ds) = sm_with("flip");
    let (prog, ops) = realizer_session(&p, &ds);
    let env = flip_env();
    let eta = [("z", env_ref("v_b"))];
    let phi = "exists y. S(y) /\\ flip(y) = z";
    let tau = env_ref("v_a");
    let good = ops.pair(tau.clone(), ops.pair(tau.clone(), env_ref("v_b")));
    assert_eq!(realizes(&prog, &ds, &ops, &env, &eta, good, phi, 4), Realizes::HoldsUpToDepth);
    let bad = ops.pair(env_ref("v_b"), ops.pair(env_ref("v_b"), env_ref("v_b")));
    assert!(!realizes(&prog, &ds, &ops, &env, &eta, bad, phi, 4).holds());
}

#[test]
fn stream_atom_realizability_is_bisimilarity() {
    let (p, ds) = sm_with("flip");
    let (prog, ops) = realizer_session(&p, &ds);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let mut env = DiagramEnv::new("e");
        env.bind("s", common::random_stream(&mut rng)).bind("x0", common::random_stream(&mut rng));
        let eta = [("x", env_ref("x0"))];
        let r = realizes(&prog, &ds, &ops, &env, &eta, env_ref("s"), "S(flip(x))", 16);
        let t = Term::fun("flip", vec![env_ref("x0")]);
        let omega = Session::new(&prog, &env).derives_omega(&env_ref("s"), &t, 16, BUDGET);
        assert_eq!(r.holds(), omega.is_equal());
    }
}

#[test]
fn non_positive_formula_rejected() {
    let (p, ds) = sm_with("flip");
    let (prog, ops) = realizer_session(&p, &ds);
    let env = flip_env();
    let mut session = Session::new(&prog, &env);
    let mut r = Realizer { session: &mut session, ds: &ds, ops: &ops, equality: EqualityRealizers::Value, budget: BUDGET };
    let j = RealizabilityJudgment {
        eta: BTreeMap::new(),
        realizer: env_ref("v_a"),
        formula: parse_formula_str("S(x) -> S(x)", &ds).unwrap(),
        depth: 4,
    };
    assert!(r.realizes(&j).is_err());
}

#[test]
fn generated_proofs_check_and_normalize() {
    let ws = stock_library();
    for n in ["even", "identity", "flip"] {
        let (c, ds) = common::compiled(&ws, n);
        let d = eqcoind::extract::prove_corec(&c.schema, &c.compiled, &ds).unwrap();
        let j = eqcoind::logic::check_proof(&ds, &c.compiled, &d).unwrap();
        assert_eq!(j.assumptions.len(), 1, "{n}");
        let nd = normalize(&d).unwrap();
        eqcoind::logic::check_proof(&ds, &c.compiled, &nd).unwrap();
        assert_eq!(eqcoind::logic::assert_sp_proof(&nd), Ok(()), "{n}");
    }
}

/// Compares the extraction of `d` with `original` on the given inputs.
fn bisim_extracted(
    d: &Derivation,
    ds: &DataSystem,
    original: &Program,
    env: &DiagramEnv,
    inputs: &BTreeMap<eqcoind::Name, Term>,
    depth: usize,
) -> OmegaResult {
    let ex = extract(d, ds, "g").unwrap();
    assert!(check_primitive_corecursive(&ex.program, ds).is_accepted());
    let extracted = suffix_functions(&ex.program, ds, "@x");
    let prog = combine(ds, original, &[&extracted]);
    let args = realizer_arguments(&ex, d, inputs).unwrap();
    let xs = eqcoind::corec::param_names(original.arity);
    let rhs = Term::Fun(original.principal.clone(), xs.iter().map(|x| inputs[x].clone()).collect());
    Session::new(&prog, env).derives_omega(&Term::Fun(extracted.principal.clone(), args), &rhs, depth, BUDGET)
}

fn normalized_proof(n: &str) -> (common::Compiled, DataSystem, Derivation) {
    let (c, ds, d) = stock_proofs().into_iter().find(|(c, _, _)| c.name == n).unwrap();
    let nd = normalize(&d).unwrap();
    (c, ds, nd)
}

#[test]
fn extracted_even_matches_even() {
    let (c, ds, d) = normalized_proof("even");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..10 {
        let mut env = DiagramEnv::new("e");
        env.bind("in0", common::random_stream(&mut rng));
        let inputs = BTreeMap::from([(eqcoind::term::name("x"), env_ref("in0"))]);
        assert_eq!(bisim_extracted(&d, &ds, &c.program, &env, &inputs, 64), OmegaResult::EqualUpToDepth, "input {k}");
    }
}

#[test]
fn extracted_flip_matches_flip() {
    let (c, ds, d) = normalized_proof("flip");
    let inputs = BTreeMap::from([(eqcoind::term::name("x"), env_ref("v_a"))]);
    assert_eq!(bisim_extracted(&d, &ds, &c.program, &flip_env(), &inputs, 64), OmegaResult::EqualUpToDepth);
}

#[test]
fn assumption_extracts_to_identity() {
    let (id, ds) = sm_with("identity");
    let d = proof(r#"(assume "S(x)" :label hx)"#, &ds);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let mut env = DiagramEnv::new("e");
        env.bind("in0", common::random_stream(&mut rng));
        let inputs = BTreeMap::from([(eqcoind::term::name("x"), env_ref("in0"))]);
        assert_eq!(bisim_extracted(&d, &ds, &id, &env, &inputs, 64), OmegaResult::EqualUpToDepth);
    }
}

#[test]
fn certificate_annotates_nodes() {
    let (_, ds, d) = normalized_proof("flip");
    let ex = extract(&d, &ds, "g").unwrap();
    let paths: Vec<_> = ex.certificate.entries.iter().map(|e| e.path.clone()).collect();
    assert!(paths.windows(2).all(|w| w[0] < w[1]), "sorted and unique");
    for e in &ex.certificate.entries {
        assert_eq!(d.at(&e.path).unwrap().rule.name(), e.rule);
    }
    let text = ex.certificate.to_string();
    assert_eq!(text.lines().count(), paths.len());
    assert!(text.lines().any(|l| l.starts_with("root\t")));
}

#[test]
fn extraction_requires_strong_positivity() {
    let (_, ds) = sm_with("flip");
    let d = proof(r#"(imp-intro "S(x) -> S(x)" :label u (assume "S(x)" :label u))"#, &ds);
    assert!(extract(&d, &ds, "g").is_err());
}

#[test]
fn extraction_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (c, ds, d) in stock_proofs() {
        let d = normalize(&d).unwrap();
        let ex = extract(&d, &ds, "g").unwrap();
        let extracted = suffix_functions(&ex.program, &ds, "@x");
        let ops = StreamOps::new(StreamShape::of(&ds).unwrap(), LIBRARY_SUFFIX);
        let prog = combine(&ds, &c.compiled, &[&extracted, &ops.library_program(&ds)]);
        let xs = eqcoind::corec::param_names(c.program.arity);
        for _ in 0..3 {
            let mut env = DiagramEnv::new("e");
            let mut inputs = BTreeMap::new();
            for (i, x) in xs.iter().enumerate() {
                let id = format!("in{i}");
                env.bind(&id, common::random_stream(&mut rng));
                inputs.insert(x.clone(), env_ref(&id));
            }
            let args = realizer_arguments(&ex, &d, &inputs).unwrap();
            let mut session = Session::new(&prog, &env);
            let mut r =
                Realizer { session: &mut session, ds: &ds, ops: &ops, equality: EqualityRealizers::Value, budget: BUDGET };
            let j = RealizabilityJudgment {
                eta: inputs.clone(),
                realizer: Term::Fun(extracted.principal.clone(), args),
                formula: d.conclusion.clone(),
                depth: 32,
            };
            assert_eq!(r.realizes(&j).unwrap(), Realizes::HoldsUpToDepth, "{}", c.name);
        }
    }
}

#[test]
fn roundtrip_at_depth_zero() {
    let ws = stock_library();
    let report = roundtrip(&ws, &PRODUCTIVE, 0);
    assert!(report.passed(), "{report}");
    assert_eq!(ROUNDTRIP_INPUTS, 10);
}

#[test]
fn roundtrip_stops_at_illegal_corecurrence() {
    let ws = stock_library();
    let report = roundtrip(&ws, &["identity", "morse_thue"], 4);
    assert!(report.entry("identity").unwrap().passed(), "{report}");
    let mt = report.entry("morse_thue").unwrap();
    assert!(matches!(mt.outcome(Stage::Compile), StageOutcome::Fail(_)));
    assert_eq!(mt.failed_stage(), Some(Stage::Compile));
    for s in &Stage::ALL[1..] {
        assert_eq!(*mt.outcome(*s), StageOutcome::Skipped, "{}", s.name());
    }
    assert!(!report.passed());
}

#[test]
fn roundtrip_reports_unknown_programs() {
    let report = roundtrip(&stock_library(), &["nope"], 4);
    assert_eq!(report.entry("nope").unwrap().failed_stage(), Some(Stage::Compile));
}
