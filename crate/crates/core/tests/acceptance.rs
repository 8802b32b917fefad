//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{bit_at, proof, random_bits, random_stream, stock_proofs};
use eqcoind::corec::{check_primitive_corecursive, Verdict};
use eqcoind::eval::{observe, DiagramEnv, OmegaResult, Session, StallReason};
use eqcoind::extract::streams::with_library;
use eqcoind::extract::{roundtrip, Stage};
use eqcoind::library::{stock_library, PRODUCTIVE, REJECTED};
use eqcoind::logic::{assert_sp_proof, check_proof, normalize};
use eqcoind::syntax::{parse_term_str, parse_workspace, Workspace};
use eqcoind::{Approximation, RegularCoterm, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xacce_0001;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:?}, limit {limit:?}"))?;
    Ok(e)
}

fn env_ref(id: &str) -> Term {
    Term::fun(id, Vec::new())
}

fn term(ws: &Workspace, system: &str, src: &str, env: &DiagramEnv) -> Term {
    parse_term_str(src, ws.system(system).unwrap(), &|x| env.contains(x)).unwrap()
}

const DIVERGENCE_SOURCE: &str = "
system N { inductive N; constructor 0 : N; constructor s : N -> N; }
program f : N {
  f(0) = 0;
  f(s(s(x))) = f(s(s(s(x))));
}
";

const BISIM_SOURCE: &str = "
program b : Sm {
  b(0 : x, 0 : y) = 0 : b(x, y);
  b(1 : x, 1 : y) = 1 : b(x, y);
}
env A : Sm {
  a = rec r. 0 : 1 : r;
  a2 = 0 : 1 : 0 : 0 : rec r. 0 : 1 : r;
}
";

fn workspace_with(src: &str) -> Workspace {
    let mut ws = stock_library();
    ws.load(src).unwrap();
    ws
}

fn flip_example() -> Outcome {
    let t = Instant::now();
    let ws = workspace_with("env E : Sm { v_a = 0 : v_b; v_b = 1 : v_a; }");
    let (env, _) = ws.env("E").unwrap();
    let (p, _) = ws.program("flip").unwrap();
    let lhs = term(&ws, "Sm", "flip(v_a)", env);
    let r = Session::new(p, env).derives_omega(&lhs, &env_ref("v_b"), 32, 10_000);
    ensure(r == OmegaResult::EqualUpToDepth, || format!("bisim reported {r}"))?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("flip(v_a) ~ v_b to depth 32: {r} in {e:?}"))
}

fn divergence() -> Outcome {
    let t = Instant::now();
    let ws = parse_workspace(DIVERGENCE_SOURCE).unwrap();
    let (p, _) = ws.program("f").unwrap();
    let env = DiagramEnv::new("none");
    let one = observe(p, &env, &term(&ws, "N", "f(s(0))", &env), 4, 10_000);
    let two = observe(p, &env, &term(&ws, "N", "f(s(s(0)))", &env), 4, 10_000);
    let reason = |a: &Approximation| a.first_stall().map(|(_, _, r)| r);
    ensure(reason(&one) == Some(StallReason::NoMatchingEquation), || format!("f(s 0) gave {one}"))?;
    ensure(reason(&two) == Some(StallReason::BudgetExhausted(10_000)), || format!("f(s s 0) gave {two}"))?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("f(s 0) -> {one}, f(s s 0) -> {two} in {e:?}"))
}

fn productivity_verdicts() -> Outcome {
    let ws = stock_library();
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for pd in &ws.programs {
        let ds = ws.system(&pd.system).unwrap();
        match check_primitive_corecursive(&pd.program, ds) {
            Verdict::PrimitiveCorecursive(_) => accepted.push(pd.program.name.to_string()),
            Verdict::Rejected { function, reason, .. } => rejected.push((pd.program.name.to_string(), function, reason)),
        }
    }
    ensure(accepted == PRODUCTIVE, || format!("accepted {accepted:?}"))?;
    let names: Vec<&str> = rejected.iter().map(|(n, _, _)| n.as_str()).collect();
    ensure(names == REJECTED, || format!("rejected {names:?}"))?;
    let (_, function, reason) = &rejected[0];
    ensure(reason.contains("mt()") && reason.contains("merge(mt(), flip(mt()))"), || format!("reason `{reason}`"))?;
    Ok(format!("accepted {} programs; morse_thue rejected in `{function}`: {reason}", accepted.len()))
}

fn productivity_sweep() -> Outcome {
    let t = Instant::now();
    let ws = stock_library();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut runs = 0;
    for n in PRODUCTIVE {
        let (p, _) = ws.program(n).unwrap();
        for k in 0..100 {
            let mut env = DiagramEnv::new("inputs");
            let args: Vec<Term> = (0..p.arity)
                .map(|i| {
                    let id = format!("in{i}");
                    env.bind(&id, random_stream(&mut rng));
                    env_ref(&id)
                })
                .collect();
            let a = observe(p, &env, &Term::Fun(p.principal.clone(), args), 64, 100_000);
            ensure(!a.is_stalled(), || format!("{n} input {k} stalls: {a}"))?;
            ensure(a.stream_elements().len() == 64, || format!("{n} input {k}: short prefix"))?;
            runs += 1;
        }
    }
    let e = within(t, Duration::from_secs(60))?;
    Ok(format!("{runs} observations to depth 64 without a stall in {e:?}"))
}

fn bounding_condition() -> Outcome {
    let ws = stock_library();
    let (p, ds) = ws.program("flip").unwrap();
    let base = r#"(coinduction "S(flip(x))" :pred S :var z :phi "z = z" :eigen w :label u (refl "flip(x) = flip(x)")"#;
    let dcm = "exists z0. exists z1. B(z0) /\\ z1 = z1 /\\ w = z0:z1";
    let mut lines = Vec::new();
    for (what, src) in [
        ("without decomposition premise", format!("{base})")),
        ("with fabricated premise under the eigen label", format!(r#"{base} (assume "{dcm}" :label u))"#)),
        ("with fabricated premise as open assumption", format!(r#"{base} (assume "{dcm}" :label fake))"#)),
    ] {
        match check_proof(ds, p, &proof(&src, ds)) {
            Ok(j) => return Err(format!("{what}: accepted as {j}")),
            Err(v) => lines.push(format!("{what}: {}", v.reason)),
        }
    }
    Ok(lines.join("; "))
}

fn normalization() -> Outcome {
    let mut sizes = Vec::new();
    for (c, ds, d) in stock_proofs() {
        let n = normalize(&d).map_err(|e| format!("{}: {e}", c.name))?;
        check_proof(&ds, &c.compiled, &n).map_err(|v| format!("{}: {v}", c.name))?;
        ensure(n.is_detour_free(), || format!("{}: detour left", c.name))?;
        assert_sp_proof(&n).map_err(|(path, f)| format!("{}: {f} at {path:?}", c.name))?;
        sizes.push(format!("{} {}->{}", c.name, d.size(), n.size()));
    }
    Ok(format!("{} proofs normalized: {}", sizes.len(), sizes.join(", ")))
}

fn round_trip() -> Outcome {
    let t = Instant::now();
    let ws = stock_library();
    let report = roundtrip(&ws, &PRODUCTIVE, 64);
    ensure(report.entries.len() >= 7, || "fewer than 7 entries".into())?;
    for e in &report.entries {
        if let Some(s) = e.failed_stage() {
            return Err(format!("{} fails at {}\n{report}", e.program, s.name()));
        }
    }
    let e = within(t, Duration::from_secs(300))?;
    Ok(format!("{} programs x {} stages pass at depth 64 in {e:?}", report.entries.len(), Stage::ALL.len()))
}

fn split_merge() -> Outcome {
    let ws = stock_library();
    let (p, ds) = ws.program("identity").unwrap();
    let (prog, ops) = with_library(p, ds).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    for k in 0..200 {
        let (sp, sc) = random_bits(&mut rng);
        let mut env = DiagramEnv::new("e");
        env.bind("s", RegularCoterm::stream(&sp, &sc).unwrap()).bind("t", random_stream(&mut rng));
        let (s, t) = (env_ref("s"), env_ref("t"));
        let mut session = Session::new(&prog, &env);
        let m = ops.merge(s.clone(), t.clone());
        let laws = [
            ("merge(even s, odd s) = s", ops.merge(ops.even(s.clone()), ops.odd(s.clone())), s.clone()),
            ("even(merge(s, t)) = s", Term::fun(&ops.even, vec![m.clone()]), s.clone()),
            ("odd(merge(s, t)) = t", Term::fun(&ops.odd, vec![m]), t.clone()),
        ];
        for (law, l, r) in laws {
            let res = session.derives_omega(&l, &r, 64, 100_000);
            ensure(res.is_equal(), || format!("stream {k}: {law}: {res}"))?;
        }
        for i in 0..=3 {
            let head = session.head(&ops.hd(ops.split(s.clone(), i)), 100_000).map_err(|e| e.reason.to_string())?;
            let want = bit_at(&sp, &sc, (1 << i) - 1);
            ensure(*head == *want, || format!("stream {k}: head of split {i} is {head}, expected {want}"))?;
        }
    }
    Ok("200 streams: three laws to depth 64 and split heads for i <= 3".into())
}

fn bisimulation_program() -> Outcome {
    let ws = workspace_with(BISIM_SOURCE);
    let (env, _) = ws.env("A").unwrap();
    let (p, _) = ws.program("b").unwrap();
    let same = term(&ws, "Sm", "b(a, a)", env);
    let a = observe(p, env, &same, 32, 10_000);
    ensure(!a.is_stalled(), || format!("b(a, a) stalls: {a}"))?;
    let r = Session::new(p, env).derives_omega(&same, &env_ref("a"), 32, 10_000);
    ensure(r.is_equal(), || format!("b(a, a) vs a: {r}"))?;
    let differ = observe(p, env, &term(&ws, "Sm", "b(a, a2)", env), 32, 10_000);
    let Some((path, _, reason)) = differ.first_stall() else {
        return Err(format!("b(a, a2) does not stall: {differ}"));
    };
    ensure(path.len() == 3 && reason == StallReason::NoMatchingEquation, || {
        format!("b(a, a2) stalls at {path:?} ({reason})")
    })?;
    ensure(differ.stream_elements().len() == 3, || format!("b(a, a2) = {differ}"))?;
    Ok(format!("b(a, a) equals a to depth 32; b(a, a2) = {differ}"))
}

fn approximation_consistency() -> Outcome {
    let mut ws = workspace_with(BISIM_SOURCE);
    ws.load(DIVERGENCE_SOURCE).unwrap();
    ws.load("env E : Sm { v_a = 0 : v_b; v_b = 1 : v_a; }").unwrap();
    let check = |p: &eqcoind::Program, env: &DiagramEnv, t: &Term| -> Result<(), String> {
        let mut prev = observe(p, env, t, 0, 10_000);
        for d in 0..32 {
            let next = observe(p, env, t, d + 1, 10_000);
            ensure(next.restrict(d) == prev, || format!("{t} at depth {d}: {} vs {prev}", next.restrict(d)))?;
            prev = next;
        }
        Ok(())
    };
    let mut terms = 0;
    let fixed: [(&str, &str, &str, &str); 6] = [
        ("f", "N", "none", "f(s(0))"),
        ("f", "N", "none", "f(s(s(0)))"),
        ("f", "N", "none", "f(0)"),
        ("morse_thue", "Sm", "E", "mt()"),
        ("flip", "Sm", "E", "flip(v_a)"),
        ("b", "Sm", "A", "b(a, a2)"),
    ];
    let none = DiagramEnv::new("none");
    for (prog, sys, env_name, src) in fixed {
        let env = ws.env(env_name).map(|(e, _)| e).unwrap_or(&none);
        let (p, _) = ws.program(prog).unwrap();
        check(p, env, &term(&ws, sys, src, env))?;
        terms += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    for _ in 0..200 {
        let mut env = DiagramEnv::new("inputs");
        env.bind("in0", random_stream(&mut rng)).bind("in1", random_stream(&mut rng));
        for pd in ws.programs.iter().filter(|pd| pd.system.as_ref() == "Sm" && pd.program.arity > 0) {
            let p = &pd.program;
            let args = (0..p.arity).map(|i| env_ref(&format!("in{i}"))).collect();
            check(p, &env, &Term::Fun(p.principal.clone(), args))?;
            terms += 1;
        }
    }
    Ok(format!("{terms} terms consistent for every depth below 32"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("flip example", flip_example),
        ("divergence example", divergence),
        ("productivity verdicts", productivity_verdicts),
        ("productivity soundness sweep", productivity_sweep),
        ("bounding-condition guard", bounding_condition),
        ("normalization of generated proofs", normalization),
        ("definition-proof-program round trip", round_trip),
        ("split/merge algebra", split_merge),
        ("bisimulation program b", bisimulation_program),
        ("approximation consistency", approximation_consistency),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {title}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
