//! The definition-to-proof-to-program pipeline over a set of programs.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corec::{check_primitive_corecursive, compile_schema, param_names, Verdict};
use crate::data_system::{DataSystem, RegularCoterm};
use crate::eval::{DiagramEnv, OmegaResult, Session};
use crate::logic::{assert_sp_proof, check_proof, normalize, Derivation};
use crate::program::Program;
use crate::syntax::Workspace;
use crate::term::{name, Name, Term};

use super::realizer::{extract, realizer_arguments};
use super::streams::{combine, suffix_functions};
use super::prove_corec;

pub const ROUNDTRIP_SEED: u64 = 0x5eed_2000;
pub const ROUNDTRIP_INPUTS: usize = 10;
pub const ROUNDTRIP_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Compile,
    ProveCorec,
    CheckProof,
    Normalize,
    SpScan,
    Extract,
    Bisim,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Compile, Stage::ProveCorec, Stage::CheckProof, Stage::Normalize, Stage::SpScan, Stage::Extract, Stage::Bisim];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Compile => "compile",
            Stage::ProveCorec => "prove-corec",
            Stage::CheckProof => "check-proof",
            Stage::Normalize => "normalize",
            Stage::SpScan => "sp-scan",
            Stage::Extract => "extract",
            Stage::Bisim => "bisim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageOutcome {
    Pass,
    Fail(String),
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripEntry {
    pub program: Name,
    pub stages: Vec<(Stage, StageOutcome)>,
}

impl RoundtripEntry {
    pub fn passed(&self) -> bool {
        self.stages.len() == Stage::ALL.len() && self.stages.iter().all(|(_, o)| *o == StageOutcome::Pass)
    }

    pub fn outcome(&self, s: Stage) -> &StageOutcome {
        self.stages.iter().find(|(t, _)| *t == s).map(|(_, o)| o).unwrap_or(&StageOutcome::Skipped)
    }

    /// First stage that did not pass.
    pub fn failed_stage(&self) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| *self.outcome(*s) != StageOutcome::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    pub depth: usize,
    pub entries: Vec<RoundtripEntry>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(RoundtripEntry::passed)
    }

    pub fn entry(&self, program: &str) -> Option<&RoundtripEntry> {
        self.entries.iter().find(|e| &*e.program == program)
    }
}

impl fmt::Display for RoundtripReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<12}", "program")?;
        for s in Stage::ALL {
            write!(f, " {:<11}", s.name())?;
        }
        writeln!(f)?;
        for e in &self.entries {
            write!(f, "{:<12}", e.program)?;
            for s in Stage::ALL {
                let cell = match e.outcome(s) {
                    StageOutcome::Pass => "pass",
                    StageOutcome::Fail(_) => "FAIL",
                    StageOutcome::Skipped => "-",
                };
                write!(f, " {cell:<11}")?;
            }
            writeln!(f)?;
            for (s, o) in &e.stages {
                if let StageOutcome::Fail(why) = o {
                    writeln!(f, "  {} {}: {why}", e.program, s.name())?;
                }
            }
        }
        Ok(())
    }
}

/// A random eventually periodic boolean stream.
pub fn random_stream(rng: &mut impl Rng, bools: &[&str]) -> RegularCoterm {
    let pick = |rng: &mut dyn rand::RngCore| bools[rng.gen_range(0..bools.len())];
    let prefix: Vec<&str> = (0..rng.gen_range(0..4)).map(|_| pick(rng)).collect();
    let cycle: Vec<&str> = (0..rng.gen_range(1..5)).map(|_| pick(rng)).collect();
    RegularCoterm::stream(&prefix, &cycle).expect("non-empty cycle")
}

/// Runs the pipeline on each named program of `ws`.
pub fn roundtrip(ws: &Workspace, programs: &[&str], depth: usize) -> RoundtripReport {
    let mut rng = ChaCha8Rng::seed_from_u64(ROUNDTRIP_SEED);
    let entries = programs
        .iter()
        .map(|n| match ws.program(n) {
            Some((p, ds)) => run_entry(p, ds, depth, &mut rng),
            None => RoundtripEntry {
                program: name(n),
                stages: vec![(Stage::Compile, StageOutcome::Fail(format!("unknown program `{n}`")))],
            },
        })
        .collect();
    RoundtripReport { depth, entries }
}

fn run_entry(p: &Program, ds: &DataSystem, depth: usize, rng: &mut ChaCha8Rng) -> RoundtripEntry {
    let mut stages = Vec::new();
    let _ = pipeline(p, ds, depth, rng, &mut stages);
    for s in Stage::ALL {
        if !stages.iter().any(|(t, _)| *t == s) {
            stages.push((s, StageOutcome::Skipped));
        }
    }
    RoundtripEntry { program: p.name.clone(), stages }
}

fn pipeline(
    p: &Program,
    ds: &DataSystem,
    depth: usize,
    rng: &mut ChaCha8Rng,
    stages: &mut Vec<(Stage, StageOutcome)>,
) -> Option<()> {
    let mut stage = |s: Stage, r: Result<(), String>| {
        let ok = r.is_ok();
        stages.push((s, r.map_or_else(StageOutcome::Fail, |_| StageOutcome::Pass)));
        ok.then_some(())
    };

    let compiled = match check_primitive_corecursive(p, ds) {
        Verdict::PrimitiveCorecursive(schema) => {
            compile_schema(&schema, ds).map(|c| (schema, c)).map_err(|e| e.to_string())
        }
        Verdict::Rejected { function, reason, .. } => Err(format!("{function}: {reason}")),
    };
    let (schema, compiled) = match compiled {
        Ok(c) => {
            stage(Stage::Compile, Ok(()))?;
            c
        }
        Err(e) => return stage(Stage::Compile, Err(e)),
    };

    let d = prove_corec(&schema, &compiled, ds);
    stage(Stage::ProveCorec, d.as_ref().map(|_| ()).map_err(|e| e.to_string()))?;
    let d = d.ok()?;
    stage(Stage::CheckProof, check_proof(ds, &compiled, &d).map(|_| ()).map_err(|e| e.to_string()))?;

    let n = normalize(&d).map_err(|e| e.to_string());
    let n = n.and_then(|n| match check_proof(ds, &compiled, &n) {
        Ok(_) if n.is_detour_free() => Ok(n),
        Ok(_) => Err("normal form still has a detour".into()),
        Err(e) => Err(format!("normal form does not check: {e}")),
    });
    stage(Stage::Normalize, n.as_ref().map(|_| ()).map_err(Clone::clone))?;
    let n = n.ok()?;
    stage(
        Stage::SpScan,
        assert_sp_proof(&n).map_err(|(path, f)| format!("{f} at {path:?} is not strongly positive")),
    )?;

    let ex = extract(&n, ds, &p.principal).map_err(|e| e.to_string());
    let ex = ex.and_then(|ex| match check_primitive_corecursive(&ex.program, ds) {
        Verdict::PrimitiveCorecursive(_) => Ok(ex),
        Verdict::Rejected { function, reason, .. } => Err(format!("extracted {function} rejected: {reason}")),
    });
    stage(Stage::Extract, ex.as_ref().map(|_| ()).map_err(Clone::clone))?;
    let ex = ex.ok()?;

    stage(Stage::Bisim, bisim(p, ds, &n, &ex, depth, rng))
}

fn bisim(
    p: &Program,
    ds: &DataSystem,
    d: &Derivation,
    ex: &super::Extraction,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    let extracted = suffix_functions(&ex.program, ds, "@x");
    let session_program = combine(ds, p, &[&extracted]);
    let bools: Vec<String> =
        super::StreamShape::of(ds).map_err(|e| e.to_string())?.bools.iter().map(|b| b.to_string()).collect();
    let bools: Vec<&str> = bools.iter().map(String::as_str).collect();
    let xs = param_names(p.arity);
    for k in 0..ROUNDTRIP_INPUTS {
        let mut env = DiagramEnv::new("inputs");
        let mut inputs = BTreeMap::new();
        let mut described = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            let id = format!("in{i}");
            let v = random_stream(rng, &bools);
            described.push(format!("{id} = {}", v.unfold(8)));
            env.bind(&id, v);
            inputs.insert(x.clone(), Term::fun(&id, Vec::new()));
        }
        let args = realizer_arguments(ex, d, &inputs).map_err(|e| e.to_string())?;
        let lhs = Term::Fun(extracted.principal.clone(), args);
        let rhs = Term::Fun(p.principal.clone(), xs.iter().map(|x| inputs[x].clone()).collect());
        match Session::new(&session_program, &env).derives_omega(&lhs, &rhs, depth, ROUNDTRIP_BUDGET) {
            OmegaResult::EqualUpToDepth => {}
            r => return Err(format!("input {k} ({}): {r:?}", described.join(", "))),
        }
    }
    Ok(())
}
