use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use eqcoind::corec::{check_primitive_corecursive, compile_schema, Verdict, VerdictReport};
use eqcoind::eval::{DiagramEnv, Session, DEFAULT_BUDGET};
use eqcoind::extract::{extract, prove_corec, roundtrip, streams::combine};
use eqcoind::library::{PRODUCTIVE, STOCK_SOURCE};
use eqcoind::logic::{
    assert_sp_proof, check_proof, classify_formula, from_sexpr, normalize, parse_formula_str, to_sexpr, Derivation,
    PolarityClass,
};
use eqcoind::syntax::workspace::write_program;
use eqcoind::syntax::{parse_term_str, Workspace};
use eqcoind::{DataSystem, Program, Term};

#[derive(Parser)]
#[command(name = "eqcoind", version, about = "Equational programs over inductive and coinductive data")]
struct Cli {
    /// Source files to load (.cds).
    #[arg(short, long = "file", global = true)]
    files: Vec<PathBuf>,
    /// Do not preload the stock stream library.
    #[arg(long, global = true)]
    no_stock: bool,
    /// Data system used to read terms and formulas.
    #[arg(long, global = true)]
    system: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Tagged,
}

#[derive(Subcommand)]
enum Command {
    /// Validate all systems, programs and environments.
    Check,
    /// Observe a term to a depth.
    Eval {
        term: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        env: Option<String>,
    },
    /// Compare two terms under all observations up to a depth.
    Bisim {
        left: String,
        right: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        env: Option<String>,
    },
    /// Decide whether a program is primitive corecursive.
    Productive { program: String },
    /// Generate and check the coinductive proof of a primitive corecursive program.
    ProveCorec { program: String },
    /// Check a declared proof.
    CheckProof { name: String },
    /// Normalize a declared proof.
    Normalize { name: String },
    /// Classify the polarity of a formula.
    Classify { formula: String },
    /// Extract a program from a declared proof or from the proof of a program.
    Extract {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the definition, proof, extraction pipeline.
    Roundtrip {
        #[arg(long, default_value_t = 16)]
        depth: usize,
        /// Programs to run; defaults to the productive stock programs.
        programs: Vec<String>,
    },
}

/// A command result: readable text, tagged records and the verdict.
struct Report {
    positive: bool,
    text: String,
    records: Vec<(String, String)>,
}

impl Report {
    fn new(positive: bool) -> Report {
        Report { positive, text: String::new(), records: Vec::new() }
    }

    fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.text.push_str(&s.into());
        self.text.push('\n');
        self
    }

    fn record(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.records.push((k.into(), v.to_string().replace(['\n', '\t'], " ")));
        self
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            match cli.format {
                Format::Human => print!("{}", r.text),
                Format::Tagged => {
                    for (k, v) in &r.records {
                        println!("{k}\t{v}");
                    }
                    println!("verdict\t{}", if r.positive { "positive" } else { "negative" });
                }
            }
            if r.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match cli.format {
                Format::Human => eprintln!("error: {e}"),
                Format::Tagged => println!("error\t{}", e.replace(['\n', '\t'], " ")),
            }
            ExitCode::from(2)
        }
    }
}

fn load(cli: &Cli) -> Result<Workspace, String> {
    let mut ws = Workspace::default();
    if !cli.no_stock {
        ws.load(STOCK_SOURCE).map_err(|e| format!("stock library: {e}"))?;
    }
    for f in &cli.files {
        let src = std::fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
        ws.load(&src).map_err(|e| format!("{}:{e}", f.display()))?;
    }
    Ok(ws)
}

fn system<'w>(ws: &'w Workspace, cli: &Cli, env: Option<&str>) -> Result<&'w DataSystem, String> {
    if let Some(s) = &cli.system {
        return ws.system(s).ok_or_else(|| format!("unknown system `{s}`"));
    }
    if let Some(e) = env {
        return ws.env(e).map(|(_, ds)| ds).ok_or_else(|| format!("unknown env `{e}`"));
    }
    match ws.systems.as_slice() {
        [ds] => Ok(ds),
        [] => Err("no data system loaded".into()),
        _ => Err("several data systems loaded; choose one with --system".into()),
    }
}

/// All programs over `ds` as one program; earlier definitions win.
fn session_program(ws: &Workspace, ds: &DataSystem) -> Program {
    let progs: Vec<&Program> = ws.programs.iter().filter(|p| p.system == ds.name).map(|p| &p.program).collect();
    match progs.split_first() {
        Some((first, rest)) => combine(ds, first, rest),
        None => Program::new("session", ds, "session", Vec::new()),
    }
}

fn term(src: &str, ds: &DataSystem, env: &DiagramEnv) -> Result<Term, String> {
    parse_term_str(src, ds, &|s| env.contains(s)).map_err(|e| format!("term `{src}`: {e}"))
}

fn env_for(ws: &Workspace, env: Option<&str>) -> Result<DiagramEnv, String> {
    match env {
        Some(e) => ws.env(e).map(|(env, _)| env.clone()).ok_or_else(|| format!("unknown env `{e}`")),
        None => Ok(DiagramEnv::new("empty")),
    }
}

fn program<'w>(ws: &'w Workspace, n: &str) -> Result<(&'w Program, &'w DataSystem), String> {
    ws.program(n).ok_or_else(|| format!("unknown program `{n}`"))
}

/// A declared proof with its system and program.
fn proof<'w>(ws: &'w Workspace, cli: &Cli, n: &str) -> Result<(Derivation, &'w DataSystem, Program), String> {
    let decl = ws.proof(n).ok_or_else(|| format!("unknown proof `{n}`"))?;
    let (ds, p) = match &decl.program {
        Some(pn) => {
            let (p, ds) = program(ws, pn)?;
            (ds, p.clone())
        }
        None => {
            let ds = system(ws, cli, None)?;
            (ds, session_program(ws, ds))
        }
    };
    let d = from_sexpr(&decl.body, ds).map_err(|e| format!("proof `{n}`: {e}"))?;
    Ok((d, ds, p))
}

fn compile(p: &Program, ds: &DataSystem) -> Result<(eqcoind::corec::Schema, Program), String> {
    match check_primitive_corecursive(p, ds) {
        Verdict::PrimitiveCorecursive(s) => {
            let c = compile_schema(&s, ds).map_err(|e| e.to_string())?;
            Ok((s, c))
        }
        Verdict::Rejected { function, reason, .. } => Err(format!("{function}: {reason}")),
    }
}

fn run(cli: &Cli) -> Result<Report, String> {
    let ws = load(cli)?;
    match &cli.command {
        Command::Check => {
            let mut ok = true;
            let mut r = Report::new(true);
            for ds in &ws.systems {
                let v = ds.validate();
                ok &= v.is_ok();
                r.line(format!("system {}: {v}", ds.name)).record(&format!("system.{}", ds.name), &v);
            }
            for d in &ws.programs {
                let ds = ws.system(&d.system).ok_or("dangling system")?;
                let v = d.program.validate(ds);
                ok &= v.is_ok();
                r.line(format!("program {}: {v}", d.program.name)).record(&format!("program.{}", d.program.name), &v);
            }
            for e in &ws.envs {
                let ds = ws.system(&e.system).ok_or("dangling system")?;
                let v = e.env.validate(ds, &session_program(&ws, ds)).map_or_else(|e| e.to_string(), |_| "ok".into());
                ok &= v == "ok";
                r.line(format!("env {}: {v}", e.env.name)).record(&format!("env.{}", e.env.name), &v);
            }
            r.positive = ok;
            Ok(r)
        }
        Command::Eval { term: src, depth, budget, env } => {
            let ds = system(&ws, cli, env.as_deref())?;
            let env = env_for(&ws, env.as_deref())?;
            let t = term(src, ds, &env)?;
            let p = session_program(&ws, ds);
            let a = Session::new(&p, &env).observe(&t, *depth, *budget);
            let mut r = Report::new(!a.is_stalled());
            r.line(a.to_string()).record("approximation", &a);
            if let Some((path, at, reason)) = a.first_stall() {
                r.line(format!("stalled at {path:?} on {at}: {reason}")).record("stall", format!("{path:?} {at} {reason}"));
            }
            Ok(r)
        }
        Command::Bisim { left, right, depth, budget, env } => {
            let ds = system(&ws, cli, env.as_deref())?;
            let env = env_for(&ws, env.as_deref())?;
            let (a, b) = (term(left, ds, &env)?, term(right, ds, &env)?);
            let p = session_program(&ws, ds);
            let o = Session::new(&p, &env).derives_omega(&a, &b, *depth, *budget);
            let mut r = Report::new(o.is_equal());
            r.line(o.to_string()).record("bisim", &o);
            Ok(r)
        }
        Command::Productive { program: n } => {
            let (p, ds) = program(&ws, n)?;
            let v = check_primitive_corecursive(p, ds);
            let mut r = Report::new(v.is_accepted());
            r.text = VerdictReport { verdict: &v, ds }.to_string();
            match &v {
                Verdict::PrimitiveCorecursive(_) => r.record("productive", "primitive-corecursive"),
                Verdict::Rejected { function, reason, .. } => {
                    r.record("productive", "rejected").record("function", function).record("reason", reason)
                }
            };
            Ok(r)
        }
        Command::ProveCorec { program: n } => {
            let (p, ds) = program(&ws, n)?;
            let (schema, compiled) = compile(p, ds)?;
            let d = prove_corec(&schema, &compiled, ds).map_err(|e| e.to_string())?;
            let mut r = Report::new(true);
            match check_proof(ds, &compiled, &d) {
                Ok(j) => {
                    r.line(format!("judgment: {j}")).record("judgment", &j);
                }
                Err(v) => {
                    r.positive = false;
                    r.line(format!("check failed: {v}")).record("violation", &v);
                }
            }
            r.line(format!("size: {}", d.size())).record("size", d.size());
            r.line(to_sexpr(&d).pretty(0));
            Ok(r)
        }
        Command::CheckProof { name } => {
            let (d, ds, p) = proof(&ws, cli, name)?;
            Ok(match check_proof(ds, &p, &d) {
                Ok(j) => {
                    let mut r = Report::new(true);
                    r.line(format!("ok: {j}")).record("judgment", &j);
                    r
                }
                Err(v) => {
                    let mut r = Report::new(false);
                    r.line(format!("rejected {v}")).record("violation", &v);
                    r
                }
            })
        }
        Command::Normalize { name } => {
            let (d, ds, p) = proof(&ws, cli, name)?;
            check_proof(ds, &p, &d).map_err(|v| format!("proof does not check: {v}"))?;
            let n = normalize(&d).map_err(|e| e.to_string())?;
            let checks = check_proof(ds, &p, &n).is_ok();
            let sp = assert_sp_proof(&n);
            let mut r = Report::new(checks && n.is_detour_free());
            r.line(format!("size: {} -> {}", d.size(), n.size())).record("size", format!("{} {}", d.size(), n.size()));
            r.line(format!("detour-free: {}", n.is_detour_free())).record("detour-free", n.is_detour_free());
            match &sp {
                Ok(()) => r.line("strongly-positive: yes").record("strongly-positive", "yes"),
                Err((path, f)) => {
                    r.line(format!("strongly-positive: no ({f} at {path:?})")).record("strongly-positive", "no")
                }
            };
            r.line(to_sexpr(&n).pretty(0));
            Ok(r)
        }
        Command::Classify { formula } => {
            let ds = system(&ws, cli, None)?;
            let f = parse_formula_str(formula, ds).map_err(|e| format!("formula: {e}"))?;
            let c = classify_formula(&f);
            let mut r = Report::new(c == PolarityClass::StronglyPositive);
            r.line(c.to_string()).record("class", c);
            Ok(r)
        }
        Command::Extract { name, out } => {
            let (d, ds, principal) = match ws.proof(name) {
                Some(_) => {
                    let (d, ds, p) = proof(&ws, cli, name)?;
                    check_proof(ds, &p, &d).map_err(|v| format!("proof does not check: {v}"))?;
                    (d, ds, name.clone())
                }
                None => {
                    let (p, ds) = program(&ws, name).map_err(|_| format!("unknown proof or program `{name}`"))?;
                    let (schema, compiled) = compile(p, ds)?;
                    (prove_corec(&schema, &compiled, ds).map_err(|e| e.to_string())?, ds, p.principal.to_string())
                }
            };
            let n = normalize(&d).map_err(|e| e.to_string())?;
            assert_sp_proof(&n).map_err(|(path, f)| format!("{f} at {path:?} is not strongly positive"))?;
            let ex = extract(&n, ds, &principal).map_err(|e| e.to_string())?;
            let accepted = check_primitive_corecursive(&ex.program, ds).is_accepted();
            let mut src = String::new();
            write_program(&mut src, &ex.program, ds).map_err(|e| e.to_string())?;
            let mut r = Report::new(accepted);
            let params: Vec<&str> = ex.params.iter().map(|p| &**p).collect();
            r.line(format!("principal: {}({})", ex.program.principal, params.join(", ")))
                .record("principal", &ex.program.principal)
                .record("params", params.join(" "));
            r.line(format!("primitive-corecursive: {accepted}")).record("primitive-corecursive", accepted);
            r.line("certificate:");
            for e in &ex.certificate.entries {
                let path: Vec<String> = e.path.iter().map(|i| i.to_string()).collect();
                let path = if path.is_empty() { "root".to_string() } else { path.join(".") };
                r.record("node", format!("{path} {} {} splits={}", e.rule, e.realizer, e.splits));
            }
            r.text.push_str(&ex.certificate.to_string());
            match out {
                Some(f) => {
                    std::fs::write(f, &src).map_err(|e| format!("{}: {e}", f.display()))?;
                    r.line(format!("wrote {}", f.display())).record("out", f.display());
                }
                None => {
                    r.line(src);
                }
            }
            Ok(r)
        }
        Command::Roundtrip { depth, programs } => {
            let names: Vec<&str> = if programs.is_empty() {
                if cli.no_stock {
                    ws.programs.iter().map(|p| &*p.program.name).collect()
                } else {
                    PRODUCTIVE.to_vec()
                }
            } else {
                programs.iter().map(String::as_str).collect()
            };
            let report = roundtrip(&ws, &names, *depth);
            let mut r = Report::new(report.passed());
            r.text = report.to_string();
            for e in &report.entries {
                for (s, o) in &e.stages {
                    let v = match o {
                        eqcoind::extract::StageOutcome::Pass => "pass".to_string(),
                        eqcoind::extract::StageOutcome::Fail(why) => format!("fail {why}"),
                        eqcoind::extract::StageOutcome::Skipped => "skipped".to_string(),
                    };
                    r.record(&format!("{}.{}", e.program, s.name()), v);
                }
            }
            Ok(r)
        }
    }
}
