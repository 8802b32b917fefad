use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eqcoind-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(file: &str, contents: &str) -> PathBuf {
    let path = scratch_dir().join(file);
    std::fs::write(&path, contents).unwrap();
    path
}

fn flip_env_file() -> PathBuf {
    write("flip_env.cds", "env E : Sm { v_a = 0 : v_b; v_b = 1 : v_a; }\n")
}

fn proofs_file() -> PathBuf {
    write(
        "proofs.cds",
        r#"
proof tail using flip { (data-elim "S(y)" :index 2 (assume "S(x:y)" :label h)) }
proof wrong using flip { (data-elim "S(y)" :index 1 (assume "S(x:y)" :label h)) }
proof detour using flip {
  (and-elim "S(x)" :side left
    (and-intro "S(x) /\\ B(y)" (assume "S(x)" :label a) (assume "B(y)" :label b)))
}
"#,
    )
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqcoind")).args(args).output().unwrap()
}

fn tagged(args: &[&str]) -> (i32, BTreeMap<String, String>) {
    let mut full = vec!["--format", "tagged"];
    full.extend_from_slice(args);
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let records = text
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    (out.status.code().unwrap(), records)
}

fn verdict_matches_exit(code: i32, records: &BTreeMap<String, String>) {
    let v = records["verdict"].as_str();
    assert_eq!(code, if v == "positive" { 0 } else { 1 }, "{records:?}");
}

#[test]
fn eval_flip_on_environment() {
    let env = flip_env_file();
    let (code, r) = tagged(&["-f", env.to_str().unwrap(), "eval", "flip(v_a)", "--depth", "4", "--env", "E"]);
    assert_eq!(code, 0);
    assert_eq!(r["approximation"], "1:0:1:0:<cut@4>");
    let out = run(&["-f", env.to_str().unwrap(), "eval", "flip(v_a)", "--depth", "4", "--env", "E"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("1:0:1:0:<cut@4>"));
}

#[test]
fn bisim_flip_against_shifted_environment() {
    let env = flip_env_file();
    let f = env.to_str().unwrap();
    let (code, r) = tagged(&["-f", f, "bisim", "flip(v_a)", "v_b", "--depth", "32", "--env", "E"]);
    assert_eq!((code, r["bisim"].as_str()), (0, "equal-up-to-depth"));
    let (code, r) = tagged(&["-f", f, "bisim", "flip(v_a)", "v_a", "--depth", "32", "--env", "E"]);
    assert_eq!(code, 1);
    assert!(r["bisim"].starts_with("differs"), "{r:?}");
}

#[test]
fn productivity_verdicts() {
    let (code, r) = tagged(&["productive", "morse_thue"]);
    assert_eq!(code, 1);
    assert_eq!(r["function"], "mt");
    assert!(r["reason"].contains("mt()"));
    verdict_matches_exit(code, &r);
    for p in ["flip", "even", "merge", "alternate"] {
        let (code, r) = tagged(&["productive", p]);
        assert_eq!(code, 0, "{p}");
        verdict_matches_exit(code, &r);
    }
}

#[test]
fn classification_exit_status() {
    let (code, r) = tagged(&["classify", "exists y. S(y) /\\ flip(y) = z"]);
    assert_eq!((code, r["class"].as_str()), (0, "strongly-positive"));
    let (code, r) = tagged(&["classify", "forall x. S(x)"]);
    assert_eq!((code, r["class"].as_str()), (1, "positive"));
}

#[test]
fn proof_commands() {
    let p = proofs_file();
    let f = p.to_str().unwrap();
    let (code, r) = tagged(&["-f", f, "check-proof", "tail"]);
    assert_eq!((code, r["judgment"].as_str()), (0, "{h: S(x:y)} |- S(y)"));
    let (code, r) = tagged(&["-f", f, "check-proof", "wrong"]);
    assert_eq!(code, 1);
    assert!(r.contains_key("violation"));
    let (code, r) = tagged(&["-f", f, "normalize", "detour"]);
    assert_eq!((code, r["detour-free"].as_str()), (0, "true"));
    let (code, r) = tagged(&["prove-corec", "even"]);
    assert_eq!((code, r["judgment"].as_str()), (0, "{hx: S(x)} |- S(even(x))"));
}

#[test]
fn extracted_program_file_loads() {
    let out = scratch_dir().join("flip_extracted.cds");
    let (code, r) = tagged(&["extract", "flip", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["primitive-corecursive"], "true");
    assert_eq!(r["principal"], "flip_0");
    let (code, r) = tagged(&["-f", out.to_str().unwrap(), "productive", "flip_0"]);
    assert_eq!(code, 0, "{r:?}");
}

#[test]
fn roundtrip_report() {
    let (code, r) = tagged(&["roundtrip", "--depth", "8", "identity", "flip", "morse_thue"]);
    assert_eq!(code, 1);
    assert_eq!(r["flip.bisim"], "pass");
    assert!(r["morse_thue.compile"].starts_with("fail"));
    assert_eq!(r["morse_thue.bisim"], "skipped");
    let (code, _) = tagged(&["roundtrip", "--depth", "8", "identity", "flip"]);
    assert_eq!(code, 0);
}

#[test]
fn check_reports_every_program() {
    let out = run(&["check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("program morse_thue: ok"));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(run(&["eval", "nope("]).status.code(), Some(2));
    assert_eq!(run(&["productive", "no_such_program"]).status.code(), Some(2));
    let bad = write("bad.cds", "system N { inductive N; constructor 0 : N; } program f : N { f(s(x)) = 0; }");
    let out = run(&["-f", bad.to_str().unwrap(), "check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("1:"));
}
