#![allow(dead_code)]

use eqcoind::corec::{check_primitive_corecursive, compile_schema, Schema};
use eqcoind::data_system::RegularCoterm;
use eqcoind::extract::prove_corec;
use eqcoind::library::{stock_library, PRODUCTIVE};
use eqcoind::logic::{from_sexpr, Derivation};
use eqcoind::syntax::{parse_sexpr_str, Workspace};
use eqcoind::{DataSystem, PredKind, Program};
use rand::Rng;

pub fn section_example() -> DataSystem {
    let mut ds = DataSystem::new("Ex");
    ds.add_predicate("B", PredKind::Inductive)
        .add_predicate("N", PredKind::Inductive)
        .add_predicate("J", PredKind::Coinductive)
        .add_predicate("S", PredKind::Coinductive)
        .add_predicate("L", PredKind::Inductive);
    ds.add_type("0", &[], "B")
        .add_type("0", &[], "N")
        .add_type("1", &[], "B")
        .add_type("[]", &[], "L")
        .add_type("s", &["N"], "N")
        .add_type("s", &["J"], "J")
        .add_type("t", &["J"], "J")
        .add_type("c", &["N", "S"], "S")
        .add_type("c", &["S", "L"], "L");
    ds
}

pub fn proof(src: &str, ds: &DataSystem) -> Derivation {
    from_sexpr(&parse_sexpr_str(src).expect("s-expression"), ds).expect("proof")
}

/// A productive stock program with its schema and compiled form.
pub struct Compiled {
    pub name: &'static str,
    pub program: Program,
    pub schema: Schema,
    pub compiled: Program,
}

pub fn compiled(ws: &Workspace, name: &'static str) -> (Compiled, DataSystem) {
    let (p, ds) = ws.program(name).expect("stock program");
    let schema = check_primitive_corecursive(p, ds).schema().expect("accepted").clone();
    let compiled = compile_schema(&schema, ds).expect("compiles");
    (Compiled { name, program: p.clone(), schema, compiled }, ds.clone())
}

/// Generated coinductive proofs for every productive stock program.
pub fn stock_proofs() -> Vec<(Compiled, DataSystem, Derivation)> {
    let ws = stock_library();
    PRODUCTIVE
        .iter()
        .map(|n| {
            let (c, ds) = compiled(&ws, n);
            let d = prove_corec(&c.schema, &c.compiled, &ds).expect("proof generation");
            (c, ds, d)
        })
        .collect()
}

pub fn random_bits(rng: &mut impl Rng) -> (Vec<&'static str>, Vec<&'static str>) {
    let bit = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.5) { "1" } else { "0" };
    let prefix = (0..rng.gen_range(0..5)).map(|_| bit(rng)).collect();
    let cycle = (0..rng.gen_range(1..6)).map(|_| bit(rng)).collect();
    (prefix, cycle)
}

pub fn random_stream(rng: &mut impl Rng) -> RegularCoterm {
    let (p, c) = random_bits(rng);
    RegularCoterm::stream(&p, &c).expect("stream")
}

/// Element `i` of the stream `prefix cycle^omega`.
pub fn bit_at(prefix: &[&str], cycle: &[&str], i: usize) -> String {
    if i < prefix.len() {
        prefix[i].to_string()
    } else {
        cycle[(i - prefix.len()) % cycle.len()].to_string()
    }
}
