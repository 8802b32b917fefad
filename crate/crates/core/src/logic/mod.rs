//! Formulas, natural-deduction derivations with program rewriting, proof
//! checking and detour normalization.

pub mod check;
pub mod derivation;
pub mod formula;
pub mod normalize;
pub mod proof_sexpr;

pub use check::{build_dcm, check_proof, check_proof_with, CheckOptions, DcmError, Judgment, Violation};
pub use derivation::{Derivation, Direction, InductionCase, Rule, Side};
pub use formula::{classify_formula, parse_formula_str, Formula, PolarityClass};
pub use normalize::{assert_sp_proof, normalize, normalize_with_limit, NormalizeError};
pub use proof_sexpr::{from_sexpr, to_sexpr, ProofSyntaxError};
