//! Proofs from corecursive definitions and realizers from proofs, for
//! data systems of boolean streams.

pub mod prove;
pub mod realizer;
pub mod realizes;
pub mod roundtrip;
pub mod streams;

use thiserror::Error;

use crate::term::Name;

pub use prove::{assumption_label, discharge_all, prove_corec};
pub use realizer::{extract, realizer_arguments, realizer_var, Certificate, CertificateEntry, Extraction};
pub use realizes::{EqualityRealizers, RealizabilityJudgment, Realizer, Realizes};
pub use roundtrip::{roundtrip, RoundtripReport, Stage, StageOutcome};
pub use streams::{StreamOps, StreamShape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("unsupported data system: {0}")]
    UnsupportedSystem(String),
    #[error("formula is not strongly positive: {0}")]
    NotStronglyPositive(String),
    #[error("no equation with variable patterns for `{0}`")]
    MissingEquation(Name),
    #[error("no proof for component {component}: {reason}")]
    MissingSubProof { component: String, reason: String },
    #[error("unsupported production in `{0}`")]
    UnsupportedProduction(Name),
    #[error("cannot extract from rule {rule}: {reason}")]
    UnsupportedRule { rule: &'static str, reason: String },
    #[error("{0}")]
    Internal(String),
}
