//! Equational programs over mixed inductive/coinductive data systems.
//!
//! The crate evaluates programs observationally on regular infinite data,
//! recognizes primitive corecursion, checks and normalizes natural-deduction
//! proofs of the intrinsic theory with strongly-positive coinduction, and
//! translates between corecursive definitions and such proofs.

pub mod corec;
pub mod data_system;
pub mod eval;
pub mod library;
pub mod extract;
pub mod logic;
pub mod program;
pub mod syntax;
pub mod term;

pub use data_system::{DataSystem, Membership, PredKind, RegularCoterm};
pub use eval::{Approximation, DiagramEnv, OmegaResult, StallReason};
pub use program::{Equation, Program, Substitution};
pub use term::{Name, Term};
