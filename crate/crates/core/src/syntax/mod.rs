//! Concrete text syntax for `.cds` files: data systems, programs,
//! diagram environments and proofs.

pub mod lexer;
pub mod sexpr;
pub mod terms;
pub mod workspace;

use thiserror::Error;

pub use lexer::{Cursor, Pos};
pub use sexpr::{parse_sexpr_str, SExpr};
pub use terms::{parse_term, parse_term_str, resolve, RawTerm};
pub use workspace::{parse_workspace, EnvDecl, ProgramDecl, ProofDecl, Workspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError { line: pos.line, col: pos.col, message: message.into() }
    }
}
