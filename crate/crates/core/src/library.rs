//! The stock library of stream programs used by tests and the CLI.

use crate::syntax::{parse_workspace, Workspace};

pub const STOCK_SOURCE: &str = include_str!("../library/stock.cds");

/// Programs of the stock library that are primitive corecursive.
pub const PRODUCTIVE: [&str; 9] = ["zeros", "ones", "identity", "flip", "even", "odd", "merge", "zipxor", "alternate"];

/// Programs kept as negative examples for the recognizer.
pub const REJECTED: [&str; 1] = ["morse_thue"];

pub fn stock_library() -> Workspace {
    parse_workspace(STOCK_SOURCE).expect("stock library parses")
}
