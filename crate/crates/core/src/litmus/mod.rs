//! Litmus file format.
//!
//! ```text
//! name: SB
//! init: x = 0 y = 0
//! thread P0:
//!   store x 1 relaxed
//!   r1 = load y relaxed
//! thread P1:
//!   store y 1 relaxed
//!   r2 = load x relaxed
//! exists: P0:r1 = 0 /\ P1:r2 = 0
//! ```
//!
//! One instruction per line, `#` starts a comment, an omitted memory order
//! means `seq_cst`. A compare-and-swap given a single order derives its
//! failure order with [`crate::derive_failure_order`].

mod lexer;
mod parser;
pub(crate) mod printer;

use std::fmt;

pub use parser::{parse_litmus, parse_litmus_bytes};
pub use printer::print_litmus;

/// Location of a diagnostic: 1-based line and column plus a byte range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Words that cannot name a location, register or thread.
pub const KEYWORDS: &[&str] = &[
    "name",
    "init",
    "thread",
    "exists",
    "forall",
    "load",
    "store",
    "na_load",
    "na_store",
    "exchange",
    "fetch_add",
    "fetch_sub",
    "fetch_and",
    "fetch_or",
    "fetch_xor",
    "cas_strong",
    "cas_weak",
    "fence",
    "relaxed",
    "consume",
    "acquire",
    "release",
    "acq_rel",
    "seq_cst",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}
