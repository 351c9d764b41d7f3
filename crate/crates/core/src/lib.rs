//! Exhaustive litmus-test checker.
//!
//! A [`Program`] is a handful of straight-line threads plus a final-state
//! assertion. Three backends compute the set of reachable final states:
//!
//! * [`sc`] explores every interleaving against one shared memory,
//! * [`tso`] runs the operational x86-TSO machine (store buffers, mfence,
//!   locked read-modify-writes),
//! * [`cxx11`] enumerates candidate executions and filters them through the
//!   C++11 consistency axioms, flagging data races.
//!
//! Litmus files are read and written by [`litmus`].

pub mod compile;
pub mod cxx11;
pub mod error;
pub mod litmus;
pub mod outcome;
pub mod program;
pub mod relation;
pub mod sc;
pub mod tso;
pub mod validate;

pub use error::{Error, RelationError};
pub use litmus::{parse_litmus, print_litmus, ParseError, SourceSpan};
pub use outcome::{eval_assertion, Outcome, OutcomeSet, Verdict, VerdictKind};
pub use program::{
    derive_failure_order, Assertion, Atom, Cond, Instruction, Loc, MemoryOrder, Operand, Program,
    Quantifier, Reg, RmwOp, Thread, Value,
};
pub use relation::Relation;
pub use validate::{validate, Diagnostic, Rule};

/// Knobs shared by the exploration backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Let `cas_weak` fail even when the compared values match.
    pub weak_spurious: bool,
    /// Visited-state budget of the operational backends.
    pub max_states: usize,
    /// Candidate-execution budget of the axiomatic backend.
    pub max_candidates: usize,
    /// Require the seq_cst total order to embed hb and mo.
    pub strict_s: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            weak_spurious: true,
            max_states: 1_000_000,
            max_candidates: 1_000_000,
            strict_s: true,
        }
    }
}

/// How much work a backend did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Distinct states (operational) or rf/mo candidates (axiomatic).
    pub explored: usize,
    /// Complete executions reaching a final state.
    pub executions: usize,
}

/// Outcomes of one backend run together with its statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelRun {
    pub outcomes: OutcomeSet,
    pub stats: Stats,
}
