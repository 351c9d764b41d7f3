//! Final states, outcome sets and assertion verdicts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;
use crate::program::{Assertion, Atom, Cond, Loc, Quantifier, Reg, Value};

/// Final register file of every thread plus final memory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome {
    /// `(thread name, registers)` in program thread order.
    pub registers: Vec<(String, BTreeMap<Reg, Value>)>,
    pub memory: BTreeMap<Loc, Value>,
}

impl Outcome {
    pub fn register(&self, thread: &str, reg: &Reg) -> Option<Value> {
        self.registers
            .iter()
            .find(|(t, _)| t == thread)
            .and_then(|(_, regs)| regs.get(reg).copied())
    }

    pub fn location(&self, loc: &Loc) -> Option<Value> {
        self.memory.get(loc).copied()
    }

    /// Evaluates `cond` against this outcome.
    pub fn satisfies(&self, cond: &Cond) -> Result<bool, Error> {
        Ok(match cond {
            Cond::Atom(Atom::Reg { thread, reg, value }) => {
                self.register(thread, reg).ok_or_else(|| {
                    Error::UnknownName(format!("{thread}:{reg}"))
                })? == *value
            }
            Cond::Atom(Atom::Loc { loc, value }) => {
                self.location(loc)
                    .ok_or_else(|| Error::UnknownName(loc.0.clone()))?
                    == *value
            }
            Cond::Not(c) => !self.satisfies(c)?,
            Cond::And(a, b) => self.satisfies(a)? && self.satisfies(b)?,
            Cond::Or(a, b) => self.satisfies(a)? || self.satisfies(b)?,
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (thread, regs) in &self.registers {
            for (r, v) in regs {
                parts.push(format!("{thread}:{r}={v}"));
            }
        }
        for (l, v) in &self.memory {
            parts.push(format!("{l}={v}"));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Deduplicated outcomes of one backend run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutcomeSet {
    pub outcomes: BTreeSet<Outcome>,
    /// Some contributing execution contains a data race.
    pub racy: bool,
}

impl OutcomeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, outcome: Outcome) -> bool {
        self.outcomes.insert(outcome)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn contains(&self, outcome: &Outcome) -> bool {
        self.outcomes.contains(outcome)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter()
    }

    pub fn is_subset(&self, other: &OutcomeSet) -> bool {
        self.outcomes.is_subset(&other.outcomes)
    }

    /// Outcomes of `self` missing from `other`.
    pub fn difference<'a>(&'a self, other: &'a OutcomeSet) -> impl Iterator<Item = &'a Outcome> {
        self.outcomes.difference(&other.outcomes)
    }

    pub fn union(&self, other: &OutcomeSet) -> OutcomeSet {
        OutcomeSet {
            outcomes: self.outcomes.union(&other.outcomes).cloned().collect(),
            racy: self.racy || other.racy,
        }
    }
}

impl FromIterator<Outcome> for OutcomeSet {
    fn from_iter<I: IntoIterator<Item = Outcome>>(iter: I) -> Self {
        OutcomeSet {
            outcomes: iter.into_iter().collect(),
            racy: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    /// `exists`: some outcome satisfies the condition.
    Allowed,
    /// `exists`: no outcome does.
    Forbidden,
    /// `forall`: every outcome satisfies the condition.
    Holds,
    /// `forall`: some outcome does not.
    Violated,
}

impl VerdictKind {
    pub fn keyword(self) -> &'static str {
        match self {
            VerdictKind::Allowed => "allowed",
            VerdictKind::Forbidden => "forbidden",
            VerdictKind::Holds => "holds",
            VerdictKind::Violated => "violated",
        }
    }

    pub fn from_keyword(word: &str) -> Option<VerdictKind> {
        [
            VerdictKind::Allowed,
            VerdictKind::Forbidden,
            VerdictKind::Holds,
            VerdictKind::Violated,
        ]
        .into_iter()
        .find(|k| k.keyword() == word)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Satisfying outcomes for `Allowed`, counterexamples for `Violated`.
    pub witnesses: Vec<Outcome>,
}

pub fn eval_assertion(assertion: &Assertion, outcomes: &OutcomeSet) -> Result<Verdict, Error> {
    let mut hits = Vec::new();
    let mut misses = Vec::new();
    for o in outcomes.iter() {
        if o.satisfies(&assertion.cond)? {
            hits.push(o.clone());
        } else {
            misses.push(o.clone());
        }
    }
    Ok(match assertion.quantifier {
        Quantifier::Exists if hits.is_empty() => Verdict {
            kind: VerdictKind::Forbidden,
            witnesses: vec![],
        },
        Quantifier::Exists => Verdict {
            kind: VerdictKind::Allowed,
            witnesses: hits,
        },
        Quantifier::Forall if misses.is_empty() => Verdict {
            kind: VerdictKind::Holds,
            witnesses: vec![],
        },
        Quantifier::Forall => Verdict {
            kind: VerdictKind::Violated,
            witnesses: misses,
        },
    })
}
