//! Static checks run before any backend sees a program.

use std::collections::HashSet;
use std::fmt;

use crate::program::{Atom, Instruction, MemoryOrder, Program};

pub const MAX_THREADS: usize = 4;
pub const MAX_INSTRUCTIONS: usize = 8;
pub const MAX_LOCATIONS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    ConsumeRejected,
    AcquireOnWrite,
    ReleaseOnRead,
    AcqRelOnNonRmw,
    UndefinedRegister(String),
    DuplicateThread(String),
    TooManyThreads(usize),
    TooManyInstructions(usize),
    TooManyLocations(usize),
    UnknownThread(String),
    UnknownRegister(String, String),
    UnknownLocation(String),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::ConsumeRejected => f.write_str("consume rejected"),
            Rule::AcquireOnWrite => f.write_str("acquire on write operation"),
            Rule::ReleaseOnRead => f.write_str("release on read operation"),
            Rule::AcqRelOnNonRmw => f.write_str("acq_rel on non-RMW operation"),
            Rule::UndefinedRegister(r) => write!(f, "register {r} used before it is written"),
            Rule::DuplicateThread(t) => write!(f, "duplicate thread name {t}"),
            Rule::TooManyThreads(n) => {
                write!(f, "{n} threads exceed the limit of {MAX_THREADS}")
            }
            Rule::TooManyInstructions(n) => {
                write!(f, "{n} instructions exceed the limit of {MAX_INSTRUCTIONS}")
            }
            Rule::TooManyLocations(n) => {
                write!(f, "{n} locations exceed the limit of {MAX_LOCATIONS}")
            }
            Rule::UnknownThread(t) => write!(f, "assertion names unknown thread {t}"),
            Rule::UnknownRegister(t, r) => {
                write!(f, "assertion reads register {t}:{r} which is never written")
            }
            Rule::UnknownLocation(l) => write!(f, "assertion names unknown location {l}"),
        }
    }
}

/// One violated rule, located at a thread and instruction where that applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub thread: Option<String>,
    pub index: Option<usize>,
    pub rule: Rule,
}

impl Diagnostic {
    fn program(rule: Rule) -> Self {
        Diagnostic {
            thread: None,
            index: None,
            rule,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.thread, self.index) {
            (Some(t), Some(i)) => write!(f, "thread {t}, instruction {i}: {}", self.rule),
            (Some(t), None) => write!(f, "thread {t}: {}", self.rule),
            _ => write!(f, "{}", self.rule),
        }
    }
}

/// Returns every rule the program violates; empty means valid.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    if program.threads.len() > MAX_THREADS {
        diags.push(Diagnostic::program(Rule::TooManyThreads(program.threads.len())));
    }
    let locations = program.locations();
    if locations.len() > MAX_LOCATIONS {
        diags.push(Diagnostic::program(Rule::TooManyLocations(locations.len())));
    }

    let mut names = HashSet::new();
    for thread in &program.threads {
        if !names.insert(thread.name.as_str()) {
            diags.push(Diagnostic {
                thread: Some(thread.name.clone()),
                index: None,
                rule: Rule::DuplicateThread(thread.name.clone()),
            });
        }
        if thread.instructions.len() > MAX_INSTRUCTIONS {
            diags.push(Diagnostic {
                thread: Some(thread.name.clone()),
                index: None,
                rule: Rule::TooManyInstructions(thread.instructions.len()),
            });
        }

        let mut written: HashSet<&str> = HashSet::new();
        for (index, instr) in thread.instructions.iter().enumerate() {
            let mut push = |rule| {
                diags.push(Diagnostic {
                    thread: Some(thread.name.clone()),
                    index: Some(index),
                    rule,
                })
            };
            for rule in order_violations(instr) {
                push(rule);
            }
            if let Some(r) = instr.operand_reg() {
                if !written.contains(r.as_str()) {
                    push(Rule::UndefinedRegister(r.0.clone()));
                }
            }
            if let Some(d) = instr.dst() {
                written.insert(d.as_str());
            }
        }
    }

    for atom in program.assertion.cond.atoms() {
        match atom {
            Atom::Reg { thread, reg, .. } => match program.thread_index(thread) {
                None => diags.push(Diagnostic::program(Rule::UnknownThread(thread.clone()))),
                Some(t) => {
                    if !program.registers(t).contains(reg) {
                        diags.push(Diagnostic::program(Rule::UnknownRegister(
                            thread.clone(),
                            reg.0.clone(),
                        )));
                    }
                }
            },
            Atom::Loc { loc, .. } => {
                if !locations.contains(loc) {
                    diags.push(Diagnostic::program(Rule::UnknownLocation(loc.0.clone())));
                }
            }
        }
    }

    diags
}

fn order_violations(instr: &Instruction) -> Vec<Rule> {
    use MemoryOrder::*;
    let mut out = Vec::new();
    let mut check = |order: MemoryOrder, reads: bool, writes: bool| {
        if order == Consume {
            out.push(Rule::ConsumeRejected);
            return;
        }
        if !reads && order == Acquire {
            out.push(Rule::AcquireOnWrite);
        }
        if !writes && order == Release {
            out.push(Rule::ReleaseOnRead);
        }
        if !(reads && writes) && order == AcqRel {
            out.push(Rule::AcqRelOnNonRmw);
        }
    };
    match instr {
        Instruction::Load { order, .. } => check(*order, true, false),
        Instruction::Store { order, .. } => check(*order, false, true),
        Instruction::Rmw { order, .. } => check(*order, true, true),
        Instruction::Cas {
            success, failure, ..
        } => {
            check(*success, true, true);
            check(*failure, true, false);
        }
        Instruction::Fence { order } => {
            if *order == Consume {
                out.push(Rule::ConsumeRejected);
            }
        }
        Instruction::NaLoad { .. } | Instruction::NaStore { .. } => {}
    }
    out
}
