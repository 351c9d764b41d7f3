//! Sequential consistency: every interleaving of the threads' program orders
//! against a single shared memory.

use std::collections::HashSet;

use crate::compile::{Compiled, Op};
use crate::error::Error;
use crate::outcome::OutcomeSet;
use crate::program::{Program, Value};
use crate::{ModelRun, Options, Stats};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScState {
    pub memory: Vec<Value>,
    /// Next instruction of each thread.
    pub pcs: Vec<usize>,
    pub regs: Vec<Vec<Value>>,
}

impl ScState {
    pub fn initial(program: &Compiled) -> ScState {
        ScState {
            memory: program.init.clone(),
            pcs: vec![0; program.thread_count()],
            regs: program.layout.regs.iter().map(|r| vec![0; r.len()]).collect(),
        }
    }

    pub fn is_final(&self, program: &Compiled) -> bool {
        self.pcs
            .iter()
            .zip(&program.threads)
            .all(|(&pc, t)| pc == t.len())
    }
}

/// Result of an atomic read-modify-write on a value `old`: the value handed
/// to the destination register and the value written back, if any. A
/// `cas_weak` whose comparison succeeds yields a second, spuriously failing
/// alternative when `weak_spurious` is set.
pub(crate) fn rmw_alternatives(
    op: Op,
    old: Value,
    regs: &[Value],
    weak_spurious: bool,
) -> Vec<(usize, Value, Option<Value>)> {
    match op {
        Op::Rmw { op, dst, src, .. } => vec![(dst, old, Some(op.apply(old, src.eval(regs))))],
        Op::Cas {
            weak,
            dst,
            expected,
            desired,
            ..
        } => {
            if old == expected {
                let mut alts = vec![(dst, old, Some(desired))];
                if weak && weak_spurious {
                    alts.push((dst, old, None));
                }
                alts
            } else {
                vec![(dst, old, None)]
            }
        }
        _ => unreachable!("not a read-modify-write"),
    }
}

/// Executes the next instruction of `thread`. Memory orders are ignored.
pub fn sc_step(
    program: &Compiled,
    state: &ScState,
    thread: usize,
    opts: &Options,
) -> Result<Vec<ScState>, Error> {
    let pc = *state.pcs.get(thread).ok_or(Error::ThreadExhausted(thread))?;
    let op = *program.threads[thread]
        .get(pc)
        .ok_or(Error::ThreadExhausted(thread))?;
    let mut next = state.clone();
    next.pcs[thread] += 1;
    Ok(match op {
        Op::Load { dst, loc, .. } => {
            next.regs[thread][dst] = next.memory[loc];
            vec![next]
        }
        Op::Store { loc, src, .. } => {
            next.memory[loc] = src.eval(&state.regs[thread]);
            vec![next]
        }
        Op::Fence { .. } => vec![next],
        Op::Rmw { loc, .. } | Op::Cas { loc, .. } => {
            rmw_alternatives(op, state.memory[loc], &state.regs[thread], opts.weak_spurious)
                .into_iter()
                .map(|(dst, read, write)| {
                    let mut s = next.clone();
                    s.regs[thread][dst] = read;
                    if let Some(w) = write {
                        s.memory[loc] = w;
                    }
                    s
                })
                .collect()
        }
    })
}

fn successors(program: &Compiled, state: &ScState, opts: &Options) -> Vec<ScState> {
    (0..program.thread_count())
        .filter(|&t| state.pcs[t] < program.threads[t].len())
        .flat_map(|t| sc_step(program, state, t, opts).expect("thread has an instruction"))
        .collect()
}

/// All final outcomes under sequential consistency. Visited states are
/// memoized, so `stats.explored` counts distinct states.
pub fn enumerate_sc(program: &Program, opts: &Options) -> Result<ModelRun, Error> {
    let compiled = Compiled::new(program)?;
    let mut outcomes = OutcomeSet::new();
    let mut stats = Stats::default();
    let init = ScState::initial(&compiled);
    let mut visited = HashSet::new();
    visited.insert(init.clone());
    let mut stack = vec![init];
    while let Some(state) = stack.pop() {
        stats.explored += 1;
        if state.is_final(&compiled) {
            stats.executions += 1;
            outcomes.insert(compiled.layout.outcome(&state.regs, &state.memory));
            continue;
        }
        for s in successors(&compiled, &state, opts) {
            if visited.insert(s.clone()) {
                if visited.len() > opts.max_states {
                    return Err(Error::LimitExceeded {
                        limit: "states",
                        max: opts.max_states,
                    });
                }
                stack.push(s);
            }
        }
    }
    Ok(ModelRun { outcomes, stats })
}

/// Same outcomes as [`enumerate_sc`] but walks the full interleaving tree;
/// `stats.executions` is the number of complete interleavings.
pub fn enumerate_sc_unmemoized(program: &Program, opts: &Options) -> Result<ModelRun, Error> {
    let compiled = Compiled::new(program)?;
    let mut outcomes = OutcomeSet::new();
    let mut stats = Stats::default();
    let mut stack = vec![ScState::initial(&compiled)];
    while let Some(state) = stack.pop() {
        stats.explored += 1;
        if stats.explored > opts.max_states {
            return Err(Error::LimitExceeded {
                limit: "states",
                max: opts.max_states,
            });
        }
        if state.is_final(&compiled) {
            stats.executions += 1;
            outcomes.insert(compiled.layout.outcome(&state.regs, &state.memory));
            continue;
        }
        stack.extend(successors(&compiled, &state, opts));
    }
    Ok(ModelRun { outcomes, stats })
}
