//! Operational x86-TSO: per-thread FIFO store buffers in front of a shared
//! memory, store-to-load forwarding, `mfence`, and a global lock taken by
//! locked read-modify-writes.
//!
//! Mapping from litmus instructions: every store (atomic or not) is a
//! buffered write, every load a plain read, `fence seq_cst` is `mfence`,
//! weaker fences compile to nothing, every read-modify-write is a `lock`'d
//! instruction.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::compile::{Compiled, Op};
use crate::error::Error;
use crate::outcome::{Outcome, OutcomeSet};
use crate::program::{MemoryOrder, Program, Value};
use crate::sc::rmw_alternatives;
use crate::{ModelRun, Options, Stats};

/// A pending write. `origin` is the index of the store instruction in its
/// thread; it is implied by the rest of the state and only kept for traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Buffered {
    pub loc: usize,
    pub value: Value,
    pub origin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TsoState {
    pub memory: Vec<Value>,
    /// Oldest write at the front.
    pub buffers: Vec<VecDeque<Buffered>>,
    pub pcs: Vec<usize>,
    pub regs: Vec<Vec<Value>>,
    pub lock: Option<usize>,
}

impl TsoState {
    pub fn initial(program: &Compiled) -> TsoState {
        let n = program.thread_count();
        TsoState {
            memory: program.init.clone(),
            buffers: vec![VecDeque::new(); n],
            pcs: vec![0; n],
            regs: program.layout.regs.iter().map(|r| vec![0; r.len()]).collect(),
            lock: None,
        }
    }

    /// All threads finished and every buffer drained.
    pub fn is_final(&self, program: &Compiled) -> bool {
        self.buffers.iter().all(VecDeque::is_empty)
            && self
                .pcs
                .iter()
                .zip(&program.threads)
                .all(|(&pc, t)| pc == t.len())
    }

    fn lock_free_for(&self, thread: usize) -> bool {
        self.lock.is_none() || self.lock == Some(thread)
    }

    fn drain(&mut self, thread: usize) {
        while let Some(w) = self.buffers[thread].pop_front() {
            self.memory[w.loc] = w.value;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TsoTransition {
    /// Run the thread's next instruction.
    Exec(usize),
    /// Propagate the thread's oldest buffered write to memory.
    Dequeue(usize),
}

impl fmt::Display for TsoTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TsoTransition::Exec(t) => write!(f, "exec({t})"),
            TsoTransition::Dequeue(t) => write!(f, "dequeue({t})"),
        }
    }
}

fn is_mfence(op: Op) -> bool {
    matches!(op, Op::Fence { order: MemoryOrder::SeqCst })
}

pub fn tso_enabled(program: &Compiled, state: &TsoState) -> Vec<TsoTransition> {
    let mut out = Vec::new();
    for t in 0..program.thread_count() {
        if let Some(&op) = program.threads[t].get(state.pcs[t]) {
            let blocked_by_fence = is_mfence(op) && !state.buffers[t].is_empty();
            if state.lock_free_for(t) && !blocked_by_fence {
                out.push(TsoTransition::Exec(t));
            }
        }
        if !state.buffers[t].is_empty() && state.lock_free_for(t) {
            out.push(TsoTransition::Dequeue(t));
        }
    }
    out
}

/// Successor states of `transition`; more than one only for a `cas_weak`
/// that may fail spuriously.
pub fn tso_apply(
    program: &Compiled,
    state: &TsoState,
    transition: TsoTransition,
    opts: &Options,
) -> Result<Vec<TsoState>, Error> {
    if !tso_enabled(program, state).contains(&transition) {
        return Err(Error::NotEnabled(transition.to_string()));
    }
    let mut next = state.clone();
    match transition {
        TsoTransition::Dequeue(t) => {
            let w = next.buffers[t].pop_front().expect("enabled dequeue");
            next.memory[w.loc] = w.value;
            Ok(vec![next])
        }
        TsoTransition::Exec(t) => {
            let pc = state.pcs[t];
            let op = program.threads[t][pc];
            next.pcs[t] += 1;
            match op {
                Op::Load { dst, loc, .. } => {
                    let forwarded = state.buffers[t].iter().rev().find(|w| w.loc == loc);
                    next.regs[t][dst] = forwarded.map_or(state.memory[loc], |w| w.value);
                    Ok(vec![next])
                }
                Op::Store { loc, src, .. } => {
                    next.buffers[t].push_back(Buffered {
                        loc,
                        value: src.eval(&state.regs[t]),
                        origin: pc,
                    });
                    Ok(vec![next])
                }
                Op::Fence { .. } => Ok(vec![next]),
                Op::Rmw { loc, .. } | Op::Cas { loc, .. } => {
                    // lock, drain, read-modify-write memory, drain, unlock
                    let held = next.lock;
                    next.lock = Some(t);
                    next.drain(t);
                    let old = next.memory[loc];
                    Ok(rmw_alternatives(op, old, &state.regs[t], opts.weak_spurious)
                        .into_iter()
                        .map(|(dst, read, write)| {
                            let mut s = next.clone();
                            s.regs[t][dst] = read;
                            if let Some(w) = write {
                                s.memory[loc] = w;
                            }
                            s.drain(t);
                            s.lock = held;
                            s
                        })
                        .collect())
                }
            }
        }
    }
}

fn successors(program: &Compiled, state: &TsoState, opts: &Options) -> Vec<(TsoTransition, TsoState)> {
    tso_enabled(program, state)
        .into_iter()
        .flat_map(|t| {
            tso_apply(program, state, t, opts)
                .expect("enabled transition")
                .into_iter()
                .map(move |s| (t, s))
        })
        .collect()
}

/// Calls `visit` once for every reachable state.
pub fn visit_tso_states(
    program: &Compiled,
    opts: &Options,
    mut visit: impl FnMut(&TsoState),
) -> Result<Stats, Error> {
    let mut stats = Stats::default();
    let init = TsoState::initial(program);
    let mut visited = HashSet::new();
    visited.insert(init.clone());
    let mut stack = vec![init];
    while let Some(state) = stack.pop() {
        stats.explored += 1;
        visit(&state);
        if state.is_final(program) {
            stats.executions += 1;
            continue;
        }
        for (_, s) in successors(program, &state, opts) {
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
    Ok(stats)
}

/// All final outcomes under x86-TSO.
pub fn enumerate_tso(program: &Program, opts: &Options) -> Result<ModelRun, Error> {
    let compiled = Compiled::new(program)?;
    let mut outcomes = OutcomeSet::new();
    let stats = visit_tso_states(&compiled, opts, |s| {
        if s.is_final(&compiled) {
            outcomes.insert(compiled.layout.outcome(&s.regs, &s.memory));
        }
    })?;
    Ok(ModelRun { outcomes, stats })
}

/// One step of a witnessing TSO run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStep {
    /// Thread ran instruction `index`.
    Exec { thread: usize, index: usize },
    /// The write of store `index` reached memory.
    Dequeue {
        thread: usize,
        index: usize,
        loc: usize,
        value: Value,
    },
}

/// Finds a run ending in `target`, by depth-first search.
pub fn tso_witness(
    program: &Program,
    target: &Outcome,
    opts: &Options,
) -> Result<Option<Vec<TraceStep>>, Error> {
    let compiled = Compiled::new(program)?;
    let mut dead = HashSet::new();
    let mut path = Vec::new();
    let found = witness_dfs(
        &compiled,
        TsoState::initial(&compiled),
        target,
        opts,
        &mut dead,
        &mut path,
    )?;
    Ok(found.then_some(path))
}

fn witness_dfs(
    program: &Compiled,
    state: TsoState,
    target: &Outcome,
    opts: &Options,
    dead: &mut HashSet<TsoState>,
    path: &mut Vec<TraceStep>,
) -> Result<bool, Error> {
    if state.is_final(program) {
        return Ok(program.layout.outcome(&state.regs, &state.memory) == *target);
    }
    for (transition, next) in successors(program, &state, opts) {
        if dead.contains(&next) {
            continue;
        }
        let step = match transition {
            TsoTransition::Exec(t) => TraceStep::Exec {
                thread: t,
                index: state.pcs[t],
            },
            TsoTransition::Dequeue(t) => {
                let w = state.buffers[t][0];
                TraceStep::Dequeue {
                    thread: t,
                    index: w.origin,
                    loc: w.loc,
                    value: w.value,
                }
            }
        };
        path.push(step);
        if witness_dfs(program, next.clone(), target, opts, dead, path)? {
            return Ok(true);
        }
        path.pop();
        dead.insert(next);
        if dead.len() > opts.max_states {
            return Err(Error::LimitExceeded {
                limit: "states",
                max: opts.max_states,
            });
        }
    }
    Ok(false)
}
