//! C++11 axiomatic model: candidate executions are enumerated from the
//! program text and kept when some seq_cst order makes them consistent.

mod axioms;
mod event;
mod relations;

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::compile::{Compiled, Op};
use crate::error::Error;
use crate::outcome::{Outcome, OutcomeSet};
use crate::program::Program;
use crate::{ModelRun, Options, Stats};

pub use axioms::{check_axioms, check_axioms_with, detect_races, Axiom, ExecutionJudgment};
pub use event::{short_order, CandidateBuilder, CandidateExecution, Event, EventId, EventKind, EventRef};
pub use relations::{compute_hb, compute_sb, compute_sw, hypothetical_release_sequence, release_sequence};

use axioms::Analysis;
use event::{skeleton, solve_values};
use relations::sb_of;

/// A consistent execution that contains a data race.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RacyWitness {
    pub candidate: CandidateExecution,
    pub races: Vec<(EventId, EventId)>,
}

/// Full result of the axiomatic exploration.
#[derive(Debug, Clone)]
pub struct Cxx11Run {
    pub run: ModelRun,
    /// One consistent execution per reachable outcome.
    pub witnesses: BTreeMap<Outcome, CandidateExecution>,
    pub racy: Option<RacyWitness>,
}

/// Every vector choosing one element from each list, in odometer order.
fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

/// Possible rf sources of `read`. Reads after a same-thread write to the
/// location see that write or a write of another thread; anything else
/// breaks coherence outright.
fn rf_sources(events: &[Event], read: EventId) -> Vec<EventId> {
    let r = &events[read];
    let same_loc = |e: &&Event| e.is_write() && e.loc == r.loc && e.id != read;
    let own_last = events
        .iter()
        .filter(same_loc)
        .filter(|e| e.thread == r.thread && e.index < r.index)
        .map(|e| e.id)
        .next_back();
    let mut out: Vec<EventId> = match own_last {
        Some(w) => vec![w],
        None => vec![r.loc.expect("read has a location")],
    };
    out.extend(
        events
            .iter()
            .filter(same_loc)
            .filter(|e| !e.is_init() && e.thread != r.thread)
            .map(|e| e.id),
    );
    out
}

/// Modification orders of one location compatible with program order and
/// with each RMW directly following the write it reads.
fn mo_choices(events: &[Event], rf: &BTreeMap<EventId, EventId>, loc: usize) -> Vec<Vec<EventId>> {
    let writes: Vec<EventId> = events
        .iter()
        .filter(|e| e.is_write() && !e.is_init() && e.loc == Some(loc))
        .map(|e| e.id)
        .collect();
    let k = writes.len();
    writes
        .into_iter()
        .permutations(k)
        .filter(|p| {
            let sb_ok = p.iter().tuple_combinations().all(|(&a, &b)| {
                let (a, b) = (&events[a], &events[b]);
                a.thread != b.thread || a.index < b.index
            });
            let full: Vec<EventId> = std::iter::once(loc).chain(p.iter().copied()).collect();
            let rmw_ok = full
                .windows(2)
                .all(|w| !(events[w[1]].is_read()) || rf[&w[1]] == w[0]);
            sb_ok && rmw_ok
        })
        .map(|p| std::iter::once(loc).chain(p).collect())
        .collect()
}

/// Searches for a seq_cst order under which `analysis` is consistent.
fn find_sc_order(analysis: &Analysis<'_>, opts: &Options) -> Option<Vec<EventId>> {
    let cand = analysis.cand;
    let sc: Vec<EventId> = cand.events.iter().filter(|e| e.is_seq_cst()).map(|e| e.id).collect();
    let accept = |s: &Vec<EventId>| {
        let mut v = Vec::new();
        analysis.check_sc(s, opts.strict_s, &mut v);
        v.is_empty()
    };
    if opts.strict_s {
        let mut constraint = analysis.hb.clone();
        for ws in &cand.mo {
            for (i, &a) in ws.iter().enumerate() {
                for &b in &ws[i + 1..] {
                    constraint.insert(a, b);
                }
            }
        }
        let constraint = constraint.restrict(|e| cand.events[e].is_seq_cst());
        constraint.linear_extensions(&sc).ok()?.find(accept)
    } else {
        let k = sc.len();
        sc.into_iter().permutations(k).find(accept)
    }
}

/// Enumerates consistent executions, collecting witnesses.
pub fn explore_cxx11(program: &Program, opts: &Options) -> Result<Cxx11Run, Error> {
    let compiled = Compiled::new(program)?;
    let sb = sb_of(&compiled);
    let cas_ids: Vec<EventId> = {
        let mut id = compiled.layout.locs.len();
        let mut out = Vec::new();
        for ops in &compiled.threads {
            for op in ops {
                if matches!(op, Op::Cas { .. }) {
                    out.push(id);
                }
                id += 1;
            }
        }
        out
    };

    let mut result = Cxx11Run {
        run: ModelRun {
            outcomes: OutcomeSet::new(),
            stats: Stats::default(),
        },
        witnesses: BTreeMap::new(),
        racy: None,
    };

    for mask in 0..1u32 << cas_ids.len() {
        let succeeds = |id: EventId| {
            let bit = cas_ids.iter().position(|&c| c == id).expect("cas event");
            mask & (1 << bit) != 0
        };
        let base = skeleton(&compiled, &succeeds);
        let reads: Vec<EventId> = base.iter().filter(|e| e.is_read()).map(|e| e.id).collect();
        let sources: Vec<Vec<EventId>> = reads.iter().map(|&r| rf_sources(&base, r)).collect();

        for choice in cartesian(&sources) {
            let rf: BTreeMap<EventId, EventId> = reads.iter().copied().zip(choice).collect();
            let mut events = base.clone();
            let Ok(registers) = solve_values(&compiled, &mut events, &rf, opts.weak_spurious) else {
                continue;
            };
            let per_loc: Vec<Vec<Vec<EventId>>> = (0..compiled.layout.locs.len())
                .map(|l| mo_choices(&events, &rf, l))
                .collect();

            for mo in cartesian(&per_loc) {
                result.run.stats.explored += 1;
                if result.run.stats.explored > opts.max_candidates {
                    return Err(Error::LimitExceeded {
                        limit: "candidates",
                        max: opts.max_candidates,
                    });
                }
                let mut cand = CandidateExecution {
                    events: events.clone(),
                    rf: rf.clone(),
                    mo,
                    sc_order: Vec::new(),
                    registers: registers.clone(),
                };
                let analysis = Analysis::new(&cand, sb.clone());
                let mut violated = Vec::new();
                analysis.check_static(&mut violated);
                if !violated.is_empty() {
                    continue;
                }
                let outcome = cand.outcome(&compiled.layout);
                let races = analysis.races();
                let known = result.run.outcomes.contains(&outcome);
                if known && (races.is_empty() || result.racy.is_some()) {
                    // consistency would add nothing new
                    continue;
                }
                let Some(s) = find_sc_order(&analysis, opts) else {
                    continue;
                };
                drop(analysis);
                cand.sc_order = s;
                result.run.stats.executions += 1;
                if !races.is_empty() && result.racy.is_none() {
                    result.run.outcomes.racy = true;
                    result.racy = Some(RacyWitness {
                        candidate: cand.clone(),
                        races,
                    });
                }
                result.run.outcomes.insert(outcome.clone());
                result.witnesses.entry(outcome).or_insert(cand);
            }
        }
    }
    Ok(result)
}

/// Outcomes of all consistent executions. `stats.explored` counts rf/mo
/// candidates, `stats.executions` the consistent ones that were kept.
pub fn enumerate_cxx11(program: &Program, opts: &Options) -> Result<ModelRun, Error> {
    explore_cxx11(program, opts).map(|r| r.run)
}
