//! Consistency axioms and the data-race check.

use std::fmt;

use crate::compile::Compiled;
use crate::error::Error;
use crate::program::Program;
use crate::relation::Relation;
use crate::Options;

use super::event::{CandidateExecution, EventId};
use super::relations::{hb_from, sb_of, sw_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    HbIrreflexive,
    HbMo,
    CoherentRead,
    /// S embeds hb and mo (strict mode only).
    ScOrder,
    ScRead,
    RmwImmediate,
    ScFence1,
    ScFence2,
    ScFence3,
    ScFence4,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::HbIrreflexive => "HB-IRREFLEXIVE",
            Axiom::HbMo => "HB-MO",
            Axiom::CoherentRead => "COHERENT-READ",
            Axiom::ScOrder => "S-CONSISTENT",
            Axiom::ScRead => "SC-READ",
            Axiom::RmwImmediate => "RMW-IMMEDIATE",
            Axiom::ScFence1 => "SC-FENCE-1",
            Axiom::ScFence2 => "SC-FENCE-2",
            Axiom::ScFence3 => "SC-FENCE-3",
            Axiom::ScFence4 => "SC-FENCE-4",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionJudgment {
    pub consistent: bool,
    pub violated: Vec<Axiom>,
    /// Racing pairs; only computed for consistent candidates.
    pub races: Vec<(EventId, EventId)>,
    pub sb: Relation,
    pub sw: Relation,
    pub hb: Relation,
}

/// Relations and lookup tables derived once per candidate.
pub(crate) struct Analysis<'a> {
    pub cand: &'a CandidateExecution,
    pub sb: Relation,
    pub sw: Relation,
    pub hb: Relation,
    mo_pos: Vec<usize>,
}

impl<'a> Analysis<'a> {
    pub fn new(cand: &'a CandidateExecution, sb: Relation) -> Analysis<'a> {
        let sw = sw_from(cand, &sb);
        let hb = hb_from(cand, &sb, &sw);
        let mut mo_pos = vec![usize::MAX; cand.events.len()];
        for ws in &cand.mo {
            for (i, &w) in ws.iter().enumerate() {
                mo_pos[w] = i;
            }
        }
        Analysis {
            cand,
            sb,
            sw,
            hb,
            mo_pos,
        }
    }

    /// `a` strictly precedes `b` in the modification order of one location.
    fn mo_before(&self, a: EventId, b: EventId) -> bool {
        let ev = &self.cand.events;
        ev[a].loc == ev[b].loc && self.mo_pos[b] != usize::MAX && self.mo_pos[a] < self.mo_pos[b]
    }

    fn rf(&self, read: EventId) -> EventId {
        self.cand.rf[&read]
    }

    /// `rf(b)` is `a` or mo-later than `a`.
    fn reads_at_or_after(&self, b: EventId, a: EventId) -> bool {
        let src = self.rf(b);
        src == a || self.mo_before(a, src)
    }

    fn hb_acyclic(&self) -> bool {
        (0..self.cand.events.len()).all(|e| !self.hb.contains(e, e))
    }

    /// Axioms that do not mention S. With a cyclic hb only the
    /// hb-independent ones are evaluated.
    pub fn check_static(&self, out: &mut Vec<Axiom>) {
        let ev = &self.cand.events;
        let acyclic = self.hb_acyclic();
        if !acyclic {
            out.push(Axiom::HbIrreflexive);
        }

        let rmw_ok = ev.iter().filter(|e| e.is_read() && e.is_write()).all(|e| {
            let mo = &self.cand.mo[e.loc.unwrap()];
            let p = self.mo_pos[e.id];
            p > 0 && mo[p - 1] == self.rf(e.id)
        });
        if !rmw_ok {
            out.push(Axiom::RmwImmediate);
        }
        if !acyclic {
            return;
        }

        let writes: Vec<EventId> = ev.iter().filter(|e| e.is_write()).map(|e| e.id).collect();
        let reads: Vec<EventId> = ev.iter().filter(|e| e.is_read()).map(|e| e.id).collect();
        let same_loc = |a: EventId, b: EventId| ev[a].loc == ev[b].loc;

        let hb_mo_ok = writes.iter().all(|&a| {
            writes
                .iter()
                .all(|&b| a == b || !same_loc(a, b) || !self.hb.contains(a, b) || self.mo_before(a, b))
        });
        if !hb_mo_ok {
            out.push(Axiom::HbMo);
        }

        let mut coherent = true;
        for &b in &reads {
            // read-read: a hb b => rf(b) is not mo-before rf(a)
            for &a in &reads {
                if a != b && same_loc(a, b) && self.hb.contains(a, b) && self.mo_before(self.rf(b), self.rf(a)) {
                    coherent = false;
                }
            }
            for &w in &writes {
                if w == b || !same_loc(w, b) {
                    continue;
                }
                // write-read: w hb b => b reads w or something mo-later
                if self.hb.contains(w, b) && !self.reads_at_or_after(b, w) {
                    coherent = false;
                }
                // read-write: b hb w => rf(b) mo-before w
                if self.hb.contains(b, w) && !self.mo_before(self.rf(b), w) {
                    coherent = false;
                }
            }
        }
        if !coherent {
            out.push(Axiom::CoherentRead);
        }
    }

    /// Axioms involving the seq_cst order `s`.
    pub fn check_sc(&self, s: &[EventId], strict: bool, out: &mut Vec<Axiom>) {
        let ev = &self.cand.events;
        let n = ev.len();
        let mut s_pos = vec![usize::MAX; n];
        for (i, &e) in s.iter().enumerate() {
            s_pos[e] = i;
        }
        let s_before = |a: EventId, b: EventId| s_pos[a] != usize::MAX && s_pos[b] != usize::MAX && s_pos[a] < s_pos[b];
        let acyclic = self.hb_acyclic();

        if strict && acyclic {
            let ok = s.iter().all(|&a| {
                s.iter().all(|&b| {
                    a == b || !(self.hb.contains(a, b) || self.mo_before(a, b)) || s_before(a, b)
                })
            });
            if !ok {
                out.push(Axiom::ScOrder);
            }
        }

        // last seq_cst write to `loc` strictly before position `pos` in S
        let last_sc_write = |loc: Option<usize>, pos: usize| {
            s[..pos]
                .iter()
                .rev()
                .copied()
                .find(|&w| ev[w].is_write() && ev[w].loc == loc)
        };

        if acyclic {
            let sc_read_ok = s.iter().filter(|&&b| ev[b].is_read()).all(|&b| {
                let x = self.rf(b);
                match last_sc_write(ev[b].loc, s_pos[b]) {
                    Some(a) => x == a || (!ev[x].is_seq_cst() && !self.hb.contains(x, a)),
                    None => !ev[x].is_seq_cst(),
                }
            });
            if !sc_read_ok {
                out.push(Axiom::ScRead);
            }
        }

        let fences: Vec<EventId> = s.iter().copied().filter(|&f| ev[f].is_fence()).collect();
        if fences.is_empty() {
            return;
        }
        let atomic_reads: Vec<EventId> = ev.iter().filter(|e| e.atomic && e.is_read()).map(|e| e.id).collect();
        let atomic_writes: Vec<EventId> = ev
            .iter()
            .filter(|e| e.atomic && e.is_write() && !e.is_init())
            .map(|e| e.id)
            .collect();

        let ok1 = atomic_reads.iter().all(|&b| {
            fences.iter().filter(|&&x| self.sb.contains(x, b)).all(|&x| {
                match last_sc_write(ev[b].loc, s_pos[x]) {
                    Some(a) => self.reads_at_or_after(b, a),
                    None => true,
                }
            })
        });
        if !ok1 {
            out.push(Axiom::ScFence1);
        }

        let same_loc = |a: EventId, b: EventId| ev[a].loc == ev[b].loc;
        let ok2 = atomic_writes.iter().all(|&a| {
            atomic_reads
                .iter()
                .filter(|&&b| same_loc(a, b) && ev[b].is_seq_cst() && a != b)
                .all(|&b| {
                    !fences
                        .iter()
                        .any(|&x| self.sb.contains(a, x) && s_before(x, b))
                        || self.reads_at_or_after(b, a)
                })
        });
        if !ok2 {
            out.push(Axiom::ScFence2);
        }

        let fence_pair = |a: EventId, b: EventId| {
            fences.iter().any(|&x| {
                self.sb.contains(a, x)
                    && fences
                        .iter()
                        .any(|&y| self.sb.contains(y, b) && s_before(x, y))
            })
        };
        let ok3 = atomic_writes.iter().all(|&a| {
            atomic_reads
                .iter()
                .filter(|&&b| same_loc(a, b) && a != b)
                .all(|&b| !fence_pair(a, b) || self.reads_at_or_after(b, a))
        });
        if !ok3 {
            out.push(Axiom::ScFence3);
        }

        let ok4 = atomic_writes.iter().all(|&a| {
            atomic_writes
                .iter()
                .filter(|&&b| same_loc(a, b) && a != b)
                .all(|&b| !fence_pair(a, b) || self.mo_before(a, b))
        });
        if !ok4 {
            out.push(Axiom::ScFence4);
        }
    }

    /// Conflicting pairs in different threads, at least one non-atomic,
    /// unordered by hb.
    pub fn races(&self) -> Vec<(EventId, EventId)> {
        let ev = &self.cand.events;
        let mut out = Vec::new();
        for a in ev.iter().filter(|e| !e.is_init() && !e.is_fence()) {
            for b in ev.iter().filter(|e| e.id > a.id && !e.is_init() && !e.is_fence()) {
                if a.thread != b.thread
                    && a.loc == b.loc
                    && (a.is_write() || b.is_write())
                    && (!a.atomic || !b.atomic)
                    && !self.hb.contains(a.id, b.id)
                    && !self.hb.contains(b.id, a.id)
                {
                    out.push((a.id, b.id));
                }
            }
        }
        out
    }
}

/// Judges a candidate against every axiom, requiring S to embed hb and mo.
pub fn check_axioms(program: &Program, candidate: &CandidateExecution) -> Result<ExecutionJudgment, Error> {
    check_axioms_with(program, candidate, &Options::default())
}

/// Like [`check_axioms`]; `opts.strict_s` controls whether S must embed hb
/// and mo.
pub fn check_axioms_with(
    program: &Program,
    candidate: &CandidateExecution,
    opts: &Options,
) -> Result<ExecutionJudgment, Error> {
    let compiled = Compiled::new(program)?;
    if candidate.events.len() != compiled.layout.locs.len() + compiled.instruction_count() {
        return Err(Error::Candidate("event count does not match the program".into()));
    }
    let analysis = Analysis::new(candidate, sb_of(&compiled));
    let mut violated = Vec::new();
    analysis.check_static(&mut violated);
    analysis.check_sc(&candidate.sc_order, opts.strict_s, &mut violated);
    violated.sort();
    let consistent = violated.is_empty();
    let races = if consistent { analysis.races() } else { Vec::new() };
    Ok(ExecutionJudgment {
        consistent,
        violated,
        races,
        sb: analysis.sb,
        sw: analysis.sw,
        hb: analysis.hb,
    })
}

/// Data races of a candidate: conflicting accesses in different threads,
/// at least one non-atomic, unordered by happens-before.
pub fn detect_races(program: &Program, candidate: &CandidateExecution) -> Result<Vec<(EventId, EventId)>, Error> {
    let compiled = Compiled::new(program)?;
    Ok(Analysis::new(candidate, sb_of(&compiled)).races())
}
