//! Sequenced-before, release sequences, synchronizes-with and
//! happens-before for a candidate execution.

use crate::compile::Compiled;
use crate::error::Error;
use crate::program::Program;
use crate::relation::Relation;

use super::event::{thread_bases, CandidateExecution, EventId};

pub(crate) fn sb_of(program: &Compiled) -> Relation {
    let n = program.layout.locs.len() + program.instruction_count();
    let mut sb = Relation::empty(n).expect("size limits keep events within 64");
    for (t, base) in thread_bases(program).into_iter().enumerate() {
        let len = program.threads[t].len();
        for a in base..base + len {
            for b in a + 1..base + len {
                sb.insert(a, b);
            }
        }
    }
    sb
}

/// Per-thread total order over the thread's events. Initial writes and
/// cross-thread pairs are unrelated.
pub fn compute_sb(program: &Program) -> Result<Relation, Error> {
    Ok(sb_of(&Compiled::new(program)?))
}

fn mo_tail(candidate: &CandidateExecution, head: EventId) -> &[EventId] {
    let loc = candidate.events[head].loc.expect("write has a location");
    let mo = &candidate.mo[loc];
    let pos = mo.iter().position(|&w| w == head).expect("write is in mo");
    &mo[pos..]
}

/// The release sequence `head` would head: the longest mo-contiguous run
/// starting at `head` whose later members are atomic writes of the same
/// thread or atomic RMWs of any thread.
pub fn hypothetical_release_sequence(candidate: &CandidateExecution, head: EventId) -> Vec<EventId> {
    let h = &candidate.events[head];
    let mut out = vec![head];
    for &w in &mo_tail(candidate, head)[1..] {
        let e = &candidate.events[w];
        let same_thread = e.atomic && e.thread.is_some() && e.thread == h.thread;
        let rmw = e.atomic && e.is_read() && e.is_write();
        if same_thread || rmw {
            out.push(w);
        } else {
            break;
        }
    }
    out
}

/// Release sequence headed by a release-class atomic write.
pub fn release_sequence(candidate: &CandidateExecution, head: EventId) -> Result<Vec<EventId>, Error> {
    match candidate.events.get(head) {
        Some(e) if e.is_release_write() => Ok(hypothetical_release_sequence(candidate, head)),
        _ => Err(Error::NotReleaseHead(head)),
    }
}

/// Sequenced-before recovered from the events of a candidate.
pub(crate) fn sb_of_candidate(candidate: &CandidateExecution) -> Relation {
    let n = candidate.events.len();
    let mut sb = Relation::empty(n).expect("size limits keep events within 64");
    for a in candidate.events.iter().filter(|e| !e.is_init()) {
        for b in candidate.events.iter().filter(|e| e.thread == a.thread && e.index > a.index) {
            sb.insert(a.id, b.id);
        }
    }
    sb
}

/// Synchronizes-with of a candidate. See [`sw_from`].
pub fn compute_sw(candidate: &CandidateExecution) -> Relation {
    sw_from(candidate, &sb_of_candidate(candidate))
}

/// Synchronizes-with: release write to acquire read, release fence to
/// acquire fence, release fence to acquire read, and release write to
/// acquire fence, each through a read taking its value from the relevant
/// (possibly hypothetical) release sequence.
pub(crate) fn sw_from(candidate: &CandidateExecution, sb: &Relation) -> Relation {
    let n = candidate.events.len();
    let mut sw = Relation::empty(n).expect("size limits keep events within 64");
    let events = &candidate.events;
    let atomic_writes: Vec<EventId> = events
        .iter()
        .filter(|e| e.atomic && e.is_write())
        .map(|e| e.id)
        .collect();
    let atomic_reads: Vec<EventId> = events
        .iter()
        .filter(|e| e.atomic && e.is_read())
        .map(|e| e.id)
        .collect();

    // reads_from_seq[x] = atomic reads whose rf source lies in the
    // (hypothetical) release sequence headed by x
    let mut reads_from_seq: Vec<u64> = vec![0; n];
    for &x in &atomic_writes {
        let seq = hypothetical_release_sequence(candidate, x);
        for &y in &atomic_reads {
            if candidate.rf_source(y).is_some_and(|s| seq.contains(&s)) {
                reads_from_seq[x] |= 1 << y;
            }
        }
    }

    let rel_sources = events.iter().filter(|e| e.is_release_write() || e.is_release_fence());
    for a in rel_sources {
        // writes whose release sequence carries a's release: a itself, or
        // any atomic write sequenced after a release fence
        let heads: Vec<EventId> = if a.is_fence() {
            sb.successors(a.id)
                .filter(|&x| events[x].atomic && events[x].is_write())
                .collect()
        } else {
            vec![a.id]
        };
        let observed = heads.iter().fold(0u64, |m, &x| m | reads_from_seq[x]);
        for b in events.iter().filter(|e| e.is_acquire_read() || e.is_acquire_fence()) {
            let hit = if b.is_fence() {
                // some atomic read sequenced before the acquire fence
                atomic_reads
                    .iter()
                    .any(|&y| sb.contains(y, b.id) && observed & (1 << y) != 0)
            } else {
                observed & (1 << b.id) != 0
            };
            if hit && a.id != b.id {
                sw.insert(a.id, b.id);
            }
        }
    }
    sw
}

/// Initial writes happen before every thread event.
pub(crate) fn init_edges(candidate: &CandidateExecution) -> Relation {
    let n = candidate.events.len();
    let mut r = Relation::empty(n).expect("size limits keep events within 64");
    for i in candidate.events.iter().filter(|e| e.is_init()) {
        for e in candidate.events.iter().filter(|e| !e.is_init()) {
            r.insert(i.id, e.id);
        }
    }
    r
}

/// Happens-before of a candidate of `program`.
pub fn compute_hb(program: &Program, candidate: &CandidateExecution) -> Result<Relation, Error> {
    let sb = sb_of(&Compiled::new(program)?);
    if sb.size() != candidate.events.len() {
        return Err(Error::Candidate("event count does not match the program".into()));
    }
    let sw = sw_from(candidate, &sb);
    Ok(hb_from(candidate, &sb, &sw))
}

/// Transitive closure of sb ∪ sw, with initial writes before everything.
pub(crate) fn hb_from(candidate: &CandidateExecution, sb: &Relation, sw: &Relation) -> Relation {
    let mut base = init_edges(candidate);
    base.union_with(sb).expect("same universe");
    base.union_with(sw).expect("same universe");
    base.transitive_closure()
}
