use std::collections::BTreeMap;
use std::fmt;

use crate::compile::{Compiled, Layout, Op, Src};
use crate::error::Error;
use crate::outcome::Outcome;
use crate::program::{Loc, MemoryOrder, Value};

pub type EventId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Read,
    Write,
    Rmw,
    Fence,
}

/// One dynamic memory action. Events `0..locations` are the initial-value
/// pseudo-writes, one per location; instruction `i` of thread `t` follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub id: EventId,
    /// `None` for initial-value writes.
    pub thread: Option<usize>,
    /// Program-order index within the thread.
    pub index: usize,
    pub kind: EventKind,
    pub atomic: bool,
    /// `None` for non-atomic accesses and initial writes.
    pub order: Option<MemoryOrder>,
    pub loc: Option<usize>,
    pub read_value: Option<Value>,
    pub written_value: Option<Value>,
}

impl Event {
    pub fn is_init(&self) -> bool {
        self.thread.is_none()
    }
    pub fn is_read(&self) -> bool {
        matches!(self.kind, EventKind::Read | EventKind::Rmw)
    }
    pub fn is_write(&self) -> bool {
        matches!(self.kind, EventKind::Write | EventKind::Rmw)
    }
    pub fn is_fence(&self) -> bool {
        self.kind == EventKind::Fence
    }
    pub fn is_seq_cst(&self) -> bool {
        self.order == Some(MemoryOrder::SeqCst)
    }
    /// Atomic write or RMW with release, acq_rel or seq_cst order.
    pub fn is_release_write(&self) -> bool {
        self.atomic && self.is_write() && self.order.is_some_and(MemoryOrder::is_release_class)
    }
    /// Atomic read or RMW with acquire, acq_rel or seq_cst order.
    pub fn is_acquire_read(&self) -> bool {
        self.atomic && self.is_read() && self.order.is_some_and(MemoryOrder::is_acquire_class)
    }
    pub fn is_release_fence(&self) -> bool {
        self.is_fence() && self.order.is_some_and(MemoryOrder::is_release_class)
    }
    pub fn is_acquire_fence(&self) -> bool {
        self.is_fence() && self.order.is_some_and(MemoryOrder::is_acquire_class)
    }
    pub fn is_seq_cst_fence(&self) -> bool {
        self.is_fence() && self.is_seq_cst()
    }

    /// Short label such as `T0: W x=1 rel`.
    pub fn label(&self, layout: &Layout) -> String {
        let loc = |l: Option<usize>| l.map_or("", |l| layout.locs[l].as_str()).to_string();
        let order = match (self.atomic, self.order) {
            (_, Some(o)) => format!(" {}", short_order(o)),
            (false, None) if !self.is_init() => " na".to_string(),
            _ => String::new(),
        };
        let body = match self.kind {
            EventKind::Read => format!("R {}={}", loc(self.loc), fmt_val(self.read_value)),
            EventKind::Write => format!("W {}={}", loc(self.loc), fmt_val(self.written_value)),
            EventKind::Rmw => format!(
                "RMW {}={}->{}",
                loc(self.loc),
                fmt_val(self.read_value),
                fmt_val(self.written_value)
            ),
            EventKind::Fence => "F".to_string(),
        };
        match self.thread {
            Some(t) => format!("T{t}: {body}{order}"),
            None => format!("init: {body}"),
        }
    }
}

fn fmt_val(v: Option<Value>) -> String {
    v.map_or("?".into(), |v| v.to_string())
}

pub fn short_order(o: MemoryOrder) -> &'static str {
    match o {
        MemoryOrder::Relaxed => "rlx",
        MemoryOrder::Consume => "con",
        MemoryOrder::Acquire => "acq",
        MemoryOrder::Release => "rel",
        MemoryOrder::AcqRel => "acq_rel",
        MemoryOrder::SeqCst => "sc",
    }
}

/// A complete guess of reads-from, modification orders and the seq_cst
/// total order for one program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateExecution {
    pub events: Vec<Event>,
    /// Reading event -> the write it reads from.
    pub rf: BTreeMap<EventId, EventId>,
    /// Per location (by index), every write to it; the initial write first.
    pub mo: Vec<Vec<EventId>>,
    /// Total order over all seq_cst events.
    pub sc_order: Vec<EventId>,
    /// Final register values per thread.
    pub registers: Vec<Vec<Value>>,
}

impl CandidateExecution {
    pub fn event_at(&self, thread: usize, index: usize) -> Option<&Event> {
        self.events
            .iter()
            .find(|e| e.thread == Some(thread) && e.index == index)
    }

    pub fn rf_source(&self, read: EventId) -> Option<EventId> {
        self.rf.get(&read).copied()
    }

    /// Final memory: the value of the mo-last write of each location.
    pub fn final_memory(&self) -> Vec<Value> {
        self.mo
            .iter()
            .map(|ws| {
                let last = *ws.last().expect("initial write present");
                self.events[last].written_value.expect("resolved value")
            })
            .collect()
    }

    pub fn outcome(&self, layout: &Layout) -> Outcome {
        layout.outcome(&self.registers, &self.final_memory())
    }
}

/// Event skeleton: ids and kinds fixed, values unknown. `cas_success[e]`
/// decides whether a compare-and-swap event is an RMW or a plain read.
pub(crate) fn skeleton(program: &Compiled, cas_success: &dyn Fn(EventId) -> bool) -> Vec<Event> {
    let mut events: Vec<Event> = (0..program.layout.locs.len())
        .map(|l| Event {
            id: l,
            thread: None,
            index: l,
            kind: EventKind::Write,
            atomic: false,
            order: None,
            loc: Some(l),
            read_value: None,
            written_value: Some(program.init[l]),
        })
        .collect();
    for (t, ops) in program.threads.iter().enumerate() {
        for (i, &op) in ops.iter().enumerate() {
            let id = events.len();
            let (kind, atomic, order) = match op {
                Op::Load { order, .. } => (EventKind::Read, order.is_some(), order),
                Op::Store { order, .. } => (EventKind::Write, order.is_some(), order),
                Op::Rmw { order, .. } => (EventKind::Rmw, true, Some(order)),
                Op::Cas {
                    success, failure, ..
                } => {
                    if cas_success(id) {
                        (EventKind::Rmw, true, Some(success))
                    } else {
                        (EventKind::Read, true, Some(failure))
                    }
                }
                Op::Fence { order } => (EventKind::Fence, true, Some(order)),
            };
            events.push(Event {
                id,
                thread: Some(t),
                index: i,
                kind,
                atomic,
                order,
                loc: op.loc(),
                read_value: None,
                written_value: None,
            });
        }
    }
    events
}

/// First event id of every thread.
pub(crate) fn thread_bases(program: &Compiled) -> Vec<EventId> {
    let mut base = program.layout.locs.len();
    program
        .threads
        .iter()
        .map(|ops| {
            let b = base;
            base += ops.len();
            b
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SolveError {
    /// Some value depends on itself through rf and register data flow.
    ThinAir,
    /// A compare-and-swap's guessed success or failure contradicts the value
    /// it reads.
    CasMismatch,
}

/// Fills in read and written values from `rf`. Values propagate through
/// registers until nothing changes; anything still unknown depends on
/// itself. Returns the final registers.
pub(crate) fn solve_values(
    program: &Compiled,
    events: &mut [Event],
    rf: &BTreeMap<EventId, EventId>,
    weak_spurious: bool,
) -> Result<Vec<Vec<Value>>, SolveError> {
    let bases = thread_bases(program);
    // register `r` as seen just before instruction `i` of thread `t`
    let reg_before = |events: &[Event], t: usize, i: usize, r: usize| -> Option<Value> {
        (0..i)
            .rev()
            .find(|&j| program.threads[t][j].dst() == Some(r))
            .map_or(Some(0), |j| events[bases[t] + j].read_value)
    };
    loop {
        let mut progress = false;
        for (t, ops) in program.threads.iter().enumerate() {
            for (i, &op) in ops.iter().enumerate() {
                let id = bases[t] + i;
                if events[id].is_read() && events[id].read_value.is_none() {
                    if let Some(v) = events[rf[&id]].written_value {
                        events[id].read_value = Some(v);
                        progress = true;
                    }
                }
                if !events[id].is_write() || events[id].written_value.is_some() {
                    continue;
                }
                let src = |s: Src| match s {
                    Src::Lit(v) => Some(v),
                    Src::Reg(r) => reg_before(events, t, i, r),
                };
                let written = match op {
                    Op::Store { src: s, .. } => src(s),
                    Op::Rmw { op, src: s, .. } => events[id].read_value.zip(src(s)).map(|(old, v)| op.apply(old, v)),
                    Op::Cas { desired, .. } => Some(desired),
                    Op::Load { .. } | Op::Fence { .. } => None,
                };
                if written.is_some() {
                    events[id].written_value = written;
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }
    let unresolved = events
        .iter()
        .any(|e| (e.is_read() && e.read_value.is_none()) || (e.is_write() && e.written_value.is_none()));
    if unresolved {
        return Err(SolveError::ThinAir);
    }
    for (t, ops) in program.threads.iter().enumerate() {
        for (i, &op) in ops.iter().enumerate() {
            if let Op::Cas { weak, expected, .. } = op {
                let ev = &events[bases[t] + i];
                let matches = ev.read_value == Some(expected);
                let ok = if ev.kind == EventKind::Rmw {
                    matches
                } else {
                    !matches || (weak && weak_spurious)
                };
                if !ok {
                    return Err(SolveError::CasMismatch);
                }
            }
        }
    }
    Ok(program
        .threads
        .iter()
        .enumerate()
        .map(|(t, ops)| {
            (0..program.layout.regs[t].len())
                .map(|r| reg_before(events, t, ops.len(), r).expect("all values resolved"))
                .collect()
        })
        .collect())
}

/// Names an event in a hand-built candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventRef {
    /// Initial write of a location.
    Init(String),
    /// Instruction `index` of thread `thread` (by position).
    At(usize, usize),
}

impl EventRef {
    pub fn init(loc: &str) -> EventRef {
        EventRef::Init(loc.to_string())
    }
}

impl From<(usize, usize)> for EventRef {
    fn from((t, i): (usize, usize)) -> EventRef {
        EventRef::At(t, i)
    }
}

impl fmt::Display for EventRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventRef::Init(l) => write!(f, "init({l})"),
            EventRef::At(t, i) => write!(f, "({t},{i})"),
        }
    }
}

/// Assembles a [`CandidateExecution`] by hand: choose which CAS instructions
/// fail, the rf source of each read, mo per location (initial write implied)
/// and the seq_cst order. Values follow from rf.
pub struct CandidateBuilder<'a> {
    program: &'a Compiled,
    failing_cas: Vec<(usize, usize)>,
    rf: Vec<(EventRef, EventRef)>,
    mo: Vec<(String, Vec<EventRef>)>,
    sc: Option<Vec<EventRef>>,
    weak_spurious: bool,
}

impl<'a> CandidateBuilder<'a> {
    pub fn new(program: &'a Compiled) -> Self {
        CandidateBuilder {
            program,
            failing_cas: Vec::new(),
            rf: Vec::new(),
            mo: Vec::new(),
            sc: None,
            weak_spurious: true,
        }
    }

    pub fn cas_fails(mut self, thread: usize, index: usize) -> Self {
        self.failing_cas.push((thread, index));
        self
    }

    pub fn rf(mut self, read: impl Into<EventRef>, write: impl Into<EventRef>) -> Self {
        self.rf.push((read.into(), write.into()));
        self
    }

    /// Non-initial writes of `loc` in modification order.
    pub fn mo(mut self, loc: &str, writes: &[(usize, usize)]) -> Self {
        self.mo
            .push((loc.to_string(), writes.iter().map(|&w| w.into()).collect()));
        self
    }

    pub fn sc(mut self, order: &[(usize, usize)]) -> Self {
        self.sc = Some(order.iter().map(|&e| e.into()).collect());
        self
    }

    fn resolve(&self, r: &EventRef) -> Result<EventId, Error> {
        match r {
            EventRef::Init(l) => self
                .program
                .layout
                .loc_index(&Loc::new(l.clone()))
                .ok_or_else(|| Error::Candidate(format!("unknown location {l}"))),
            EventRef::At(t, i) => {
                let bases = thread_bases(self.program);
                match (bases.get(*t), self.program.threads.get(*t)) {
                    (Some(b), Some(ops)) if *i < ops.len() => Ok(b + i),
                    _ => Err(Error::Candidate(format!("no event {r}"))),
                }
            }
        }
    }

    pub fn build(self) -> Result<CandidateExecution, Error> {
        let failing: Vec<EventId> = self
            .failing_cas
            .iter()
            .map(|&(t, i)| self.resolve(&EventRef::At(t, i)))
            .collect::<Result<_, _>>()?;
        let mut events = skeleton(self.program, &|id| !failing.contains(&id));

        let mut rf = BTreeMap::new();
        for (r, w) in &self.rf {
            let (r, w) = (self.resolve(r)?, self.resolve(w)?);
            if !events[r].is_read() || !events[w].is_write() || events[r].loc != events[w].loc || r == w {
                return Err(Error::Candidate(format!("{r} cannot read from {w}")));
            }
            rf.insert(r, w);
        }
        if let Some(e) = events.iter().find(|e| e.is_read() && !rf.contains_key(&e.id)) {
            return Err(Error::Candidate(format!("read {} has no rf source", e.id)));
        }
        let registers = solve_values(self.program, &mut events, &rf, self.weak_spurious)
            .map_err(|e| Error::Candidate(format!("values cannot be resolved: {e:?}")))?;

        let nlocs = self.program.layout.locs.len();
        let mut mo: Vec<Vec<EventId>> = (0..nlocs).map(|l| vec![l]).collect();
        for (loc, writes) in &self.mo {
            let l = self.resolve(&EventRef::Init(loc.clone()))?;
            for w in writes {
                mo[l].push(self.resolve(w)?);
            }
        }
        for (l, order) in mo.iter_mut().enumerate() {
            let mut expected: Vec<EventId> = events
                .iter()
                .filter(|e| e.is_write() && e.loc == Some(l))
                .map(|e| e.id)
                .collect();
            let mut got = order.clone();
            if got.len() == 1 && expected.len() == 2 {
                // a single non-initial write needs no explicit order
                *order = expected.clone();
                got = expected.clone();
            }
            expected.sort_unstable();
            got.sort_unstable();
            if expected != got {
                return Err(Error::Candidate(format!(
                    "mo of {} must list every write exactly once",
                    self.program.layout.locs[l]
                )));
            }
        }

        let sc_order = match &self.sc {
            Some(s) => s.iter().map(|e| self.resolve(e)).collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let mut sc_sorted = sc_order.clone();
        sc_sorted.sort_unstable();
        let sc_events: Vec<EventId> = events.iter().filter(|e| e.is_seq_cst()).map(|e| e.id).collect();
        if sc_sorted != sc_events {
            return Err(Error::Candidate(
                "S must contain exactly the seq_cst events".into(),
            ));
        }

        Ok(CandidateExecution {
            events,
            rf,
            mo,
            sc_order,
            registers,
        })
    }
}
