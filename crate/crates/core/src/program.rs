//! Programs, instructions and final-state assertions shared by every backend.

use std::collections::BTreeMap;
use std::fmt;

/// Every memory cell and register holds an 8-bit natural.
pub type Value = u8;

/// C++11 memory orders as they appear in litmus files.
///
/// `Consume` is accepted by the parser so that files using it get a clear
/// diagnostic from [`crate::validate`]; no backend gives it a meaning.
///
/// There is deliberately no ordering between variants: the standard never
/// defined what "stronger" means for memory orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemoryOrder {
    Relaxed,
    Consume,
    Acquire,
    Release,
    AcqRel,
    SeqCst,
}

impl MemoryOrder {
    pub const ALL: [MemoryOrder; 6] = [
        MemoryOrder::Relaxed,
        MemoryOrder::Consume,
        MemoryOrder::Acquire,
        MemoryOrder::Release,
        MemoryOrder::AcqRel,
        MemoryOrder::SeqCst,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            MemoryOrder::Relaxed => "relaxed",
            MemoryOrder::Consume => "consume",
            MemoryOrder::Acquire => "acquire",
            MemoryOrder::Release => "release",
            MemoryOrder::AcqRel => "acq_rel",
            MemoryOrder::SeqCst => "seq_cst",
        }
    }

    pub fn from_keyword(word: &str) -> Option<MemoryOrder> {
        MemoryOrder::ALL.into_iter().find(|o| o.keyword() == word)
    }

    /// Acquire semantics for reads and fences (acquire, acq_rel, seq_cst).
    pub fn is_acquire_class(self) -> bool {
        matches!(
            self,
            MemoryOrder::Acquire | MemoryOrder::AcqRel | MemoryOrder::SeqCst
        )
    }

    /// Release semantics for writes and fences (release, acq_rel, seq_cst).
    pub fn is_release_class(self) -> bool {
        matches!(
            self,
            MemoryOrder::Release | MemoryOrder::AcqRel | MemoryOrder::SeqCst
        )
    }

    pub fn is_seq_cst(self) -> bool {
        self == MemoryOrder::SeqCst
    }
}

impl fmt::Display for MemoryOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Failure order used by the single-order compare-and-swap overloads:
/// write-only semantics are stripped from the success order.
pub fn derive_failure_order(success: MemoryOrder) -> MemoryOrder {
    match success {
        MemoryOrder::Release => MemoryOrder::Relaxed,
        MemoryOrder::AcqRel => MemoryOrder::Acquire,
        other => other,
    }
}

/// Symbolic name of a shared memory location.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc(pub String);

/// Thread-local register name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Reg(pub String);

impl Loc {
    pub fn new(name: impl Into<String>) -> Self {
        Loc(name.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Reg {
    pub fn new(name: impl Into<String>) -> Self {
        Reg(name.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Right-hand side of a store or read-modify-write.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Lit(Value),
    Reg(Reg),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Lit(v) => write!(f, "{v}"),
            Operand::Reg(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RmwOp {
    Exchange,
    FetchAdd,
    FetchSub,
    FetchAnd,
    FetchOr,
    FetchXor,
}

impl RmwOp {
    pub const ALL: [RmwOp; 6] = [
        RmwOp::Exchange,
        RmwOp::FetchAdd,
        RmwOp::FetchSub,
        RmwOp::FetchAnd,
        RmwOp::FetchOr,
        RmwOp::FetchXor,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            RmwOp::Exchange => "exchange",
            RmwOp::FetchAdd => "fetch_add",
            RmwOp::FetchSub => "fetch_sub",
            RmwOp::FetchAnd => "fetch_and",
            RmwOp::FetchOr => "fetch_or",
            RmwOp::FetchXor => "fetch_xor",
        }
    }

    pub fn from_keyword(word: &str) -> Option<RmwOp> {
        RmwOp::ALL.into_iter().find(|o| o.keyword() == word)
    }

    /// New memory value; arithmetic wraps modulo 256.
    pub fn apply(self, old: Value, operand: Value) -> Value {
        match self {
            RmwOp::Exchange => operand,
            RmwOp::FetchAdd => old.wrapping_add(operand),
            RmwOp::FetchSub => old.wrapping_sub(operand),
            RmwOp::FetchAnd => old & operand,
            RmwOp::FetchOr => old | operand,
            RmwOp::FetchXor => old ^ operand,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instruction {
    Load {
        dst: Reg,
        loc: Loc,
        order: MemoryOrder,
    },
    Store {
        loc: Loc,
        val: Operand,
        order: MemoryOrder,
    },
    NaLoad {
        dst: Reg,
        loc: Loc,
    },
    NaStore {
        loc: Loc,
        val: Operand,
    },
    Rmw {
        op: RmwOp,
        dst: Reg,
        loc: Loc,
        val: Operand,
        order: MemoryOrder,
    },
    Cas {
        weak: bool,
        dst: Reg,
        loc: Loc,
        expected: Value,
        desired: Value,
        success: MemoryOrder,
        failure: MemoryOrder,
    },
    Fence {
        order: MemoryOrder,
    },
}

impl Instruction {
    pub fn loc(&self) -> Option<&Loc> {
        match self {
            Instruction::Load { loc, .. }
            | Instruction::Store { loc, .. }
            | Instruction::NaLoad { loc, .. }
            | Instruction::NaStore { loc, .. }
            | Instruction::Rmw { loc, .. }
            | Instruction::Cas { loc, .. } => Some(loc),
            Instruction::Fence { .. } => None,
        }
    }

    /// Register receiving the value read, if any.
    pub fn dst(&self) -> Option<&Reg> {
        match self {
            Instruction::Load { dst, .. }
            | Instruction::NaLoad { dst, .. }
            | Instruction::Rmw { dst, .. }
            | Instruction::Cas { dst, .. } => Some(dst),
            _ => None,
        }
    }

    /// Register read as an operand, if any.
    pub fn operand_reg(&self) -> Option<&Reg> {
        match self {
            Instruction::Store { val, .. }
            | Instruction::NaStore { val, .. }
            | Instruction::Rmw { val, .. } => match val {
                Operand::Reg(r) => Some(r),
                Operand::Lit(_) => None,
            },
            _ => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        !matches!(self, Instruction::NaLoad { .. } | Instruction::NaStore { .. })
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Instruction::Load { .. } => "load",
            Instruction::Store { .. } => "store",
            Instruction::NaLoad { .. } => "na_load",
            Instruction::NaStore { .. } => "na_store",
            Instruction::Rmw { op, .. } => op.keyword(),
            Instruction::Cas { weak: false, .. } => "cas_strong",
            Instruction::Cas { weak: true, .. } => "cas_weak",
            Instruction::Fence { .. } => "fence",
        }
    }

    /// Rewrites every memory order with `f`; CAS failure orders are passed
    /// through `f` as well.
    pub fn map_orders(&self, f: impl Fn(MemoryOrder) -> MemoryOrder) -> Instruction {
        let mut out = self.clone();
        match &mut out {
            Instruction::Load { order, .. }
            | Instruction::Store { order, .. }
            | Instruction::Rmw { order, .. }
            | Instruction::Fence { order } => *order = f(*order),
            Instruction::Cas {
                success, failure, ..
            } => {
                *success = f(*success);
                *failure = f(*failure);
            }
            Instruction::NaLoad { .. } | Instruction::NaStore { .. } => {}
        }
        out
    }
}

/// Same text as one line of a printed litmus file.
impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::litmus::printer::instruction(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    pub name: String,
    pub instructions: Vec<Instruction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "exists",
            Quantifier::Forall => "forall",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `thread:reg = value`
    Reg {
        thread: String,
        reg: Reg,
        value: Value,
    },
    /// `loc = value`
    Loc { loc: Loc, value: Value },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cond {
    Atom(Atom),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    pub fn and(a: Cond, b: Cond) -> Cond {
        Cond::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Cond, b: Cond) -> Cond {
        Cond::Or(Box::new(a), Box::new(b))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Cond) -> Cond {
        Cond::Not(Box::new(a))
    }
    pub fn reg(thread: &str, reg: &str, value: Value) -> Cond {
        Cond::Atom(Atom::Reg {
            thread: thread.to_string(),
            reg: Reg::new(reg),
            value,
        })
    }
    pub fn loc(loc: &str, value: Value) -> Cond {
        Cond::Atom(Atom::Loc {
            loc: Loc::new(loc),
            value,
        })
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Cond::Atom(a) => out.push(a),
            Cond::Not(c) => c.collect_atoms(out),
            Cond::And(a, b) | Cond::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assertion {
    pub quantifier: Quantifier,
    pub cond: Cond,
}

/// A litmus test: initial memory, straight-line threads and a final-state
/// assertion. Locations missing from `init` start at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub init: BTreeMap<Loc, Value>,
    pub threads: Vec<Thread>,
    pub assertion: Assertion,
}

impl Program {
    /// Every location mentioned by `init` or by an instruction, sorted.
    pub fn locations(&self) -> Vec<Loc> {
        let mut locs: Vec<Loc> = self.init.keys().cloned().collect();
        for t in &self.threads {
            for i in &t.instructions {
                if let Some(l) = i.loc() {
                    locs.push(l.clone());
                }
            }
        }
        locs.sort();
        locs.dedup();
        locs
    }

    /// Registers written by thread `index`, sorted.
    pub fn registers(&self, index: usize) -> Vec<Reg> {
        let mut regs: Vec<Reg> = self.threads[index]
            .instructions
            .iter()
            .filter_map(|i| i.dst().cloned())
            .collect();
        regs.sort();
        regs.dedup();
        regs
    }

    pub fn thread_index(&self, name: &str) -> Option<usize> {
        self.threads.iter().position(|t| t.name == name)
    }

    pub fn initial_value(&self, loc: &Loc) -> Value {
        self.init.get(loc).copied().unwrap_or(0)
    }

    /// Copy of the program with every memory order rewritten by `f`.
    pub fn map_orders(&self, f: impl Fn(MemoryOrder) -> MemoryOrder + Copy) -> Program {
        let mut p = self.clone();
        for t in &mut p.threads {
            for i in &mut t.instructions {
                *i = i.map_orders(f);
            }
        }
        p
    }

    /// Every access made atomic and every order set to seq_cst.
    pub fn all_seq_cst(&self) -> Program {
        let mut p = self.map_orders(|_| MemoryOrder::SeqCst);
        for t in &mut p.threads {
            for i in &mut t.instructions {
                *i = match i.clone() {
                    Instruction::NaLoad { dst, loc } => Instruction::Load {
                        dst,
                        loc,
                        order: MemoryOrder::SeqCst,
                    },
                    Instruction::NaStore { loc, val } => Instruction::Store {
                        loc,
                        val,
                        order: MemoryOrder::SeqCst,
                    },
                    other => other,
                };
            }
        }
        p
    }

    /// Copy with a `fence seq_cst` inserted after every store-like
    /// instruction (store, na_store).
    pub fn with_fence_after_stores(&self) -> Program {
        let mut p = self.clone();
        for t in &mut p.threads {
            let mut out = Vec::with_capacity(t.instructions.len() * 2);
            for i in t.instructions.drain(..) {
                let is_store = matches!(i, Instruction::Store { .. } | Instruction::NaStore { .. });
                out.push(i);
                if is_store {
                    out.push(Instruction::Fence {
                        order: MemoryOrder::SeqCst,
                    });
                }
            }
            t.instructions = out;
        }
        p
    }
}
