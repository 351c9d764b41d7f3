//! Index-based form of a validated program used by the backends.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::outcome::Outcome;
use crate::program::{Instruction, Loc, MemoryOrder, Operand, Program, Reg, RmwOp, Value};
use crate::validate::validate;

/// Name tables mapping indices back to the program's symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub locs: Vec<Loc>,
    pub threads: Vec<String>,
    /// Registers written by each thread, sorted.
    pub regs: Vec<Vec<Reg>>,
}

impl Layout {
    pub fn loc_index(&self, loc: &Loc) -> Option<usize> {
        self.locs.binary_search(loc).ok()
    }

    pub fn reg_index(&self, thread: usize, reg: &Reg) -> Option<usize> {
        self.regs[thread].binary_search(reg).ok()
    }

    pub fn outcome(&self, regs: &[Vec<Value>], mem: &[Value]) -> Outcome {
        Outcome {
            registers: self
                .threads
                .iter()
                .zip(&self.regs)
                .zip(regs)
                .map(|((t, names), vals)| {
                    (
                        t.clone(),
                        names.iter().cloned().zip(vals.iter().copied()).collect::<BTreeMap<_, _>>(),
                    )
                })
                .collect(),
            memory: self.locs.iter().cloned().zip(mem.iter().copied()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Src {
    Lit(Value),
    Reg(usize),
}

impl Src {
    pub fn eval(self, regs: &[Value]) -> Value {
        match self {
            Src::Lit(v) => v,
            Src::Reg(r) => regs[r],
        }
    }
}

/// One instruction with names resolved. `order` is `None` for non-atomic
/// accesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Load {
        dst: usize,
        loc: usize,
        order: Option<MemoryOrder>,
    },
    Store {
        loc: usize,
        src: Src,
        order: Option<MemoryOrder>,
    },
    Rmw {
        op: RmwOp,
        dst: usize,
        loc: usize,
        src: Src,
        order: MemoryOrder,
    },
    Cas {
        weak: bool,
        dst: usize,
        loc: usize,
        expected: Value,
        desired: Value,
        success: MemoryOrder,
        failure: MemoryOrder,
    },
    Fence {
        order: MemoryOrder,
    },
}

impl Op {
    /// Register written by the instruction.
    pub fn dst(self) -> Option<usize> {
        match self {
            Op::Load { dst, .. } | Op::Rmw { dst, .. } | Op::Cas { dst, .. } => Some(dst),
            Op::Store { .. } | Op::Fence { .. } => None,
        }
    }

    pub fn loc(self) -> Option<usize> {
        match self {
            Op::Load { loc, .. } | Op::Store { loc, .. } | Op::Rmw { loc, .. } | Op::Cas { loc, .. } => {
                Some(loc)
            }
            Op::Fence { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compiled {
    pub layout: Layout,
    pub init: Vec<Value>,
    pub threads: Vec<Vec<Op>>,
}

impl Compiled {
    /// Validates and resolves `program`.
    pub fn new(program: &Program) -> Result<Compiled, Error> {
        let diags = validate(program);
        if !diags.is_empty() {
            return Err(Error::InvalidProgram(diags));
        }
        let layout = Layout {
            locs: program.locations(),
            threads: program.threads.iter().map(|t| t.name.clone()).collect(),
            regs: (0..program.threads.len()).map(|t| program.registers(t)).collect(),
        };
        let init = layout.locs.iter().map(|l| program.initial_value(l)).collect();
        let threads = program
            .threads
            .iter()
            .enumerate()
            .map(|(t, thread)| {
                thread
                    .instructions
                    .iter()
                    .map(|i| resolve(&layout, t, i))
                    .collect()
            })
            .collect();
        Ok(Compiled {
            layout,
            init,
            threads,
        })
    }

    pub fn thread_count(&self) -> usize {
        self.threads.len()
    }

    pub fn instruction_count(&self) -> usize {
        self.threads.iter().map(Vec::len).sum()
    }
}

fn resolve(layout: &Layout, thread: usize, instr: &Instruction) -> Op {
    // names were checked by validate
    let loc = |l: &Loc| layout.loc_index(l).expect("validated location");
    let reg = |r: &Reg| layout.reg_index(thread, r).expect("validated register");
    let src = |o: &Operand| match o {
        Operand::Lit(v) => Src::Lit(*v),
        Operand::Reg(r) => Src::Reg(reg(r)),
    };
    match instr {
        Instruction::Load { dst, loc: l, order } => Op::Load {
            dst: reg(dst),
            loc: loc(l),
            order: Some(*order),
        },
        Instruction::NaLoad { dst, loc: l } => Op::Load {
            dst: reg(dst),
            loc: loc(l),
            order: None,
        },
        Instruction::Store { loc: l, val, order } => Op::Store {
            loc: loc(l),
            src: src(val),
            order: Some(*order),
        },
        Instruction::NaStore { loc: l, val } => Op::Store {
            loc: loc(l),
            src: src(val),
            order: None,
        },
        Instruction::Rmw {
            op,
            dst,
            loc: l,
            val,
            order,
        } => Op::Rmw {
            op: *op,
            dst: reg(dst),
            loc: loc(l),
            src: src(val),
            order: *order,
        },
        Instruction::Cas {
            weak,
            dst,
            loc: l,
            expected,
            desired,
            success,
            failure,
        } => Op::Cas {
            weak: *weak,
            dst: reg(dst),
            loc: loc(l),
            expected: *expected,
            desired: *desired,
            success: *success,
            failure: *failure,
        },
        Instruction::Fence { order } => Op::Fence { order: *order },
    }
}
