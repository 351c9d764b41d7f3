use std::fmt::Write;

use crate::program::{Atom, Cond, Instruction, Program};

/// Canonical text of `program`: every memory order is spelled out, init
/// entries are sorted, instructions are indented by two spaces.
pub fn print_litmus(program: &Program) -> String {
    let mut out = String::new();
    writeln!(out, "name: {}", program.name).unwrap();
    writeln!(out, "init:").unwrap();
    for (loc, v) in &program.init {
        writeln!(out, "  {loc} = {v}").unwrap();
    }
    for t in &program.threads {
        writeln!(out, "thread {}:", t.name).unwrap();
        for i in &t.instructions {
            writeln!(out, "  {}", instruction(i)).unwrap();
        }
    }
    writeln!(
        out,
        "{}: {}",
        program.assertion.quantifier.keyword(),
        cond(&program.assertion.cond)
    )
    .unwrap();
    out
}

pub(crate) fn instruction(i: &Instruction) -> String {
    match i {
        Instruction::Load { dst, loc, order } => format!("{dst} = load {loc} {order}"),
        Instruction::Store { loc, val, order } => format!("store {loc} {val} {order}"),
        Instruction::NaLoad { dst, loc } => format!("{dst} = na_load {loc}"),
        Instruction::NaStore { loc, val } => format!("na_store {loc} {val}"),
        Instruction::Rmw {
            op,
            dst,
            loc,
            val,
            order,
        } => format!("{dst} = {} {loc} {val} {order}", op.keyword()),
        Instruction::Cas {
            dst,
            loc,
            expected,
            desired,
            success,
            failure,
            ..
        } => format!(
            "{dst} = {} {loc} {expected} {desired} {success} {failure}",
            i.mnemonic()
        ),
        Instruction::Fence { order } => format!("fence {order}"),
    }
}

fn precedence(c: &Cond) -> u8 {
    match c {
        Cond::Or(..) => 0,
        Cond::And(..) => 1,
        Cond::Not(_) | Cond::Atom(_) => 2,
    }
}

fn wrap(c: &Cond, parens: bool) -> String {
    if parens {
        format!("({})", cond(c))
    } else {
        cond(c)
    }
}

/// Binary operators parse left-associatively, so a right operand of equal
/// precedence needs parentheses.
pub(crate) fn cond(c: &Cond) -> String {
    match c {
        Cond::Atom(Atom::Reg { thread, reg, value }) => format!("{thread}:{reg} = {value}"),
        Cond::Atom(Atom::Loc { loc, value }) => format!("{loc} = {value}"),
        Cond::Not(inner) => format!("!{}", wrap(inner, precedence(inner) < 2)),
        Cond::And(a, b) | Cond::Or(a, b) => {
            let p = precedence(c);
            let op = if p == 1 { "/\\" } else { "\\/" };
            format!(
                "{} {op} {}",
                wrap(a, precedence(a) < p),
                wrap(b, precedence(b) <= p)
            )
        }
    }
}
