mod common;

use memlit_core::cxx11::enumerate_cxx11;
use memlit_core::sc::enumerate_sc;
use memlit_core::tso::enumerate_tso;
use memlit_core::{eval_assertion, Instruction, MemoryOrder, ModelRun, Options, Program};

fn run(model: &str, p: &Program) -> ModelRun {
    let opts = Options::default();
    match model {
        "sc" => enumerate_sc(p, &opts),
        "tso" => enumerate_tso(p, &opts),
        "cxx11" => enumerate_cxx11(p, &opts),
        other => panic!("unknown model {other}"),
    }
    .unwrap()
}

#[test]
fn annotations_hold() {
    let corpus = common::corpus();
    assert!(corpus.len() >= 20);
    let mut failures = Vec::new();
    for e in &corpus {
        assert!(!e.expected.is_empty(), "{} has no expectations", e.file);
        for (model, want) in &e.expected {
            let r = run(model, &e.program);
            let got = match want.as_str() {
                "racy" | "race-free" => if r.outcomes.racy { "racy" } else { "race-free" }.to_string(),
                _ => eval_assertion(&e.program.assertion, &r.outcomes).unwrap().kind.keyword().to_string(),
            };
            if &got != want {
                failures.push(format!("{}: {model} expected {want}, got {got}", e.file));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn sc_outcomes_are_tso_outcomes() {
    let mut strict = 0;
    for e in common::corpus() {
        let sc = run("sc", &e.program).outcomes;
        let tso = run("tso", &e.program).outcomes;
        assert!(sc.is_subset(&tso), "{}", e.file);
        if tso.len() > sc.len() {
            strict += 1;
        }
    }
    assert!(strict > 0);
}

#[test]
fn seq_cst_cxx11_equals_sc() {
    for e in common::corpus() {
        let p = e.program.all_seq_cst();
        assert_eq!(run("cxx11", &p).outcomes.outcomes, run("sc", &p).outcomes.outcomes, "{}", e.file);
    }
}

/// One step down the order lattice for instruction `i`, if possible.
fn weaken(ins: &Instruction) -> Vec<Instruction> {
    use MemoryOrder::*;
    let down = |o: MemoryOrder, read: bool, write: bool| -> Option<MemoryOrder> {
        match o {
            SeqCst if read && write => Some(AcqRel),
            SeqCst if read => Some(Acquire),
            SeqCst => Some(Release),
            Acquire | Release | AcqRel | Consume => Some(Relaxed),
            Relaxed => None,
        }
    };
    match ins {
        Instruction::Load { dst, loc, order } => down(*order, true, false)
            .map(|o| Instruction::Load { dst: dst.clone(), loc: loc.clone(), order: o })
            .into_iter()
            .collect(),
        Instruction::Store { loc, val, order } => down(*order, false, true)
            .map(|o| Instruction::Store { loc: loc.clone(), val: val.clone(), order: o })
            .into_iter()
            .collect(),
        Instruction::Rmw { op, dst, loc, val, order } => down(*order, true, true)
            .map(|o| Instruction::Rmw { op: *op, dst: dst.clone(), loc: loc.clone(), val: val.clone(), order: o })
            .into_iter()
            .collect(),
        Instruction::Cas { weak, dst, loc, expected, desired, success, failure } => {
            let mut out = Vec::new();
            if let Some(s) = down(*success, true, true) {
                out.push(Instruction::Cas {
                    weak: *weak,
                    dst: dst.clone(),
                    loc: loc.clone(),
                    expected: *expected,
                    desired: *desired,
                    success: s,
                    failure: *failure,
                });
            }
            if let Some(f) = down(*failure, true, false) {
                out.push(Instruction::Cas {
                    weak: *weak,
                    dst: dst.clone(),
                    loc: loc.clone(),
                    expected: *expected,
                    desired: *desired,
                    success: *success,
                    failure: f,
                });
            }
            out
        }
        Instruction::Fence { order } => down(*order, true, true)
            .map(|o| Instruction::Fence { order: o })
            .into_iter()
            .collect(),
        Instruction::NaLoad { .. } | Instruction::NaStore { .. } => Vec::new(),
    }
}

#[test]
fn weakening_an_order_never_loses_outcomes() {
    for e in common::corpus() {
        let base = run("cxx11", &e.program).outcomes;
        for (t, thread) in e.program.threads.iter().enumerate() {
            for (i, ins) in thread.instructions.iter().enumerate() {
                for weaker in weaken(ins) {
                    let mut p = e.program.clone();
                    p.threads[t].instructions[i] = weaker.clone();
                    if !memlit_core::validate(&p).is_empty() {
                        continue;
                    }
                    let w = run("cxx11", &p).outcomes;
                    assert!(base.is_subset(&w), "{}: weakening {ins:?} to {weaker:?}", e.file);
                }
            }
        }
    }
}
