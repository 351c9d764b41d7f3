use std::collections::BTreeMap;

use memlit_core::cxx11::{enumerate_cxx11, explore_cxx11};
use memlit_core::litmus::{is_keyword, parse_litmus_bytes};
use memlit_core::sc::enumerate_sc;
use memlit_core::tso::enumerate_tso;
use memlit_core::{
    parse_litmus, print_litmus, validate, Assertion, Atom, Cond, Instruction, Loc, MemoryOrder, Operand,
    Options, Program, Quantifier, Reg, RmwOp, Thread,
};
use proptest::prelude::*;

const LOCS: &[&str] = &["x", "y", "z"];
const REGS: &[&str] = &["r0", "r1", "r2"];

fn order() -> impl Strategy<Value = MemoryOrder> {
    prop::sample::select(MemoryOrder::ALL.to_vec())
}

fn loc() -> impl Strategy<Value = Loc> {
    prop::sample::select(LOCS).prop_map(Loc::new)
}

fn reg() -> impl Strategy<Value = Reg> {
    prop::sample::select(REGS).prop_map(Reg::new)
}

fn operand() -> impl Strategy<Value = Operand> {
    prop_oneof![any::<u8>().prop_map(Operand::Lit), reg().prop_map(Operand::Reg)]
}

fn rmw_op() -> impl Strategy<Value = RmwOp> {
    prop::sample::select(vec![
        RmwOp::Exchange,
        RmwOp::FetchAdd,
        RmwOp::FetchSub,
        RmwOp::FetchAnd,
        RmwOp::FetchOr,
        RmwOp::FetchXor,
    ])
}

fn instruction() -> BoxedStrategy<Instruction> {
    prop_oneof![
        (reg(), loc(), order()).prop_map(|(dst, loc, order)| Instruction::Load { dst, loc, order }),
        (loc(), operand(), order()).prop_map(|(loc, val, order)| Instruction::Store { loc, val, order }),
        (reg(), loc()).prop_map(|(dst, loc)| Instruction::NaLoad { dst, loc }),
        (loc(), operand()).prop_map(|(loc, val)| Instruction::NaStore { loc, val }),
        (rmw_op(), reg(), loc(), operand(), order())
            .prop_map(|(op, dst, loc, val, order)| Instruction::Rmw { op, dst, loc, val, order }),
        (any::<bool>(), reg(), loc(), any::<u8>(), any::<u8>(), order(), order()).prop_map(
            |(weak, dst, loc, expected, desired, success, failure)| Instruction::Cas {
                weak,
                dst,
                loc,
                expected,
                desired,
                success,
                failure,
            }
        ),
        order().prop_map(|order| Instruction::Fence { order }),
    ]
    .boxed()
}

fn cond(threads: usize) -> impl Strategy<Value = Cond> {
    let atom = prop_oneof![
        (0..threads.max(1), reg(), any::<u8>()).prop_map(|(t, reg, value)| Cond::Atom(Atom::Reg {
            thread: format!("P{t}"),
            reg,
            value,
        })),
        (loc(), any::<u8>()).prop_map(|(loc, value)| Cond::Atom(Atom::Loc { loc, value })),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Cond::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Cond::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Cond::or(a, b)),
        ]
    })
}

fn name() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_]{0,6}".prop_filter("keyword", |s| !is_keyword(s))
}

fn program_with(
    threads: std::ops::Range<usize>,
    len: std::ops::Range<usize>,
    instr: BoxedStrategy<Instruction>,
) -> impl Strategy<Value = Program> {
    (threads, name(), prop::collection::btree_map(loc(), any::<u8>(), 0..3)).prop_flat_map(
        move |(n, name, init)| {
            (
                prop::collection::vec(prop::collection::vec(instr.clone(), len.clone()), n),
                cond(n),
                any::<bool>(),
                Just(name),
                Just(init),
            )
                .prop_map(|(bodies, cond, exists, name, init)| Program {
                    name,
                    init,
                    threads: bodies
                        .into_iter()
                        .enumerate()
                        .map(|(i, instructions)| Thread {
                            name: format!("P{i}"),
                            instructions,
                        })
                        .collect(),
                    assertion: Assertion {
                        quantifier: if exists { Quantifier::Exists } else { Quantifier::Forall },
                        cond,
                    },
                })
        },
    )
}

/// Small well-formed programs: atomics with legal orders, registers
/// loaded before use.
fn valid_program() -> impl Strategy<Value = Program> {
    let instr = prop_oneof![
        (reg(), loc(), prop::sample::select(vec![MemoryOrder::Relaxed, MemoryOrder::Acquire, MemoryOrder::SeqCst]))
            .prop_map(|(dst, loc, order)| Instruction::Load { dst, loc, order }),
        (loc(), 1..3u8, prop::sample::select(vec![MemoryOrder::Relaxed, MemoryOrder::Release, MemoryOrder::SeqCst]))
            .prop_map(|(loc, v, order)| Instruction::Store { loc, val: Operand::Lit(v), order }),
        (reg(), loc(), prop::sample::select(vec![MemoryOrder::Relaxed, MemoryOrder::AcqRel, MemoryOrder::SeqCst]))
            .prop_map(|(dst, loc, order)| Instruction::Rmw {
                op: RmwOp::FetchAdd,
                dst,
                loc,
                val: Operand::Lit(1),
                order
            }),
        (reg(), loc(), 0..2u8, 1..3u8).prop_map(|(dst, loc, expected, desired)| Instruction::Cas {
            weak: false,
            dst,
            loc,
            expected,
            desired,
            success: MemoryOrder::SeqCst,
            failure: MemoryOrder::SeqCst,
        }),
        prop::sample::select(vec![MemoryOrder::Release, MemoryOrder::Acquire, MemoryOrder::SeqCst])
            .prop_map(|order| Instruction::Fence { order }),
    ]
    .boxed();
    program_with(1..4, 1..4, instr).prop_filter("valid", |p| validate(p).is_empty())
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(p in program_with(0..4, 0..6, instruction())) {
        let text = print_litmus(&p);
        let back = parse_litmus(&text).map_err(|e| TestCaseError::fail(format!("{e:?}\n{text}")))?;
        prop_assert_eq!(back, p);
    }

    #[test]
    fn parser_errors_stay_in_bounds(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        if let Err(errors) = parse_litmus_bytes(&bytes) {
            prop_assert!(!errors.is_empty());
            for e in errors {
                prop_assert!(e.span.start <= e.span.end && e.span.end <= bytes.len(), "{:?}", e);
                prop_assert!(e.span.line >= 1 && e.span.column >= 1);
            }
        }
    }

    #[test]
    fn mutated_corpus_text_never_panics(cut in 0usize..400, junk in "[ -~\n]{0,12}") {
        let src = "name: t\ninit: x = 0\nthread P0:\n  store x 1 release\n  r1 = cas_weak x 1 2 acq_rel\nthread P1:\n  r2 = load x acquire\nexists: P0:r1 = 1 /\\ !(P1:r2 = 0 \\/ x = 2)\n";
        let cut = cut.min(src.len());
        let text = format!("{}{}{}", &src[..cut], junk, &src[cut..]);
        let _ = parse_litmus(&text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sc_outcomes_are_tso_outcomes(p in valid_program()) {
        let opts = Options::default();
        let sc = enumerate_sc(&p, &opts).unwrap().outcomes;
        let tso = enumerate_tso(&p, &opts).unwrap().outcomes;
        prop_assert!(sc.is_subset(&tso));
    }

    #[test]
    fn seq_cst_cxx11_matches_sc(p in valid_program()) {
        let p = p.all_seq_cst();
        let opts = Options::default();
        let sc = enumerate_sc(&p, &opts).unwrap().outcomes;
        let cxx = enumerate_cxx11(&p, &opts).unwrap().outcomes;
        prop_assert_eq!(cxx.outcomes, sc.outcomes);
    }

    #[test]
    fn cxx11_outcomes_include_sc(p in valid_program()) {
        let opts = Options::default();
        let sc = enumerate_sc(&p, &opts).unwrap().outcomes;
        let cxx = enumerate_cxx11(&p, &opts).unwrap().outcomes;
        prop_assert!(sc.is_subset(&cxx));
    }

    #[test]
    fn witnesses_agree_on_values(p in valid_program()) {
        let run = explore_cxx11(&p, &Options::default()).unwrap();
        for cand in run.witnesses.values() {
            for (&r, &w) in &cand.rf {
                prop_assert_eq!(cand.events[r].read_value, cand.events[w].written_value);
                prop_assert_eq!(cand.events[r].loc, cand.events[w].loc);
            }
            let mut per_loc: BTreeMap<_, usize> = BTreeMap::new();
            for e in cand.events.iter().filter(|e| e.is_write()) {
                *per_loc.entry(e.loc).or_default() += 1;
            }
            for (l, ws) in cand.mo.iter().enumerate() {
                prop_assert_eq!(ws.len(), per_loc[&Some(l)]);
                prop_assert_eq!(ws[0], l);
            }
        }
    }
}
