use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use memlit_cli::dot::{candidate_dot, tso_trace_dot};
use memlit_cli::{compare, run, Model};
use memlit_core::cxx11::CandidateExecution;
use memlit_core::tso::{tso_witness, TraceStep};
use memlit_core::{parse_litmus, Options};
use tempfile::TempDir;

fn corpus(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file)
}

fn memlit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memlit")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const DEKKER: &str = "# expected: sc forbidden
# expected: tso allowed
name: dekker
init: x = 0 y = 0
thread P0:
  store x 1
  r1 = load y
thread P1:
  store y 1
  r2 = load x
exists: P0:r1 = 0 /\\ P1:r2 = 0
";

#[test]
fn dekker_verdicts_exit_zero() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "dekker.lit", DEKKER);
    let out = memlit(&["check", &f, "--model", "sc"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("sc     forbidden"));
    let out = memlit(&["check", &f, "--model", "tso"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("tso    allowed"));
}

#[test]
fn missing_file_exits_two() {
    let out = memlit(&["check", "/nonexistent/missing.lit"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.lit"));
}

#[test]
fn usage_parse_and_validation_errors_exit_two() {
    assert_eq!(code(&memlit(&["check"])), 2);
    assert_eq!(code(&memlit(&["check", "x.lit", "--model", "arm"])), 2);
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.lit", "name: t\ninit: x = 0\nthread P0:\n  store x\nexists: x = 1\n");
    let out = memlit(&["check", &f]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.lit:4:"));
    let f = write(
        &dir,
        "invalid.lit",
        "name: t\ninit: x = 0\nthread P0:\n  r = load x release\nexists: x = 1\n",
    );
    let out = memlit(&["check", &f]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("release on read operation"));
    let f = write(&dir, "ann.lit", &format!("# expected: sc perhaps\n{DEKKER}"));
    assert_eq!(code(&memlit(&["check", &f])), 2);
}

#[test]
fn mismatch_exits_one() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "wrong.lit", &DEKKER.replace("tso allowed", "tso forbidden"));
    let out = memlit(&["check", &f]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));
    // annotations for models that did not run are ignored
    assert_eq!(code(&memlit(&["check", &f, "--model", "sc"])), 0);
}

#[test]
fn limits_exit_three() {
    let f = corpus("mp_relaxed.lit").display().to_string();
    let out = memlit(&["check", &f, "--model", "cxx11", "--max-candidates", "2"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("candidates"));
    let out = memlit(&["check", &f, "--model", "tso", "--max-states", "5"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn options_reach_the_models() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "weak.lit",
        "# expected: sc allowed\nname: weak\ninit: x = 0\nthread P0:\n  r = cas_weak x 0 1\nexists: x = 0\n",
    );
    assert_eq!(code(&memlit(&["check", &f, "--model", "sc"])), 0);
    assert_eq!(code(&memlit(&["check", &f, "--model", "sc", "--no-weak-spurious"])), 1);

    let f = corpus("sb.lit").display().to_string();
    assert_eq!(code(&memlit(&["check", &f, "--model", "cxx11", "--strict-s"])), 0);
    let out = memlit(&["check", &f, "--model", "cxx11", "--no-strict-s"]);
    assert_eq!(code(&out), 1, "dropping the S embedding admits (0,0)");
}

#[test]
fn all_models_is_the_union_of_single_runs() {
    let opts = Options::default();
    for file in ["sb.lit", "race.lit", "two_cas.lit", "mp_fences.lit"] {
        let all = run(&corpus(file), &Model::ALL, &opts).unwrap();
        for model in Model::ALL {
            let single = run(&corpus(file), &[model], &opts).unwrap();
            let a = all.model(model).unwrap().result.as_ref().unwrap();
            let s = single.models[0].result.as_ref().unwrap();
            assert_eq!(a.outcomes, s.outcomes);
            assert_eq!(a.verdict, s.verdict);
        }
        let union_checks: Vec<_> = Model::ALL
            .iter()
            .flat_map(|&m| run(&corpus(file), &[m], &opts).unwrap().checks)
            .collect();
        let mut all_checks = all.checks.clone();
        all_checks.sort_by_key(|c| (c.annotation.model, c.annotation.line));
        let mut union_checks = union_checks;
        union_checks.sort_by_key(|c| (c.annotation.model, c.annotation.line));
        assert_eq!(all_checks, union_checks);
    }
}

#[test]
fn witnesses_satisfy_the_assertion() {
    let opts = Options::default();
    for file in ["sb.lit", "lb_relaxed.lit", "race.lit", "iriw_rel_acq.lit"] {
        let report = run(&corpus(file), &Model::ALL, &opts).unwrap();
        for m in &report.models {
            let r = m.result.as_ref().unwrap();
            for w in &r.verdict.witnesses {
                assert!(r.outcomes.contains(w));
                for atom in report.program.assertion.cond.atoms() {
                    let single = memlit_core::Cond::Atom(atom.clone());
                    // each atom is defined on the outcome
                    w.satisfies(&single).unwrap();
                }
                let holds = w.satisfies(&report.program.assertion.cond).unwrap();
                assert_eq!(holds, report.program.assertion.quantifier == memlit_core::Quantifier::Exists);
            }
        }
    }
}

#[test]
fn comparison_table() {
    let opts = Options::default();
    let cmp = compare(&corpus("sb.lit"), &opts).unwrap();
    let count = |m| cmp.report.model(m).unwrap().result.as_ref().unwrap().outcomes.len();
    assert_eq!((count(Model::Sc), count(Model::Tso)), (3, 4));
    assert_eq!(cmp.sc_in_tso, Some(true));
    assert!(cmp.counterexample.is_none());

    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "single.lit",
        "name: single\ninit: x = 0\nthread P0:\n  store x 1 relaxed\n  r = fetch_add x 2 relaxed\nexists: x = 3\n",
    );
    let cmp = compare(Path::new(&f), &opts).unwrap();
    let rows: Vec<_> = cmp
        .report
        .models
        .iter()
        .map(|m| {
            let r = m.result.as_ref().unwrap();
            (r.outcomes.clone(), r.verdict.kind)
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0] == w[1]));

    let cmp = compare(&corpus("mp_seq_cst.lit"), &opts).unwrap();
    let outcomes = |m| cmp.report.model(m).unwrap().result.as_ref().unwrap().outcomes.clone();
    assert_eq!(outcomes(Model::Cxx11), outcomes(Model::Sc));

    let out = memlit(&["check", &corpus("sb.lit").display().to_string(), "--compare"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("sc within tso: yes"), "{text}");
}

#[test]
fn json_summary() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("out.json");
    let out = memlit(&[
        "check",
        &corpus("race.lit").display().to_string(),
        "--json-ish",
        &json.display().to_string(),
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["name"], "race");
    assert_eq!(v["cxx11.verdict"], "allowed");
    assert_eq!(v["cxx11.racy"], true);
    assert_eq!(v["sc.racy"], false);
    assert_eq!(v["cxx11.expected"], serde_json::json!(["allowed", "racy"]));
    assert_eq!(v["cxx11.matches"], true);
    assert_eq!(v["sc.outcomes"].as_array().unwrap().len(), 2);
    assert_eq!(v["exit_code"], 0);
}

const MP_WITNESS: &str = "name: mp
init: x = 0 y = 0
thread A:
  store x 1 relaxed
  store y 2 release
thread B:
  ry = load y acquire
  rx = load x relaxed
exists: B:ry = 2 /\\ B:rx = 1
";

#[test]
fn message_passing_graph_is_stable() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "mp.lit", MP_WITNESS);
    let out_dir = dir.path().join("dots");
    let d = out_dir.display().to_string();
    assert_eq!(code(&memlit(&["check", &f, "--model", "cxx11", "--dot", &d])), 0);
    let first = fs::read_to_string(out_dir.join("mp.cxx11.dot")).unwrap();
    assert_eq!(code(&memlit(&["check", &f, "--model", "cxx11", "--dot", &d])), 0);
    let second = fs::read_to_string(out_dir.join("mp.cxx11.dot")).unwrap();
    assert_eq!(first, second);
    let golden = include_str!("golden/mp.cxx11.dot");
    assert_eq!(first, golden);
    // the release store of y synchronizes with the acquire load of y
    assert!(first.contains("e3 -> e4 [label=\"sw\"];"));
}

#[test]
fn empty_graphs_have_only_the_header() {
    let p = parse_litmus("name: empty\ninit: x = 0\nexists: x = 0\n").unwrap();
    let cand = CandidateExecution {
        events: Vec::new(),
        rf: Default::default(),
        mo: Vec::new(),
        sc_order: Vec::new(),
        registers: Vec::new(),
    };
    assert_eq!(candidate_dot(&p, &cand).unwrap(), "digraph \"empty\" {\n}\n");
    assert_eq!(tso_trace_dot(&p, &[]).unwrap(), "digraph \"empty\" {\n}\n");
}

fn run_program(p: &memlit_core::Program) -> memlit_cli::RunReport {
    let loaded = memlit_cli::Loaded {
        path: "inline".into(),
        program: p.clone(),
        annotations: Vec::new(),
    };
    memlit_cli::run_loaded(&loaded, &Model::ALL, &Options::default()).unwrap()
}

#[test]
fn dekker_tso_witness_flushes_after_both_loads() {
    let p = parse_litmus(DEKKER).unwrap();
    let report = run_program(&p);
    let tso = report.model(Model::Tso).unwrap().result.as_ref().unwrap();
    let target = tso.featured_outcome().unwrap();
    let trace = tso_witness(&p, target, &Options::default()).unwrap().unwrap();
    let last_load = trace
        .iter()
        .rposition(|s| matches!(s, TraceStep::Exec { index: 1, .. }))
        .unwrap();
    let first_flush = trace.iter().position(|s| matches!(s, TraceStep::Dequeue { .. })).unwrap();
    assert!(first_flush > last_load);
    let text = tso_trace_dot(&p, &trace).unwrap();
    assert_eq!(text, tso_trace_dot(&p, &trace).unwrap());
    assert_eq!(text.matches("label=\"prop\"").count(), 2);
    assert_eq!(text.matches("label=\"po\"").count(), 2);
}
