//! Graphviz output for witness executions.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use memlit_core::compile::Compiled;
use memlit_core::cxx11::{compute_sw, CandidateExecution};
use memlit_core::tso::{tso_witness, TraceStep};
use memlit_core::{Error, Options, Program};

use crate::{CliError, Model, RunReport};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn finish(name: &str, nodes: &[(String, String)], edges: &[(String, String, &str)]) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    if !nodes.is_empty() {
        writeln!(out, "  node [shape=box];").unwrap();
    }
    for (id, label) in nodes {
        writeln!(out, "  {id} [label={}];", quote(label)).unwrap();
    }
    for (a, b, label) in edges {
        writeln!(out, "  {a} -> {b} [label={}];", quote(label)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Events of an axiomatic execution with immediate sb, rf, immediate mo and
/// sw edges.
pub fn candidate_dot(program: &Program, cand: &CandidateExecution) -> Result<String, Error> {
    let layout = Compiled::new(program)?.layout;
    let node = |id: usize| format!("e{id}");
    let nodes: Vec<_> = cand.events.iter().map(|e| (node(e.id), e.label(&layout))).collect();
    let mut edges = Vec::new();
    for pair in cand.events.windows(2) {
        if pair[0].thread.is_some() && pair[0].thread == pair[1].thread {
            edges.push((node(pair[0].id), node(pair[1].id), "sb"));
        }
    }
    for (&r, &w) in &cand.rf {
        edges.push((node(w), node(r), "rf"));
    }
    for ws in &cand.mo {
        for pair in ws.windows(2) {
            edges.push((node(pair[0]), node(pair[1]), "mo"));
        }
    }
    for (a, b) in compute_sw(cand).pairs() {
        edges.push((node(a), node(b), "sw"));
    }
    Ok(finish(&program.name, &nodes, &edges))
}

/// Steps of a TSO run in execution order, with program-order edges between
/// a thread's instructions and propagation edges from a store to the
/// moment its write reaches memory.
pub fn tso_trace_dot(program: &Program, trace: &[TraceStep]) -> Result<String, Error> {
    let layout = Compiled::new(program)?.layout;
    let node = |k: usize| format!("s{k}");
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut last_exec: Vec<Option<usize>> = vec![None; program.threads.len()];
    for (k, step) in trace.iter().enumerate() {
        match *step {
            TraceStep::Exec { thread, index } => {
                let t = &program.threads[thread];
                nodes.push((node(k), format!("{}. {}: {}", k + 1, t.name, t.instructions[index])));
                if let Some(prev) = last_exec[thread] {
                    edges.push((node(prev), node(k), "po"));
                }
                last_exec[thread] = Some(k);
            }
            TraceStep::Dequeue {
                thread,
                index,
                loc,
                value,
            } => {
                let t = &program.threads[thread];
                nodes.push((
                    node(k),
                    format!("{}. {}: flush {}={value}", k + 1, t.name, layout.locs[loc]),
                ));
                let origin = trace[..k]
                    .iter()
                    .position(|s| *s == TraceStep::Exec { thread, index });
                if let Some(o) = origin {
                    edges.push((node(o), node(k), "prop"));
                }
            }
        }
    }
    Ok(finish(&program.name, &nodes, &edges))
}

/// Writes `<name>.<model>.dot` into `dir` for every model that has a
/// drawable witness: one axiomatic execution or one TSO run reaching the
/// featured outcome. SC runs are not drawn.
pub fn export_dot(report: &RunReport, dir: &Path, opts: &Options) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for m in &report.models {
        let Ok(r) = &m.result else { continue };
        let Some(outcome) = r.featured_outcome() else { continue };
        let text = match m.model {
            Model::Sc => continue,
            Model::Cxx11 => match r.executions.get(outcome) {
                Some(cand) => candidate_dot(&report.program, cand).map_err(CliError::Backend)?,
                None => continue,
            },
            Model::Tso => match tso_witness(&report.program, outcome, opts).map_err(CliError::Backend)? {
                Some(trace) => tso_trace_dot(&report.program, &trace).map_err(CliError::Backend)?,
                None => continue,
            },
        };
        let path = dir.join(format!("{}.{}.dot", report.name, m.model));
        std::fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
