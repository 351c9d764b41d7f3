//! Text and JSON renderings of run reports.

use std::fmt::Write;

use serde_json::{json, Map, Value};

use crate::{Comparison, Model, RunReport};

fn millis(d: std::time::Duration) -> f64 {
    (d.as_secs_f64() * 1e5).round() / 100.0
}

pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    writeln!(out, "test {}", report.name).unwrap();
    for m in &report.models {
        match &m.result {
            Ok(r) => {
                let ub = if r.outcomes.racy {
                    " (undefined behavior: data race)"
                } else {
                    ""
                };
                writeln!(
                    out,
                    "  {:<6} {}{ub}: {} outcomes, {} explored, {:.2} ms",
                    m.model.name(),
                    r.verdict.kind,
                    r.outcomes.len(),
                    r.stats.explored,
                    millis(r.elapsed)
                )
                .unwrap();
                for o in &r.outcomes.outcomes {
                    let mark = if r.verdict.witnesses.contains(o) { '*' } else { ' ' };
                    writeln!(out, "    {mark} {o}").unwrap();
                }
                if let Some(race) = &r.race {
                    let layout = memlit_core::compile::Compiled::new(&report.program)
                        .expect("program ran")
                        .layout;
                    for &(a, b) in &race.races {
                        let ev = &race.candidate.events;
                        writeln!(out, "    race: {} | {}", ev[a].label(&layout), ev[b].label(&layout)).unwrap();
                    }
                }
            }
            Err(e) => writeln!(out, "  {:<6} incomplete: {e}", m.model.name()).unwrap(),
        }
    }
    for c in &report.checks {
        let got = c.actual.map_or("unknown", |a| a.keyword());
        let status = match c.actual {
            None => "not checked",
            Some(_) if c.matches() => "ok",
            Some(_) => "MISMATCH",
        };
        writeln!(
            out,
            "  expected {} {}: got {got}, {status}",
            c.annotation.model,
            c.annotation.expect.keyword()
        )
        .unwrap();
    }
    out
}

pub fn render_comparison(cmp: &Comparison) -> String {
    let mut out = String::new();
    writeln!(out, "test {}", cmp.report.name).unwrap();
    writeln!(out, "  {:<6} {:>8}  {:<10} racy", "model", "outcomes", "verdict").unwrap();
    for m in &cmp.report.models {
        match &m.result {
            Ok(r) => writeln!(
                out,
                "  {:<6} {:>8}  {:<10} {}",
                m.model.name(),
                r.outcomes.len(),
                r.verdict.kind.keyword(),
                if r.outcomes.racy { "yes" } else { "no" }
            )
            .unwrap(),
            Err(e) => writeln!(out, "  {:<6} incomplete: {e}", m.model.name()).unwrap(),
        }
    }
    match (cmp.sc_in_tso, &cmp.counterexample) {
        (Some(true), _) => writeln!(out, "  sc within tso: yes").unwrap(),
        (Some(false), Some(o)) => writeln!(out, "  sc within tso: no, tso misses {o}").unwrap(),
        _ => writeln!(out, "  sc within tso: unknown").unwrap(),
    }
    out
}

/// Flat key/value summary; see the README for the schema.
pub fn to_json(report: &RunReport, comparison: Option<&Comparison>, exit_code: i32) -> Value {
    let mut map = Map::new();
    map.insert("name".into(), json!(report.name));
    map.insert(
        "models".into(),
        json!(report.models.iter().map(|m| m.model.name()).collect::<Vec<_>>()),
    );
    for m in &report.models {
        let key = |k: &str| format!("{}.{k}", m.model.name());
        match &m.result {
            Ok(r) => {
                map.insert(key("verdict"), json!(r.verdict.kind.keyword()));
                map.insert(key("outcome_count"), json!(r.outcomes.len()));
                map.insert(
                    key("outcomes"),
                    json!(r.outcomes.iter().map(|o| o.to_string()).collect::<Vec<_>>()),
                );
                map.insert(
                    key("witnesses"),
                    json!(r.verdict.witnesses.iter().map(|o| o.to_string()).collect::<Vec<_>>()),
                );
                map.insert(key("racy"), json!(r.outcomes.racy));
                map.insert(key("explored"), json!(r.stats.explored));
                map.insert(key("executions"), json!(r.stats.executions));
                map.insert(key("millis"), json!(millis(r.elapsed)));
            }
            Err(e) => {
                map.insert(key("verdict"), json!("incomplete"));
                map.insert(key("limit"), json!(e));
            }
        }
    }
    for model in Model::ALL {
        let checks: Vec<_> = report.checks.iter().filter(|c| c.annotation.model == model).collect();
        if checks.is_empty() {
            continue;
        }
        map.insert(
            format!("{model}.expected"),
            json!(checks.iter().map(|c| c.annotation.expect.keyword()).collect::<Vec<_>>()),
        );
        map.insert(format!("{model}.matches"), json!(checks.iter().all(|c| c.matches())));
    }
    if let Some(cmp) = comparison {
        map.insert("compare.sc_in_tso".into(), json!(cmp.sc_in_tso));
        map.insert(
            "compare.counterexample".into(),
            json!(cmp.counterexample.as_ref().map(|o| o.to_string())),
        );
    }
    map.insert("warnings".into(), json!(report.warnings()));
    map.insert("exit_code".into(), json!(exit_code));
    Value::Object(map)
}
