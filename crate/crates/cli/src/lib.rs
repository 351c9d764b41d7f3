//! Driver behind the `memlit` command: loads a litmus file, runs the
//! selected models, checks `# expected:` annotations and renders reports.

pub mod annotation;
pub mod dot;
pub mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use memlit_core::cxx11::{explore_cxx11, CandidateExecution, RacyWitness};
use memlit_core::litmus::parse_litmus_bytes;
use memlit_core::sc::enumerate_sc;
use memlit_core::tso::enumerate_tso;
use memlit_core::{
    eval_assertion, validate, Diagnostic, Error, Options, Outcome, OutcomeSet, ParseError, Program, Stats,
    Verdict,
};

use annotation::{parse_annotations, Annotation, Expectation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    Sc,
    Tso,
    Cxx11,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Sc, Model::Tso, Model::Cxx11];

    pub fn name(self) -> &'static str {
        match self {
            Model::Sc => "sc",
            Model::Tso => "tso",
            Model::Cxx11 => "cxx11",
        }
    }

    pub fn from_name(name: &str) -> Option<Model> {
        Model::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failures that stop a run before any model executes. All map to exit
/// code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{}", .errors.iter().map(|e| format!("{path}:{e}")).collect::<Vec<_>>().join("\n"))]
    Parse { path: String, errors: Vec<ParseError> },
    #[error("{}", .diagnostics.iter().map(|d| format!("{path}: {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid { path: String, diagnostics: Vec<Diagnostic> },
    #[error("line {line}: malformed annotation '{text}'")]
    Annotation { line: usize, text: String },
    #[error("{0}")]
    Backend(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// A parsed and validated litmus file with its annotations.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub path: String,
    pub program: Program,
    pub annotations: Vec<Annotation>,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    let program = parse_litmus_bytes(&bytes).map_err(|errors| CliError::Parse {
        path: shown.clone(),
        errors,
    })?;
    let diagnostics = validate(&program);
    if !diagnostics.is_empty() {
        return Err(CliError::Invalid {
            path: shown,
            diagnostics,
        });
    }
    let annotations = parse_annotations(&String::from_utf8_lossy(&bytes))?;
    Ok(Loaded {
        path: shown,
        program,
        annotations,
    })
}

/// Result of one model that ran to completion.
#[derive(Debug, Clone)]
pub struct ModelResult {
    pub outcomes: OutcomeSet,
    pub verdict: Verdict,
    pub stats: Stats,
    pub elapsed: Duration,
    /// Consistent executions per outcome (axiomatic model only).
    pub executions: BTreeMap<Outcome, CandidateExecution>,
    pub race: Option<RacyWitness>,
}

impl ModelResult {
    /// Outcome worth drawing: the first assertion witness, else the first
    /// outcome.
    pub fn featured_outcome(&self) -> Option<&Outcome> {
        self.verdict.witnesses.first().or_else(|| self.outcomes.iter().next())
    }
}

#[derive(Debug, Clone)]
pub struct ModelReport {
    pub model: Model,
    /// `Err` carries the limit message when exploration was cut short.
    pub result: Result<ModelResult, String>,
}

/// An annotation together with what the run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub annotation: Annotation,
    /// `None` when the model hit a limit.
    pub actual: Option<Expectation>,
}

impl Check {
    pub fn matches(&self) -> bool {
        self.actual == Some(self.annotation.expect)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub program: Program,
    pub models: Vec<ModelReport>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn model(&self, model: Model) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == model)
    }

    pub fn warnings(&self) -> Vec<String> {
        self.models
            .iter()
            .filter_map(|m| m.result.as_ref().err().map(|e| format!("{}: {e}", m.model)))
            .collect()
    }

    /// 3 if a limit was hit, 1 if an annotation disagrees, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.models.iter().any(|m| m.result.is_err()) {
            3
        } else if self.checks.iter().any(|c| !c.matches()) {
            1
        } else {
            0
        }
    }
}

fn run_model(program: &Program, model: Model, opts: &Options) -> Result<Result<ModelResult, String>, CliError> {
    let start = Instant::now();
    let run = match model {
        Model::Sc => enumerate_sc(program, opts).map(|r| (r, BTreeMap::new(), None)),
        Model::Tso => enumerate_tso(program, opts).map(|r| (r, BTreeMap::new(), None)),
        Model::Cxx11 => explore_cxx11(program, opts).map(|r| (r.run, r.witnesses, r.racy)),
    };
    let (run, executions, race) = match run {
        Ok(r) => r,
        Err(e @ Error::LimitExceeded { .. }) => return Ok(Err(e.to_string())),
        Err(e) => return Err(CliError::Backend(e)),
    };
    let verdict = eval_assertion(&program.assertion, &run.outcomes).map_err(CliError::Backend)?;
    Ok(Ok(ModelResult {
        outcomes: run.outcomes,
        verdict,
        stats: run.stats,
        elapsed: start.elapsed(),
        executions,
        race,
    }))
}

/// Runs `models` in order and checks the annotations for those models.
pub fn run_loaded(loaded: &Loaded, models: &[Model], opts: &Options) -> Result<RunReport, CliError> {
    let program = &loaded.program;
    let mut reports = Vec::new();
    for &model in models {
        reports.push(ModelReport {
            model,
            result: run_model(program, model, opts)?,
        });
    }
    let checks = loaded
        .annotations
        .iter()
        .filter_map(|a| {
            let m = reports.iter().find(|r| r.model == a.model)?;
            let actual = m.result.as_ref().ok().map(|r| match a.expect {
                Expectation::Verdict(_) => Expectation::Verdict(r.verdict.kind),
                Expectation::Racy(_) => Expectation::Racy(r.outcomes.racy),
            });
            Some(Check {
                annotation: *a,
                actual,
            })
        })
        .collect();
    Ok(RunReport {
        name: program.name.clone(),
        program: program.clone(),
        models: reports,
        checks,
    })
}

pub fn run(path: &Path, models: &[Model], opts: &Options) -> Result<RunReport, CliError> {
    run_loaded(&load(path)?, models, opts)
}

/// All models side by side, plus the SC ⊆ TSO check.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: RunReport,
    /// `None` if either model hit a limit.
    pub sc_in_tso: Option<bool>,
    /// An SC outcome TSO cannot produce.
    pub counterexample: Option<Outcome>,
}

pub fn compare_loaded(loaded: &Loaded, opts: &Options) -> Result<Comparison, CliError> {
    let report = run_loaded(loaded, &Model::ALL, opts)?;
    let ok = |m| report.model(m).and_then(|r| r.result.as_ref().ok());
    let (sc_in_tso, counterexample) = match (ok(Model::Sc), ok(Model::Tso)) {
        (Some(sc), Some(tso)) => {
            let missing = sc.outcomes.difference(&tso.outcomes).next().cloned();
            (Some(missing.is_none()), missing)
        }
        _ => (None, None),
    };
    Ok(Comparison {
        report,
        sc_in_tso,
        counterexample,
    })
}

pub fn compare(path: &Path, opts: &Options) -> Result<Comparison, CliError> {
    compare_loaded(&load(path)?, opts)
}
