//! `# expected: <model> <verdict>` comments.

use memlit_core::VerdictKind;

use crate::{CliError, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Verdict(VerdictKind),
    /// `racy` or `race-free`.
    Racy(bool),
}

impl Expectation {
    pub fn keyword(self) -> &'static str {
        match self {
            Expectation::Verdict(k) => k.keyword(),
            Expectation::Racy(true) => "racy",
            Expectation::Racy(false) => "race-free",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Annotation {
    pub model: Model,
    pub expect: Expectation,
    pub line: usize,
}

/// Collects annotations from comment lines. A comment starting with
/// `expected:` must be well formed.
pub fn parse_annotations(text: &str) -> Result<Vec<Annotation>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.find('#').map(|p| line[p + 1..].trim()) else {
            continue;
        };
        let Some(rest) = comment.strip_prefix("expected:") else {
            continue;
        };
        let bad = || CliError::Annotation {
            line: i + 1,
            text: comment.to_string(),
        };
        let words: Vec<&str> = rest.split_whitespace().collect();
        let [model, verdict] = words[..] else {
            return Err(bad());
        };
        let model = Model::from_name(model).ok_or_else(bad)?;
        let expect = match verdict {
            "racy" => Expectation::Racy(true),
            "race-free" => Expectation::Racy(false),
            v => Expectation::Verdict(VerdictKind::from_keyword(v).ok_or_else(bad)?),
        };
        out.push(Annotation {
            model,
            expect,
            line: i + 1,
        });
    }
    Ok(out)
}
