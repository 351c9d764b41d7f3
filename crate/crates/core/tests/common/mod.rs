#![allow(dead_code)]

use std::path::PathBuf;

use memlit_core::{parse_litmus, Program};

pub struct Entry {
    pub file: String,
    pub text: String,
    pub program: Program,
    /// `(model, verdict)` pairs from `# expected:` comments.
    pub expected: Vec<(String, String)>,
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus() -> Vec<Entry> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "lit"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).unwrap();
            let program = parse_litmus(&text).unwrap_or_else(|e| panic!("{}: {e:?}", path.display()));
            let expected = text
                .lines()
                .filter_map(|l| l.trim().strip_prefix('#')?.trim().strip_prefix("expected:"))
                .map(|rest| {
                    let mut words = rest.split_whitespace();
                    (words.next().unwrap().to_string(), words.next().unwrap().to_string())
                })
                .collect();
            Entry {
                file: path.file_name().unwrap().to_string_lossy().into_owned(),
                text,
                program,
                expected,
            }
        })
        .collect()
}
