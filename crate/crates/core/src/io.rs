//! Automaton files: UTF-8 JSON with keys `alphabet`, `states`, `prefix`,
//! `cycle`. Each step table is `{"delta": n×k, "rho": n×k}` with 0-based
//! state and letter indices.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::automaton::{Automaton, ModelError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed automaton JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid automaton: {0}")]
    Invalid(#[from] ModelError),
}

/// Parses and validates an automaton.
pub fn from_json(text: &str) -> Result<Automaton, FormatError> {
    let aut: Automaton = serde_json::from_str(text)?;
    aut.validate()?;
    Ok(aut)
}

pub fn to_json(aut: &Automaton) -> String {
    let mut text = serde_json::to_string_pretty(aut).expect("automata always serialize");
    text.push('\n');
    text
}

pub fn load(path: impl AsRef<Path>) -> Result<Automaton, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.display().to_string(),
        source,
    })?;
    from_json(&text)
}

pub fn save(aut: &Automaton, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, to_json(aut)).map_err(|source| FormatError::Write {
        path: path.display().to_string(),
        source,
    })
}
