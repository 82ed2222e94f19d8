//! Batch harness around `liftkit-core`: JSON documents, the corrector
//! registry, the `ultra` drivers and the ε–δ sweep.
//!
//! Exit codes: 0 success, 1 usage or schema error, 2 violated mathematical
//! precondition.

pub mod commands;
pub mod doc;
pub mod registry;
pub mod sweep;

use std::fmt;
use std::path::Path;

use liftkit_core::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable files, schema violations.
    Usage(String),
    /// The input is well-formed but violates a precondition.
    Math(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Math(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Math(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_precondition() {
            Failure::Math(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses JSON, naming the offending field path on schema errors.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Outcome<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            usage(format!("{origin}: {inner}"))
        } else {
            usage(format!("{origin}: at {path}: {inner}"))
        }
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// Writes `text` to `path`, or to stdout without one.
pub fn emit(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
