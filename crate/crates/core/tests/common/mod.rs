//! Fixture helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use impcat_core::models::Model;
use impcat_core::surface::files::{round_trip, validate};
use impcat_core::surface::{load_model, FileKind, SourceFile};
use serde::Deserialize;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| FileKind::of(p).is_some())
        .collect();
    out.sort();
    out
}

pub fn nat3() -> Model {
    load_model(&fixtures().join("corpus/nat3.model.json")).unwrap()
}

#[derive(Deserialize)]
pub struct Expected {
    pub code: String,
    pub at: Option<String>,
}

#[derive(Deserialize)]
pub struct Manifest {
    pub model: String,
    pub files: BTreeMap<String, Expected>,
}

pub fn manifest() -> Manifest {
    let text = std::fs::read_to_string(fixtures().join("bad/expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Parses, typechecks and round-trips one corpus file.
pub fn corpus_ok(path: &Path, model: &Model) -> Result<(), String> {
    validate(path, &model.sig).map_err(|d| d.render())?;
    let src = SourceFile::read(path).map_err(|e| e.to_string())?;
    round_trip(&src)
}

/// Checks one bad fixture against its manifest entry.
pub fn bad_ok(name: &str, want: &Expected, model: &Model) -> Result<(), String> {
    let path = fixtures().join("bad").join(name);
    let d = match validate(&path, &model.sig) {
        Ok(()) => return Err(format!("{name}: accepted")),
        Err(d) => d,
    };
    if d.diag.code != want.code {
        return Err(format!("{name}: code {} instead of {}", d.diag.code, want.code));
    }
    if let Some(at) = &want.at {
        let got = d.text.get(d.diag.span.start..d.diag.span.end).unwrap_or("");
        if got != at {
            return Err(format!("{name}: span covers {got:?} instead of {at:?}"));
        }
    }
    Ok(())
}
