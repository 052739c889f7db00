use crate::CliError;
use forge_core::families::hamiltonian_of;
use forge_core::poly::BivariatePoly;
use forge_core::{FamilySpec, Hamiltonian, PolyMap};
use serde::Deserialize;
use serde_json::Value;
use std::path::Path;

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn spec_text(path: Option<&Path>) -> Result<String, CliError> {
    read(path.ok_or_else(|| CliError::Input("--spec is required for this command".into()))?)
}

pub fn json(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))
}

pub fn poly(field: &str, text: &str) -> Result<BivariatePoly, CliError> {
    text.parse()
        .map_err(|e| CliError::Input(format!("{field}: {e}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HandMap {
    f1: String,
    f2: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    h: String,
}

/// What a JSON object describes, decided by its keys: `branch` for a family
/// spec, `f1`/`f2` for a hand-written map, `h` for a bare Hamiltonian.
pub enum Subject {
    Family(FamilySpec, PolyMap),
    Map(PolyMap),
    Bare(Hamiltonian),
}

fn decode<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, CliError> {
    T::deserialize(v).map_err(|e| CliError::Input(e.to_string()))
}

pub fn subject(v: &Value) -> Result<Subject, CliError> {
    let Some(obj) = v.as_object() else {
        return Err(CliError::Input("expected a JSON object".into()));
    };
    if obj.contains_key("branch") {
        let spec: FamilySpec = decode(v)?;
        let f = spec.build().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Subject::Family(spec, f))
    } else if obj.contains_key("f1") || obj.contains_key("f2") {
        let m: HandMap = decode(v)?;
        Ok(Subject::Map(PolyMap::new(poly("f1", &m.f1)?, poly("f2", &m.f2)?)))
    } else if obj.contains_key("h") {
        let raw: RawHamiltonian = decode(v)?;
        Hamiltonian::new(poly("h", &raw.h)?)
            .map(Subject::Bare)
            .map_err(|e| CliError::Input(e.to_string()))
    } else {
        Err(CliError::Input(
            "expected a family spec (\"branch\"), a map (\"f1\", \"f2\") or a Hamiltonian (\"h\")".into(),
        ))
    }
}

impl Subject {
    pub fn hamiltonian(&self) -> Result<Hamiltonian, CliError> {
        match self {
            Subject::Family(_, f) | Subject::Map(f) => hamiltonian_of(f).map_err(|e| CliError::Input(e.to_string())),
            Subject::Bare(h) => Ok(h.clone()),
        }
    }
}
