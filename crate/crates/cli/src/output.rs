//! Output envelope, number formatting and file destinations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hvstab_core::trigpoly::{Laurent, Poly};
use hvstab_core::Rational;
use serde_json::{Map, Number, Value};

use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "HVSTAB_OUT_DIR";

/// `{command, parameters, results, artifact_version}` with sorted keys.
pub fn envelope(command: &str, parameters: Map<String, Value>, results: Value) -> Value {
    let mut m = Map::new();
    m.insert(
        "artifact_version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    m.insert("command".into(), Value::String(command.into()));
    m.insert("parameters".into(), Value::Object(parameters));
    m.insert("results".into(), results);
    Value::Object(m)
}

/// A float with 17 significant digits; non-finite values become strings.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let text = format!("{x:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float is valid JSON"))
}

pub fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

/// `[{k, value}]` in index order.
pub fn laurent(l: &Laurent) -> Value {
    Value::Array(
        l.iter()
            .map(|(k, v)| {
                let mut m = Map::new();
                m.insert("k".into(), Value::from(*k));
                m.insert("value".into(), rational(v));
                Value::Object(m)
            })
            .collect(),
    )
}

/// Coefficients in ascending powers.
pub fn poly(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(rational).collect())
}

pub fn params<const N: usize>(pairs: [(&str, Value); N]) -> Map<String, Value> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect::<BTreeMap<_, _>>()
        .into_iter()
        .collect()
}

pub fn to_pretty_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

/// Resolves a relative output path against the output-directory variable.
pub fn resolve_out(path: Option<&Path>, default_name: &str) -> PathBuf {
    let base = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    match (path, base) {
        (Some(p), _) if p.is_absolute() => p.to_path_buf(),
        (Some(p), Some(b)) => b.join(p),
        (Some(p), None) => p.to_path_buf(),
        (None, Some(b)) => b.join(default_name),
        (None, None) => PathBuf::from(default_name),
    }
}

/// `run.csv` becomes `run.<suffix>.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    ensure_parent(path)?;
    std::fs::write(path, to_pretty_json(v) + "\n").map_err(|e| CliError::io(path, e))
}

pub fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e)),
        _ => Ok(()),
    }
}

pub fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}
