//! Robot specification files: a JSON object mapping robot names to
//! `{"d": [..3], "a": [..3], "alpha": [..3]}`, angles in radians.

use std::path::Path;

use cusp3r_core::DhParams;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RobotFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error at line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("robot `{name}`: {reason}")]
    ValidationError { name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotSpec {
    pub name: String,
    pub d: [f64; 3],
    pub a: [f64; 3],
    pub alpha: [f64; 3],
    pub params: DhParams,
}

/// Validated entries, sorted by name.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotSpecFile {
    pub robots: Vec<RobotSpec>,
}

impl RobotSpecFile {
    pub fn get(&self, name: &str) -> Option<&RobotSpec> {
        self.robots.iter().find(|r| r.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.robots.iter().map(|r| r.name.as_str()).collect()
    }
}

pub fn parse_robot_file(path: &Path) -> Result<RobotSpecFile, RobotFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| RobotFileError::Io { path: path.display().to_string(), source })?;
    parse_robot_str(&text)
}

pub fn parse_robot_str(text: &str) -> Result<RobotSpecFile, RobotFileError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| RobotFileError::SyntaxError { line: e.line(), message: e.to_string() })?;
    let Value::Object(map) = root else {
        return Err(RobotFileError::SyntaxError {
            line: 1,
            message: "top level must be an object of named robots".into(),
        });
    };
    let mut robots = Vec::new();
    for (name, entry) in &map {
        robots.push(parse_entry(name, entry)?);
    }
    if robots.is_empty() {
        return Err(RobotFileError::ValidationError { name: String::new(), reason: "file defines no robots".into() });
    }
    Ok(RobotSpecFile { robots })
}

fn parse_entry(name: &str, entry: &Value) -> Result<RobotSpec, RobotFileError> {
    let invalid = |reason: String| RobotFileError::ValidationError { name: name.to_string(), reason };
    let Value::Object(fields) = entry else {
        return Err(invalid("entry must be an object with keys d, a, alpha".into()));
    };
    if let Some(k) = fields.keys().find(|k| !matches!(k.as_str(), "d" | "a" | "alpha")) {
        return Err(invalid(format!("unknown key `{k}`")));
    }
    let triple = |key: &str| -> Result<[f64; 3], RobotFileError> {
        let v = fields.get(key).ok_or_else(|| invalid(format!("missing key `{key}`")))?;
        let arr = v.as_array().filter(|a| a.len() == 3).ok_or_else(|| invalid(format!("`{key}` must be an array of 3 numbers")))?;
        let mut out = [0.0; 3];
        for (o, x) in out.iter_mut().zip(arr) {
            *o = x.as_f64().ok_or_else(|| invalid(format!("`{key}` must hold plain numbers (radians for angles)")))?;
        }
        Ok(out)
    };
    let (d, a, alpha) = (triple("d")?, triple("a")?, triple("alpha")?);
    let params = DhParams::from_arrays_checked(d, a, alpha).map_err(|e| invalid(e.to_string()))?;
    Ok(RobotSpec { name: name.to_string(), d, a, alpha, params })
}
