//! Reader for CPLEX-style XML solution files (`.sol`), as written by CPLEX
//! and by tools that mimic its format.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::model::MilpModel;

#[derive(Debug, Error)]
pub enum SolError {
    #[error("no <variable> entries found")]
    NoVariables,
    #[error("bad value `{value}` for variable `{name}`")]
    BadValue { name: String, value: String },
    #[error("solution has no value for variable `{0}`")]
    Missing(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExternalSolution {
    pub objective: Option<f64>,
    pub values: HashMap<String, f64>,
}

impl ExternalSolution {
    /// Values in model variable order. Variables absent from the file are an error
    /// unless `missing_as_zero` is set.
    pub fn assignment(&self, model: &MilpModel, missing_as_zero: bool) -> Result<Vec<f64>, SolError> {
        model
            .vars()
            .iter()
            .map(|v| match self.values.get(&v.name) {
                Some(&x) => Ok(x),
                None if missing_as_zero => Ok(0.0),
                None => Err(SolError::Missing(v.name.clone())),
            })
            .collect()
    }
}

fn attr(tag: &str, key: &str) -> Option<String> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r#"([A-Za-z_]+)\s*=\s*"([^"]*)""#).unwrap());
    re.captures_iter(tag)
        .find(|c| &c[1] == key)
        .map(|c| c[2].to_string())
}

pub fn read_cplex_sol(text: &str) -> Result<ExternalSolution, SolError> {
    static VAR: OnceLock<Regex> = OnceLock::new();
    static HEADER: OnceLock<Regex> = OnceLock::new();
    let var = VAR.get_or_init(|| Regex::new(r"<variable\b[^>]*>").unwrap());
    let header = HEADER.get_or_init(|| Regex::new(r"<header\b[^>]*>").unwrap());

    let mut out = ExternalSolution::default();
    if let Some(h) = header.find(text) {
        out.objective = attr(h.as_str(), "objectiveValue").and_then(|s| s.parse().ok());
    }
    for m in var.find_iter(text) {
        let tag = m.as_str();
        let (Some(name), Some(value)) = (attr(tag, "name"), attr(tag, "value")) else {
            continue;
        };
        let v: f64 = value.trim().parse().map_err(|_| SolError::BadValue {
            name: name.clone(),
            value: value.clone(),
        })?;
        out.values.insert(unescape(&name), v);
    }
    if out.values.is_empty() {
        return Err(SolError::NoVariables);
    }
    Ok(out)
}

fn unescape(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&amp;", "&")
}
