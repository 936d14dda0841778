//! Reading a solver's variable listing back into a plan.
//!
//! Accepted grammar, one record per line:
//!
//! * blank lines and lines starting with `#` are ignored;
//! * otherwise the first whitespace-separated token that names a model
//!   variable must be followed by its value (so `X(f01) 5` and CBC-style
//!   `3 X(f01) 5 0` both work);
//! * lines that mention no model variable (status lines, objective lines,
//!   row activities) are skipped;
//! * a variable listed twice with different values is an error;
//! * variables not listed are 0, as solvers commonly omit zeros.
//!
//! A listing that names no model variable at all is rejected as truncated.

use std::path::Path;

use super::{var_name, MilpModel, Point};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, Provenance, Solution};
use crate::validator::validate;

/// Parses a listing into a full point over the model's variables.
pub fn parse_point(model: &MilpModel, text: &str, origin: &Path) -> Result<Point> {
    let err = |line: usize, column: usize, message: String| Error::Parse { path: origin.to_path_buf(), line, column, message };
    let mut point: Point = model.variables.iter().map(|v| (v.name.clone(), 0.0)).collect();
    let mut seen: Point = Point::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(k) = toks.iter().position(|t| model.var(t).is_some()) else { continue };
        let name = toks[k];
        let column = raw.find(name).unwrap_or(0) + 1;
        let value_tok = toks.get(k + 1).ok_or_else(|| err(i + 1, column, format!("no value for `{name}`")))?;
        let value: f64 = value_tok
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(i + 1, column, format!("bad value `{value_tok}` for `{name}`")))?;
        if let Some(&old) = seen.get(name) {
            if old != value {
                return Err(err(i + 1, column, format!("`{name}` listed twice with values {old} and {value}")));
            }
        }
        seen.insert(name.to_string(), value);
        point.insert(name.to_string(), value);
    }
    if seen.is_empty() {
        return Err(err(text.lines().count().max(1), 1, "no model variable found; file empty or truncated".into()));
    }
    Ok(point)
}

/// Builds a plan from a listing and validates it. An aircraft counts as
/// accepted when its `Accept` value is at least 0.5.
pub fn import_solution(model: &MilpModel, instance: &Instance, text: &str, origin: &Path) -> Result<Solution> {
    let point = parse_point(model, text, origin)?;
    let get = |k: &str, id: &str| point.get(&var_name(k, id)).copied().unwrap_or(0.0);
    let assignments = instance
        .aircraft()
        .map(|spec| {
            let id = &spec.id;
            if get("Accept", id) >= 0.5 {
                Assignment::accepted(spec, get("X", id), get("Y", id), get("Rollin", id), get("Rollout", id))
            } else {
                Assignment::rejected(id.clone())
            }
        })
        .collect();
    let solution = Solution { instance_label: instance.label.clone(), assignments, provenance: Provenance::Imported };
    let report = validate(instance, &solution)?;
    if !report.feasible {
        return Err(Error::InfeasibleImport(Box::new(report)));
    }
    Ok(solution)
}
