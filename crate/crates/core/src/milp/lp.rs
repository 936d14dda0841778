//! LP text format writer and a reader for the subset it writes.
//!
//! Numbers are printed in shortest round-trip decimal form, so every
//! coefficient survives a write/read cycle bit for bit. The rejection
//! term's constant is written as a trailing constant of the objective.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{MilpModel, Sense, VarKind};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 6;

fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

fn write_terms(out: &mut String, terms: impl Iterator<Item = (String, f64)>) {
    let mut first = true;
    for (k, (name, c)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = c.abs();
        if first && c >= 0.0 {
            out.push(' ');
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag != 1.0 {
            let _ = write!(out, "{} ", num(mag));
        }
        out.push_str(&name);
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Writes the model in LP format. Output is a pure function of the model.
pub fn export_lp(model: &MilpModel) -> String {
    let name = |j: usize| model.variables[j].name.clone();
    let mut out = String::new();
    let _ = writeln!(out, "\\ hangar scheduling model {}", model.label);
    let _ = writeln!(
        out,
        "\\ {} variables, {} rows, M_T = {}, M_X = {}, M_Y = {}",
        model.variables.len(),
        model.rows.len(),
        num(model.big_m.time),
        num(model.big_m.x),
        num(model.big_m.y)
    );
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model.objective.iter().map(|&(j, c)| (name(j), c)));
    if model.objective_constant != 0.0 {
        let c = model.objective_constant;
        let _ = write!(out, " {} {}", if c < 0.0 { "-" } else { "+" }, num(c.abs()));
    }
    out.push_str("\nSubject To\n");
    for r in &model.rows {
        let _ = write!(out, " {}:", r.name);
        write_terms(&mut out, r.terms.iter().map(|&(j, c)| (name(j), c)));
        let _ = writeln!(out, " {} {}", r.sense.symbol(), num(r.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.is_fixed() {
            let _ = writeln!(out, " {} = {}", v.name, num(v.lower));
        }
    }
    out.push_str("Binaries\n");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::Binary) {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Contents of an LP file as written by [`export_lp`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedLp {
    pub objective: Vec<(String, f64)>,
    pub objective_constant: f64,
    pub rows: Vec<ParsedRow>,
    /// Explicit bounds, `(lower, upper)`.
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub binaries: Vec<String>,
}

impl ParsedLp {
    /// Every variable name mentioned anywhere in the file, sorted.
    pub fn variable_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .objective
            .iter()
            .map(|t| t.0.clone())
            .chain(self.rows.iter().flat_map(|r| r.terms.iter().map(|t| t.0.clone())))
            .chain(self.bounds.keys().cloned())
            .chain(self.binaries.iter().cloned())
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

struct Reader<'a> {
    origin: &'a Path,
}

impl Reader<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse { path: self.origin.to_path_buf(), line, column: 1, message: message.into() }
    }

    fn number(&self, tok: &str, line: usize) -> Result<f64> {
        tok.parse::<f64>().map_err(|_| self.err(line, format!("bad number `{tok}`")))
    }

    /// Parses `[+|-] [coef] name ...` into terms and a constant.
    fn expression(&self, toks: &[&str], line: usize) -> Result<(Vec<(String, f64)>, f64)> {
        let mut terms = Vec::new();
        let mut constant = 0.0;
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        for &t in toks {
            match t {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                _ if t.parse::<f64>().is_ok() => {
                    if coef.is_some() {
                        return Err(self.err(line, format!("two numbers in a row near `{t}`")));
                    }
                    coef = Some(self.number(t, line)?);
                }
                _ => {
                    terms.push((t.to_string(), sign * coef.take().unwrap_or(1.0)));
                    sign = 1.0;
                }
            }
        }
        if let Some(c) = coef {
            constant += sign * c;
        }
        Ok((terms, constant))
    }
}

/// Joins continuation lines (lines without a `name:` label in the
/// objective and constraint sections) into logical statements, each
/// tagged with the line number where it starts. Also reports whether an
/// `End` marker was seen.
fn statements(text: &str) -> (Vec<(usize, Section, String)>, bool) {
    let mut out: Vec<(usize, Section, String)> = Vec::new();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        let next = match lower.as_str() {
            "minimize" | "minimum" | "min" => Some(Section::Objective),
            "subject to" | "st" | "s.t." | "such that" => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            section = s;
            continue;
        }
        let continues = !line.contains(':') && matches!(section, Section::Objective | Section::Constraints);
        match out.last_mut() {
            Some(last) if continues && last.1 == section => {
                last.2.push(' ');
                last.2.push_str(line);
            }
            _ => out.push((i + 1, section, line.to_string())),
        }
    }
    (out, section == Section::End)
}

/// Reads an LP file in the dialect produced by [`export_lp`].
pub fn parse_lp(text: &str, origin: &Path) -> Result<ParsedLp> {
    let r = Reader { origin };
    let mut lp = ParsedLp::default();
    let (stmts, saw_end) = statements(text);
    for (line, section, stmt) in stmts {
        match section {
            Section::None => return Err(r.err(line, "content before the objective section")),
            Section::End => return Err(r.err(line, "content after End")),
            Section::Objective => {
                let body = stmt.split_once(':').map_or(stmt.as_str(), |(_, b)| b);
                let toks: Vec<&str> = body.split_whitespace().collect();
                let (terms, constant) = r.expression(&toks, line)?;
                lp.objective.extend(terms);
                lp.objective_constant += constant;
            }
            Section::Constraints => {
                let (name, body) = stmt.split_once(':').ok_or_else(|| r.err(line, "row without a name"))?;
                let toks: Vec<&str> = body.split_whitespace().collect();
                let pos = toks
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "=" | "=<" | "=>" | "<" | ">"))
                    .ok_or_else(|| r.err(line, format!("row `{name}` has no sense")))?;
                let sense = match toks[pos] {
                    "<=" | "=<" | "<" => Sense::Le,
                    ">=" | "=>" | ">" => Sense::Ge,
                    _ => Sense::Eq,
                };
                let (terms, constant) = r.expression(&toks[..pos], line)?;
                if constant != 0.0 {
                    return Err(r.err(line, format!("row `{name}` has a constant on the left")));
                }
                let rhs_toks = &toks[pos + 1..];
                let rhs = match rhs_toks {
                    [v] => r.number(v, line)?,
                    ["-", v] => -r.number(v, line)?,
                    _ => return Err(r.err(line, format!("row `{name}` needs a single right-hand side"))),
                };
                lp.rows.push(ParsedRow { name: name.trim().to_string(), terms, sense, rhs });
            }
            Section::Bounds => {
                let toks: Vec<&str> = stmt.split_whitespace().collect();
                match toks.as_slice() {
                    [v, "=", x] => {
                        let x = r.number(x, line)?;
                        lp.bounds.insert(v.to_string(), (x, x));
                    }
                    [lo, "<=", v, "<=", hi] => {
                        let (lo, hi) = (bound(&r, lo, line)?, bound(&r, hi, line)?);
                        lp.bounds.insert(v.to_string(), (lo, hi));
                    }
                    [v, ">=", lo] => {
                        let lo = bound(&r, lo, line)?;
                        lp.bounds.entry(v.to_string()).or_insert((0.0, f64::INFINITY)).0 = lo;
                    }
                    [v, "<=", hi] => {
                        let hi = bound(&r, hi, line)?;
                        lp.bounds.entry(v.to_string()).or_insert((0.0, f64::INFINITY)).1 = hi;
                    }
                    _ => return Err(r.err(line, format!("unsupported bound `{stmt}`"))),
                }
            }
            Section::Binaries => lp.binaries.extend(stmt.split_whitespace().map(str::to_string)),
        }
    }
    if !saw_end {
        return Err(r.err(text.lines().count(), "missing End"));
    }
    Ok(lp)
}

fn bound(r: &Reader, tok: &str, line: usize) -> Result<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => r.number(tok, line),
    }
}
