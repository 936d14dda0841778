//! JSON persistence for instances and solutions.
//!
//! Field names match the Rust types one to one (`hangar`, `current`,
//! `future`, `label`; per aircraft `id`, `kind`, `width`, `length`, `eta`,
//! `etd`, `service`, `p_rej`, `p_arr`, `p_dep`, `x_init`, `y_init`, `vip`).
//! Times are hours, lengths meters. Loading an instance runs
//! [`Instance::validate`].

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, Solution};

pub fn instance_to_string(instance: &Instance) -> String {
    to_pretty(instance)
}

pub fn instance_from_str(text: &str, origin: &Path) -> Result<Instance> {
    let instance: Instance = parse(text, origin)?;
    instance.validate()?;
    Ok(instance)
}

pub fn save_instance(instance: &Instance, path: &Path) -> Result<()> {
    write(path, &instance_to_string(instance))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    instance_from_str(&read(path)?, path)
}

pub fn solution_to_string(solution: &Solution) -> String {
    to_pretty(solution)
}

pub fn save_solution(solution: &Solution, path: &Path) -> Result<()> {
    write(path, &solution_to_string(solution))
}

pub fn load_solution(path: &Path) -> Result<Solution> {
    parse(&read(path)?, path)
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("model types always serialize");
    s.push('\n');
    s
}

fn parse<T: DeserializeOwned>(text: &str, origin: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
