use std::path::PathBuf;

use thiserror::Error;

use crate::validator::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no assignment for aircraft `{0}`")]
    MissingAssignment(String),
    #[error("more than one assignment for aircraft `{0}`")]
    DuplicateAssignment(String),
    #[error("assignment refers to unknown aircraft `{0}`")]
    UnknownAircraft(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error in {path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("aircraft model {0} does not fit the hangar with its buffer")]
    CatalogDoesNotFit(String),
    #[error("could only place {placed} of {requested} current aircraft")]
    PlacementImpossible { placed: usize, requested: usize },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("movement events coincide: {0}")]
    AmbiguousOrder(String),
    #[error("no value for variable `{0}`")]
    MissingVariable(String),
    #[error("imported point is infeasible ({} violations)", .0.violations.len())]
    InfeasibleImport(Box<ValidationReport>),
    #[error("solution is infeasible ({} violations)", .0.violations.len())]
    InfeasibleSolution(Box<ValidationReport>),
    #[error("instance has {future} future aircraft, the oracle limit is {limit}")]
    InstanceTooLarge { future: usize, limit: usize },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
