//! Hangar scheduling and layout: domain model, constructive heuristic,
//! feasibility validator, MILP export, exact oracle, instance generator
//! and report output.

pub mod ach;
pub mod cost;
pub mod exact;
pub mod error;
pub mod geometry;
pub mod instgen;
pub mod io;
pub mod milp;
pub mod model;
pub mod report;
pub mod validator;

pub use cost::{derive_big_m, evaluate_cost, presence_interval, BigM};
pub use error::{Error, Result};
pub use model::{
    AircraftKind, AircraftSpec, Assignment, CostBreakdown, HangarConfig, Instance, Provenance, Solution,
};
pub use validator::{explain, validate, ValidationReport, Violation, ViolationKind};
