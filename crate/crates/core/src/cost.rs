//! Objective evaluation and Big-M constants.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Assignment, CostBreakdown, Instance, Solution};

/// Big-M constants used to switch rows on and off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigM {
    /// Hours.
    pub time: f64,
    /// Meters, hangar width.
    pub x: f64,
    /// Meters, hangar length.
    pub y: f64,
}

/// `M_T` is the latest future ETA (0 when there are none) plus the sum of
/// all service times; `M_X`/`M_Y` are the hangar dimensions.
pub fn derive_big_m(instance: &Instance) -> BigM {
    let latest_eta = instance.future.iter().map(|f| f.eta).fold(0.0, f64::max);
    let total_service: f64 = instance.aircraft().map(|a| a.service).sum();
    BigM { time: latest_eta + total_service, x: instance.hangar.hw, y: instance.hangar.hl }
}

/// Objective value of a solution. Delays are recomputed from the roll-in
/// and roll-out times; the `d_arr`/`d_dep` fields are ignored.
pub fn evaluate_cost(instance: &Instance, solution: &Solution) -> Result<CostBreakdown> {
    let mut cost = CostBreakdown::default();
    for (spec, asg) in solution.aligned(instance)? {
        if !asg.accept {
            cost.rejection += spec.rejection_penalty();
            continue;
        }
        if !spec.is_current() {
            cost.arrival_delay += spec.arrival_penalty() * (asg.roll_in - spec.eta).max(0.0);
            cost.positioning += instance.hangar.eps_p * (asg.x + asg.y);
        }
        cost.departure_delay += spec.p_dep * (asg.roll_out - spec.etd).max(0.0);
    }
    cost.total = cost.rejection + cost.arrival_delay + cost.departure_delay + cost.positioning;
    Ok(cost)
}

/// `(roll_in, roll_out)` of an accepted aircraft, `None` when rejected.
pub fn presence_interval(assignment: &Assignment) -> Option<(f64, f64)> {
    assignment.accept.then_some((assignment.roll_in, assignment.roll_out))
}
