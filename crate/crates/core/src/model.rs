//! Domain types: aircraft, hangar, instance and solution.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Footprint, TOL};

/// Whether an aircraft is already parked at the start of the plan or is a
/// service request that may be accepted or rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AircraftKind {
    Current,
    Future,
}

/// One aircraft: footprint, schedule targets and penalty economics.
///
/// Times are in hours, lengths in meters. `p_rej`/`p_arr` are only present
/// for future aircraft, `x_init`/`y_init` only for current ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AircraftSpec {
    pub id: String,
    pub kind: AircraftKind,
    pub width: f64,
    pub length: f64,
    pub eta: f64,
    pub etd: f64,
    /// Required service time; remaining service time for current aircraft.
    pub service: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_rej: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_arr: Option<f64>,
    pub p_dep: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_init: Option<f64>,
    #[serde(default)]
    pub vip: bool,
}

impl AircraftSpec {
    /// A future aircraft (service request).
    #[allow(clippy::too_many_arguments)]
    pub fn future(
        id: impl Into<String>,
        width: f64,
        length: f64,
        eta: f64,
        etd: f64,
        service: f64,
        p_rej: f64,
        p_arr: f64,
        p_dep: f64,
    ) -> Self {
        Self {
            id: id.into(),
            kind: AircraftKind::Future,
            width,
            length,
            eta,
            etd,
            service,
            p_rej: Some(p_rej),
            p_arr: Some(p_arr),
            p_dep,
            x_init: None,
            y_init: None,
            vip: false,
        }
    }

    /// A current aircraft parked at `(x, y)` with `service` hours remaining.
    #[allow(clippy::too_many_arguments)]
    pub fn current(
        id: impl Into<String>,
        width: f64,
        length: f64,
        x: f64,
        y: f64,
        etd: f64,
        service: f64,
        p_dep: f64,
    ) -> Self {
        Self {
            id: id.into(),
            kind: AircraftKind::Current,
            width,
            length,
            eta: 0.0,
            etd,
            service,
            p_rej: None,
            p_arr: None,
            p_dep,
            x_init: Some(x),
            y_init: Some(y),
            vip: false,
        }
    }

    pub fn is_current(&self) -> bool {
        self.kind == AircraftKind::Current
    }

    /// Rejection penalty; zero for current aircraft.
    pub fn rejection_penalty(&self) -> f64 {
        self.p_rej.unwrap_or(0.0)
    }

    /// Arrival delay penalty per hour; zero for current aircraft.
    pub fn arrival_penalty(&self) -> f64 {
        self.p_arr.unwrap_or(0.0)
    }

    /// Fixed initial footprint of a current aircraft.
    pub fn initial_footprint(&self) -> Option<Footprint> {
        match (self.x_init, self.y_init) {
            (Some(x), Some(y)) => Some(Footprint::new(x, y, self.width, self.length)),
            _ => None,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInstance(format!("aircraft `{}`: {msg}", self.id)));
        if !valid_id(&self.id) {
            return bad("id must be non-empty and use only ASCII letters, digits and `_`");
        }
        let finite = [self.width, self.length, self.eta, self.etd, self.service, self.p_dep];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite parameter");
        }
        if self.width <= 0.0 || self.length <= 0.0 {
            return bad("footprint must be positive");
        }
        if self.service <= 0.0 {
            return bad("service time must be positive");
        }
        if self.eta < 0.0 {
            return bad("ETA must be non-negative");
        }
        if self.p_dep < 0.0 {
            return bad("departure penalty must be non-negative");
        }
        match self.kind {
            AircraftKind::Current => {
                if self.x_init.is_none() || self.y_init.is_none() {
                    return bad("current aircraft needs x_init and y_init");
                }
                if self.p_rej.is_some() || self.p_arr.is_some() {
                    return bad("current aircraft cannot carry p_rej/p_arr");
                }
            }
            AircraftKind::Future => {
                if self.x_init.is_some() || self.y_init.is_some() {
                    return bad("future aircraft cannot carry x_init/y_init");
                }
                match (self.p_rej, self.p_arr) {
                    (Some(r), Some(a)) if r >= 0.0 && a >= 0.0 && r.is_finite() && a.is_finite() => {}
                    (Some(_), Some(_)) => return bad("penalties must be finite and non-negative"),
                    _ => return bad("future aircraft needs p_rej and p_arr"),
                }
            }
        }
        Ok(())
    }
}

/// Aircraft ids end up inside LP variable names, so keep them plain.
fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Hangar geometry and model scalars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HangarConfig {
    pub hw: f64,
    pub hl: f64,
    pub buffer: f64,
    pub eps_t: f64,
    pub eps_p: f64,
    /// Spatial scan resolution used by the heuristic and the oracle.
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
}

fn default_grid_step() -> f64 {
    1.0
}

impl Default for HangarConfig {
    fn default() -> Self {
        Self { hw: 65.0, hl: 60.0, buffer: 5.0, eps_t: 0.1, eps_p: 0.001, grid_step: 1.0 }
    }
}

impl HangarConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.hw > 0.0
            && self.hl > 0.0
            && self.buffer >= 0.0
            && self.eps_t > 0.0
            && self.eps_p >= 0.0
            && self.grid_step > 0.0
            && [self.hw, self.hl, self.buffer, self.eps_t, self.eps_p, self.grid_step]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInstance(format!("invalid hangar configuration {self:?}")))
        }
    }

    /// True when a `width x length` footprint fits inside the walls with the buffer.
    pub fn fits(&self, width: f64, length: f64) -> bool {
        width + 2.0 * self.buffer <= self.hw + TOL && length + 2.0 * self.buffer <= self.hl + TOL
    }

    /// Signed amounts by which a footprint crosses the buffered walls, in
    /// the order left, right, bottom, top. Positive means out of bounds.
    pub fn wall_excess(&self, fp: &Footprint) -> [f64; 4] {
        [
            self.buffer - fp.x,
            fp.x + fp.w - (self.hw - self.buffer),
            self.buffer - fp.y,
            fp.y + fp.l - (self.hl - self.buffer),
        ]
    }
}

/// A hangar plus the current (set C) and future (set F) aircraft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub hangar: HangarConfig,
    pub current: Vec<AircraftSpec>,
    pub future: Vec<AircraftSpec>,
    pub label: String,
}

impl Instance {
    /// All aircraft, current first, in file order. This is the order used for
    /// `a < b` pair domains in the MILP.
    pub fn aircraft(&self) -> impl Iterator<Item = &AircraftSpec> {
        self.current.iter().chain(self.future.iter())
    }

    pub fn len(&self) -> usize {
        self.current.len() + self.future.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: &str) -> Option<&AircraftSpec> {
        self.aircraft().find(|a| a.id == id)
    }

    /// Checks every structural invariant: parameter domains, unique ids,
    /// and that current aircraft are inside the hangar and mutually separated.
    pub fn validate(&self) -> Result<()> {
        self.hangar.validate()?;
        let mut seen = HashSet::new();
        for a in self.aircraft() {
            a.check()?;
            if !seen.insert(a.id.as_str()) {
                return Err(Error::InvalidInstance(format!("duplicate aircraft id `{}`", a.id)));
            }
        }
        for a in &self.current {
            if a.kind != AircraftKind::Current {
                return Err(Error::InvalidInstance(format!("`{}` listed as current but kind is Future", a.id)));
            }
        }
        for a in &self.future {
            if a.kind != AircraftKind::Future {
                return Err(Error::InvalidInstance(format!("`{}` listed as future but kind is Current", a.id)));
            }
        }
        let placed: Vec<(&str, Footprint)> = self
            .current
            .iter()
            .map(|c| (c.id.as_str(), c.initial_footprint().expect("checked above")))
            .collect();
        for (id, fp) in &placed {
            let worst = self.hangar.wall_excess(fp).into_iter().fold(f64::MIN, f64::max);
            if worst > TOL {
                return Err(Error::InvalidInstance(format!(
                    "current aircraft `{id}` is outside the buffered hangar area by {worst:.3} m"
                )));
            }
        }
        for (i, (ia, fa)) in placed.iter().enumerate() {
            for (ib, fb) in &placed[i + 1..] {
                let deficit = fa.separation_deficit(fb, self.hangar.buffer);
                if deficit > TOL {
                    return Err(Error::InvalidInstance(format!(
                        "current aircraft `{ia}` and `{ib}` overlap their buffered footprints by {deficit:.3} m"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Where the provenance of a solution comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Heuristic,
    Oracle,
    Imported,
    Manual,
}

/// Decisions for one aircraft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub aircraft_id: String,
    pub accept: bool,
    /// Front-left corner.
    pub x: f64,
    pub y: f64,
    pub roll_in: f64,
    pub roll_out: f64,
    pub d_arr: f64,
    pub d_dep: f64,
}

impl Assignment {
    /// A rejection: every continuous field forced to zero.
    pub fn rejected(id: impl Into<String>) -> Self {
        Self { aircraft_id: id.into(), accept: false, x: 0.0, y: 0.0, roll_in: 0.0, roll_out: 0.0, d_arr: 0.0, d_dep: 0.0 }
    }

    /// An acceptance with delays filled in from the aircraft's targets.
    pub fn accepted(spec: &AircraftSpec, x: f64, y: f64, roll_in: f64, roll_out: f64) -> Self {
        let d_arr = if spec.is_current() { 0.0 } else { (roll_in - spec.eta).max(0.0) };
        Self {
            aircraft_id: spec.id.clone(),
            accept: true,
            x,
            y,
            roll_in,
            roll_out,
            d_arr,
            d_dep: (roll_out - spec.etd).max(0.0),
        }
    }

    pub fn footprint(&self, spec: &AircraftSpec) -> Footprint {
        Footprint::new(self.x, self.y, spec.width, spec.length)
    }
}

/// A full plan: one assignment per aircraft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub instance_label: String,
    pub assignments: Vec<Assignment>,
    pub provenance: Provenance,
}

impl Solution {
    pub fn get(&self, id: &str) -> Option<&Assignment> {
        self.assignments.iter().find(|a| a.aircraft_id == id)
    }

    /// Pairs every aircraft of the instance (current first) with its
    /// assignment. Fails on missing, duplicate or unknown ids.
    pub fn aligned<'a>(&'a self, instance: &'a Instance) -> Result<Vec<(&'a AircraftSpec, &'a Assignment)>> {
        let mut by_id: HashMap<&str, &Assignment> = HashMap::with_capacity(self.assignments.len());
        for a in &self.assignments {
            if by_id.insert(a.aircraft_id.as_str(), a).is_some() {
                return Err(Error::DuplicateAssignment(a.aircraft_id.clone()));
            }
        }
        let mut out = Vec::with_capacity(instance.len());
        for spec in instance.aircraft() {
            match by_id.remove(spec.id.as_str()) {
                Some(a) => out.push((spec, a)),
                None => return Err(Error::MissingAssignment(spec.id.clone())),
            }
        }
        if let Some(extra) = self.assignments.iter().find(|a| by_id.contains_key(a.aircraft_id.as_str())) {
            return Err(Error::UnknownAircraft(extra.aircraft_id.clone()));
        }
        Ok(out)
    }

    /// Recomputes `d_arr`/`d_dep` from the times and zeroes rejected rows.
    pub fn normalize(&mut self, instance: &Instance) {
        for asg in &mut self.assignments {
            let Some(spec) = instance.get(&asg.aircraft_id) else { continue };
            if asg.accept {
                *asg = Assignment::accepted(spec, asg.x, asg.y, asg.roll_in, asg.roll_out);
            } else {
                *asg = Assignment::rejected(spec.id.clone());
            }
        }
    }
}

/// The four objective components and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub rejection: f64,
    pub arrival_delay: f64,
    pub departure_delay: f64,
    pub positioning: f64,
    pub total: f64,
}
