//! Semantic feasibility checks for a plan.
//!
//! Every check runs to completion; the report lists all violations found.
//! Only accepted aircraft take part in the spatial and temporal checks.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::cost::evaluate_cost;
use crate::error::Result;
use crate::geometry::{Occupancy, TOL};
use crate::model::{AircraftSpec, Assignment, CostBreakdown, Instance, Solution};

/// Violation categories, one per constraint family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    OutOfBounds,
    SpatialOverlap,
    ServiceTooShort,
    EarlyRollIn,
    MovementTooClose,
    ExitBlocked,
    EntryBlocked,
    CurrentStateMismatch,
    NegativeTime,
}

impl ViolationKind {
    pub const ALL: [ViolationKind; 9] = [
        ViolationKind::OutOfBounds,
        ViolationKind::SpatialOverlap,
        ViolationKind::ServiceTooShort,
        ViolationKind::EarlyRollIn,
        ViolationKind::MovementTooClose,
        ViolationKind::ExitBlocked,
        ViolationKind::EntryBlocked,
        ViolationKind::CurrentStateMismatch,
        ViolationKind::NegativeTime,
    ];
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// One id, or two for pairwise checks (the first is the affected aircraft).
    pub aircraft: Vec<String>,
    pub detail: String,
    /// Meters or hours by which the rule is missed.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    pub cost: CostBreakdown,
}

impl ValidationReport {
    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn kinds(&self) -> Vec<ViolationKind> {
        let mut k: Vec<_> = self.violations.iter().map(|v| v.kind).collect();
        k.sort();
        k.dedup();
        k
    }
}

struct Checker<'a> {
    instance: &'a Instance,
    rows: Vec<(&'a AircraftSpec, &'a Assignment)>,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn push(&mut self, kind: ViolationKind, aircraft: &[&str], magnitude: f64, detail: String) {
        if magnitude > TOL {
            self.out.push(Violation { kind, aircraft: aircraft.iter().map(|s| s.to_string()).collect(), detail, magnitude });
        }
    }

    fn occupancy(&self, i: usize) -> Occupancy {
        let (spec, asg) = self.rows[i];
        Occupancy { rect: asg.footprint(spec), roll_in: asg.roll_in, roll_out: asg.roll_out, current: spec.is_current() }
    }

    fn accepted(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].1.accept).collect()
    }

    fn current_state(&mut self) {
        for i in 0..self.rows.len() {
            let (spec, asg) = self.rows[i];
            if !spec.is_current() {
                continue;
            }
            let id = spec.id.as_str();
            if !asg.accept {
                self.push(ViolationKind::CurrentStateMismatch, &[id], 1.0, "current aircraft must be accepted".into());
                continue;
            }
            let (x0, y0) = (spec.x_init.unwrap_or(0.0), spec.y_init.unwrap_or(0.0));
            self.push(ViolationKind::CurrentStateMismatch, &[id], (asg.x - x0).abs(), format!("x={} but initial x={x0}", asg.x));
            self.push(ViolationKind::CurrentStateMismatch, &[id], (asg.y - y0).abs(), format!("y={} but initial y={y0}", asg.y));
            self.push(
                ViolationKind::CurrentStateMismatch,
                &[id],
                asg.roll_in.abs(),
                format!("roll-in {} but current aircraft roll in at 0", asg.roll_in),
            );
        }
    }

    fn per_aircraft(&mut self) {
        let hangar = self.instance.hangar;
        for i in self.accepted() {
            let (spec, asg) = self.rows[i];
            let id = spec.id.as_str();
            let fp = asg.footprint(spec);
            for (side, excess) in ["left", "right", "back", "front"].into_iter().zip(hangar.wall_excess(&fp)) {
                self.push(ViolationKind::OutOfBounds, &[id], excess, format!("{side} wall clearance short"));
            }
            self.push(ViolationKind::NegativeTime, &[id], -asg.roll_in, format!("roll-in at {}", asg.roll_in));
            self.push(ViolationKind::NegativeTime, &[id], -asg.roll_out, format!("roll-out at {}", asg.roll_out));
            let stay = asg.roll_out - asg.roll_in;
            self.push(
                ViolationKind::ServiceTooShort,
                &[id],
                spec.service - stay,
                format!("stays {stay} h, needs {} h", spec.service),
            );
            if !spec.is_current() {
                self.push(
                    ViolationKind::EarlyRollIn,
                    &[id],
                    spec.eta - asg.roll_in,
                    format!("rolls in at {} before ETA {}", asg.roll_in, spec.eta),
                );
            }
        }
    }

    fn overlap(&mut self) {
        let buffer = self.instance.hangar.buffer;
        let acc = self.accepted();
        for (k, &i) in acc.iter().enumerate() {
            for &j in &acc[k + 1..] {
                let (oi, oj) = (self.occupancy(i), self.occupancy(j));
                if !oi.overlaps(&oj) {
                    continue;
                }
                let deficit = oi.rect.separation_deficit(&oj.rect, buffer);
                let (a, b) = (self.rows[i].0.id.as_str(), self.rows[j].0.id.as_str());
                self.push(ViolationKind::SpatialOverlap, &[a, b], deficit, "co-present footprints not separated".into());
            }
        }
    }

    fn movements(&mut self) {
        let eps = self.instance.hangar.eps_t;
        // (time, aircraft row, label)
        let mut events: Vec<(f64, usize, &'static str)> = Vec::new();
        for i in self.accepted() {
            let (spec, asg) = self.rows[i];
            if !spec.is_current() {
                events.push((asg.roll_in, i, "roll-in"));
            }
            events.push((asg.roll_out, i, "roll-out"));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (k, &(t1, i1, l1)) in events.iter().enumerate() {
            for &(t2, i2, l2) in &events[k + 1..] {
                if t2 - t1 >= eps - TOL {
                    break;
                }
                if i1 == i2 {
                    continue;
                }
                let (a, b) = (self.rows[i1].0.id.as_str(), self.rows[i2].0.id.as_str());
                self.push(
                    ViolationKind::MovementTooClose,
                    &[a, b],
                    eps - (t2 - t1),
                    format!("{l1} at {t1} and {l2} at {t2}"),
                );
            }
        }
    }

    fn blocking(&mut self) {
        let buffer = self.instance.hangar.buffer;
        let acc = self.accepted();
        for &i in &acc {
            let oi = self.occupancy(i);
            for &j in &acc {
                if i == j {
                    continue;
                }
                let oj = self.occupancy(j);
                if !oj.rect.blocks(&oi.rect, buffer) {
                    continue;
                }
                let (a, b) = (self.rows[i].0.id.as_str(), self.rows[j].0.id.as_str());
                let eps = self.instance.hangar.eps_t;
                if oj.present_at(oi.roll_out) {
                    self.push(
                        ViolationKind::ExitBlocked,
                        &[a, b],
                        oj.roll_out + eps - oi.roll_out,
                        format!("leaves at {} while {b} is parked in front until {}", oi.roll_out, oj.roll_out),
                    );
                }
                if !oi.current && oj.present_at(oi.roll_in) {
                    self.push(
                        ViolationKind::EntryBlocked,
                        &[a, b],
                        oj.roll_out + eps - oi.roll_in,
                        format!("enters at {} while {b} is parked in front until {}", oi.roll_in, oj.roll_out),
                    );
                }
            }
        }
    }
}

/// Runs every check and computes the cost of the plan.
pub fn validate(instance: &Instance, solution: &Solution) -> Result<ValidationReport> {
    let rows = solution.aligned(instance)?;
    let cost = evaluate_cost(instance, solution)?;
    let mut c = Checker { instance, rows, out: Vec::new() };
    c.current_state();
    c.per_aircraft();
    c.overlap();
    c.movements();
    c.blocking();
    Ok(ValidationReport { feasible: c.out.is_empty(), violations: c.out, cost })
}

/// Human-readable rendering, sorted by kind, then by decreasing magnitude.
pub fn explain(report: &ValidationReport) -> String {
    if report.violations.is_empty() {
        return "feasible".to_string();
    }
    let mut v: Vec<&Violation> = report.violations.iter().collect();
    v.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then(b.magnitude.total_cmp(&a.magnitude))
            .then_with(|| a.aircraft.cmp(&b.aircraft))
            .then_with(|| a.detail.cmp(&b.detail))
    });
    let mut out = String::new();
    for x in v {
        let _ = writeln!(out, "{} [{}] {} (by {:.6})", x.kind, x.aircraft.join(", "), x.detail, x.magnitude);
    }
    out
}
