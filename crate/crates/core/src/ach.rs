//! Automated Constructive Heuristic: prioritize, then place each aircraft at
//! the earliest time and lowest-corner spot that keeps the plan feasible.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::geometry::{grid_points, Footprint, Occupancy, TOL};
use crate::model::{AircraftSpec, Assignment, HangarConfig, Instance, Provenance, Solution};

/// Sort key of a future aircraft. Higher `p_rej` first, then earlier ETA,
/// then shorter service, then id.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityKey {
    pub p_rej: f64,
    pub eta: f64,
    pub serv: f64,
    pub id: String,
}

impl PriorityKey {
    pub fn of(spec: &AircraftSpec) -> Self {
        Self { p_rej: spec.rejection_penalty(), eta: spec.eta, serv: spec.service, id: spec.id.clone() }
    }

    pub fn cmp(&self, other: &Self) -> Ordering {
        other
            .p_rej
            .total_cmp(&self.p_rej)
            .then(self.eta.total_cmp(&other.eta))
            .then(self.serv.total_cmp(&other.serv))
            .then_with(|| self.id.cmp(&other.id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementCandidate {
    pub x: f64,
    pub y: f64,
    pub t_in: f64,
    pub t_out: f64,
    pub score: f64,
}

/// One committed aircraft.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedEntry {
    pub id: String,
    pub occ: Occupancy,
}

/// The partial plan built so far: current aircraft plus every future
/// aircraft already committed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FixedSchedule {
    pub entries: Vec<FixedEntry>,
}

impl FixedSchedule {
    /// Movement instants: roll-ins of future aircraft and all roll-outs.
    pub fn events(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().flat_map(|e| {
            let rin = (!e.occ.current).then_some(e.occ.roll_in);
            rin.into_iter().chain(std::iter::once(e.occ.roll_out))
        })
    }

    pub fn last_event(&self) -> f64 {
        self.events().fold(0.0, f64::max)
    }

    /// No committed movement lies within `eps_t` of `t`.
    pub fn separated(&self, t: f64, eps_t: f64) -> bool {
        self.events().all(|e| (e - t).abs() >= eps_t - TOL)
    }

    pub fn push(&mut self, id: impl Into<String>, occ: Occupancy) {
        self.entries.push(FixedEntry { id: id.into(), occ });
    }
}

/// Latest roll-in at which accepting still beats rejecting.
/// Infinite when delay costs nothing.
pub fn max_admissible_time(spec: &AircraftSpec) -> f64 {
    let p_arr = spec.arrival_penalty();
    if p_arr > 0.0 {
        spec.eta + spec.rejection_penalty() / p_arr
    } else {
        f64::INFINITY
    }
}

/// Future aircraft ids in placement order.
pub fn prioritize(instance: &Instance) -> Vec<String> {
    let mut keys: Vec<PriorityKey> = instance.future.iter().map(PriorityKey::of).collect();
    keys.sort_by(PriorityKey::cmp);
    keys.into_iter().map(|k| k.id).collect()
}

/// Earliest roll-out at or after `t_in + service`, on the `eps_t` lattice
/// from that point, clear of every committed movement.
pub fn resolve_roll_out(spec: &AircraftSpec, t_in: f64, fixed: &FixedSchedule, hangar: &HangarConfig) -> f64 {
    first_clear(t_in + spec.service, fixed, hangar.eps_t)
}

fn first_clear(base: f64, fixed: &FixedSchedule, eps_t: f64) -> f64 {
    (0u64..)
        .map(|k| base + k as f64 * eps_t)
        .find(|&t| fixed.separated(t, eps_t))
        .expect("finitely many events")
}

/// Spatial and blocking checks of one spot against the committed aircraft
/// whose stays overlap `occ`. Movement separation is checked by the caller.
fn spot_clear(occ: &Occupancy, fixed: &[&FixedEntry], hangar: &HangarConfig) -> bool {
    if hangar.wall_excess(&occ.rect).into_iter().any(|e| e > TOL) {
        return false;
    }
    let b = hangar.buffer;
    fixed.iter().all(|g| {
        let g = &g.occ;
        if !g.overlaps(occ) {
            return true;
        }
        if !g.rect.separated(&occ.rect, b) {
            return false;
        }
        if g.rect.blocks(&occ.rect, b) && (g.present_at(occ.roll_in) || g.present_at(occ.roll_out)) {
            return false;
        }
        if occ.rect.blocks(&g.rect, b) && (occ.present_at(g.roll_out) || (!g.current && occ.present_at(g.roll_in))) {
            return false;
        }
        true
    })
}

/// Whether committing `spec` at `(x, y)` from `t_in` (roll-out resolved by
/// minimal shift) keeps the partial plan feasible.
pub fn is_valid_spot(spec: &AircraftSpec, x: f64, y: f64, t_in: f64, fixed: &FixedSchedule, instance: &Instance) -> bool {
    let h = &instance.hangar;
    if !spec.is_current() && !fixed.separated(t_in, h.eps_t) {
        return false;
    }
    let t_out = resolve_roll_out(spec, t_in, fixed, h);
    let occ = Occupancy { rect: Footprint::new(x, y, spec.width, spec.length), roll_in: t_in, roll_out: t_out, current: spec.is_current() };
    let all: Vec<&FixedEntry> = fixed.entries.iter().collect();
    spot_clear(&occ, &all, h)
}

/// Grid spots ordered by `x + y`, then `y`, then `x`.
pub fn grid_scan_order(hangar: &HangarConfig, width: f64, length: f64, step: f64) -> Vec<(f64, f64)> {
    let xs = grid_points(hangar.buffer, hangar.hw - hangar.buffer - width, step);
    let ys = grid_points(hangar.buffer, hangar.hl - hangar.buffer - length, step);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    if xs.is_empty() || ys.is_empty() {
        return out;
    }
    for s in 0..(xs.len() + ys.len() - 1) {
        for (j, &y) in ys.iter().enumerate().take(s + 1) {
            if let Some(&x) = xs.get(s - j) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Lowest-scoring valid spot at roll-in `t_in`, or `None`.
pub fn find_best_placement(
    spec: &AircraftSpec,
    t_in: f64,
    fixed: &FixedSchedule,
    instance: &Instance,
) -> Option<PlacementCandidate> {
    let h = &instance.hangar;
    let spots = grid_scan_order(h, spec.width, spec.length, h.grid_step);
    best_on(spec, t_in, fixed, h, &spots)
}

fn best_on(
    spec: &AircraftSpec,
    t_in: f64,
    fixed: &FixedSchedule,
    h: &HangarConfig,
    spots: &[(f64, f64)],
) -> Option<PlacementCandidate> {
    if !spec.is_current() && !fixed.separated(t_in, h.eps_t) {
        return None;
    }
    let t_out = resolve_roll_out(spec, t_in, fixed, h);
    let probe = Occupancy { rect: Footprint::new(0.0, 0.0, 0.0, 0.0), roll_in: t_in, roll_out: t_out, current: spec.is_current() };
    let near: Vec<&FixedEntry> = fixed.entries.iter().filter(|g| g.occ.overlaps(&probe)).collect();
    spots.iter().find_map(|&(x, y)| {
        let occ = Occupancy { rect: Footprint::new(x, y, spec.width, spec.length), ..probe };
        spot_clear(&occ, &near, h).then_some(PlacementCandidate { x, y, t_in, t_out, score: x + y })
    })
}

/// Commits current aircraft from the front of the hangar backwards, each
/// leaving at its remaining service time unless an aircraft parked in
/// front of it, or the movement spacing, forces it to wait.
pub fn commit_current(instance: &Instance) -> (FixedSchedule, Vec<Assignment>) {
    let h = &instance.hangar;
    let mut order: Vec<&AircraftSpec> = instance.current.iter().collect();
    order.sort_by(|a, b| {
        b.y_init.unwrap_or(0.0).total_cmp(&a.y_init.unwrap_or(0.0)).then_with(|| a.id.cmp(&b.id))
    });
    let mut fixed = FixedSchedule::default();
    let mut out = Vec::new();
    for c in order {
        let rect = c.initial_footprint().expect("current aircraft have a position");
        let base = fixed
            .entries
            .iter()
            .filter(|d| d.occ.rect.blocks(&rect, h.buffer))
            .map(|d| d.occ.roll_out + h.eps_t)
            .fold(c.service, f64::max);
        let t_out = first_clear(base, &fixed, h.eps_t);
        fixed.push(c.id.clone(), Occupancy { rect, roll_in: 0.0, roll_out: t_out, current: true });
        out.push(Assignment::accepted(c, rect.x, rect.y, 0.0, t_out));
    }
    (fixed, out)
}

/// Runs the heuristic. The result always validates feasible.
pub fn solve(instance: &Instance) -> Solution {
    let h = &instance.hangar;
    let (mut fixed, mut assignments) = commit_current(instance);
    for id in prioritize(instance) {
        let spec = instance.get(&id).expect("prioritized ids come from the instance");
        match place(spec, &fixed, h) {
            Some(c) => {
                let rect = Footprint::new(c.x, c.y, spec.width, spec.length);
                fixed.push(id.clone(), Occupancy { rect, roll_in: c.t_in, roll_out: c.t_out, current: false });
                assignments.push(Assignment::accepted(spec, c.x, c.y, c.t_in, c.t_out));
            }
            None => assignments.push(Assignment::rejected(id)),
        }
    }
    let order: Vec<&str> = instance.aircraft().map(|a| a.id.as_str()).collect();
    assignments.sort_by_key(|a| order.iter().position(|id| *id == a.aircraft_id));
    Solution { instance_label: instance.label.clone(), assignments, provenance: Provenance::Heuristic }
}

/// Scans `t = ETA + k * eps_t` up to the admissible limit.
fn place(spec: &AircraftSpec, fixed: &FixedSchedule, h: &HangarConfig) -> Option<PlacementCandidate> {
    if !h.fits(spec.width, spec.length) {
        return None;
    }
    // Past the last committed event the hangar is empty, so waiting longer
    // never helps.
    let limit = max_admissible_time(spec).min(spec.eta.max(fixed.last_event() + h.eps_t) + h.eps_t);
    let spots = grid_scan_order(h, spec.width, spec.length, h.grid_step);
    let k_max = ((limit - spec.eta) / h.eps_t + TOL).floor() as u64;
    (0..=k_max).find_map(|k| best_on(spec, spec.eta + k as f64 * h.eps_t, fixed, h, &spots))
}
