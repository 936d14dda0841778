//! Exact oracle for desk-scale instances.
//!
//! The search enumerates event sequences: at every node it may roll in a
//! pending future aircraft, roll out a parked one, or (with the hangar
//! empty) stop and reject whatever is still pending. Each event is placed
//! at the earliest time its order allows. Costs only grow with time and
//! feasibility only depends on who is inside at each event, so the
//! earliest-time schedule of an order is the best schedule with that
//! order, and the enumeration is exact in time.
//!
//! Positions are solved per complete sequence. Any optimal layout can be
//! slid toward the back-left corner until each aircraft touches a wall
//! buffer or another aircraft's buffer, so candidate coordinates are the
//! grid points reachable from the walls by stacking footprints.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::ach::{commit_current, max_admissible_time, PriorityKey};
use crate::cost::evaluate_cost;
use crate::error::{Error, Result};
use crate::geometry::{Footprint, TOL};
use crate::model::{AircraftSpec, Assignment, CostBreakdown, HangarConfig, Instance, Provenance, Solution};

/// Default cap on future aircraft.
pub const DEFAULT_MAX_FUTURE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeCandidates {
    /// Every event at the earliest time its order allows.
    EventDriven,
    /// Roll-ins restricted to multiples of `step` hours.
    Grid { step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub grid_step: f64,
    pub time_candidates: TimeCandidates,
    pub node_budget: u64,
    /// Seconds.
    pub time_budget: f64,
    /// Larger instances are refused with [`Error::InstanceTooLarge`].
    pub max_future: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_step: 1.0,
            time_candidates: TimeCandidates::EventDriven,
            node_budget: 20_000_000,
            time_budget: 120.0,
            max_future: DEFAULT_MAX_FUTURE,
        }
    }
}

impl OracleConfig {
    pub fn for_hangar(hangar: &HangarConfig) -> Self {
        Self { grid_step: hangar.grid_step, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleStatus {
    ProvenOptimalOnGrid,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub solution: Solution,
    pub cost: CostBreakdown,
    pub status: OracleStatus,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum St {
    Pending,
    Present(f64),
    Done(f64, f64),
}

struct Ac<'a> {
    spec: &'a AircraftSpec,
    current: bool,
    t_max: f64,
    fits: bool,
    /// Candidate spots sorted by `(x + y, y, x)`; the fixed spot for
    /// current aircraft.
    spots: Vec<(f64, f64)>,
}

impl Ac<'_> {
    fn rect(&self, (x, y): (f64, f64)) -> Footprint {
        Footprint::new(x, y, self.spec.width, self.spec.length)
    }
}

/// One aircraft in a layout problem.
#[derive(Clone, Copy)]
struct Slot {
    ac: usize,
    rin: f64,
    rout: f64,
}

type LayoutKey = (u64, Vec<(u8, u8, u8)>);

struct Search<'a> {
    h: HangarConfig,
    cfg: &'a OracleConfig,
    acs: Vec<Ac<'a>>,
    priority: Vec<usize>,
    st: Vec<St>,
    best_cost: f64,
    best: Solution,
    nodes: u64,
    exhausted: bool,
    deadline: Instant,
    pack_cache: HashMap<u64, bool>,
    layout_cache: HashMap<LayoutKey, Option<(f64, Vec<(f64, f64)>)>>,
}

fn grid_ceil(v: f64, origin: f64, step: f64) -> f64 {
    origin + (((v - origin) / step) - TOL).ceil().max(0.0) * step
}

/// Coordinates reachable from the wall buffer by stacking buffered
/// footprints, rounded up to the grid.
fn stacked_coordinates(h: &HangarConfig, step: f64, fixed_edges: &[f64], sizes: &[f64], limit: f64) -> BTreeSet<u64> {
    let key = |v: f64| (v * 1e6).round() as u64;
    let mut out: BTreeSet<u64> = BTreeSet::new();
    let mut frontier: Vec<f64> = vec![h.buffer];
    frontier.extend(fixed_edges.iter().map(|&e| grid_ceil(e, h.buffer, step)));
    while let Some(v) = frontier.pop() {
        if v > limit + TOL || !out.insert(key(v)) {
            continue;
        }
        for &s in sizes {
            frontier.push(grid_ceil(v + s + h.buffer, h.buffer, step));
        }
    }
    out
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, cfg: &'a OracleConfig) -> Self {
        let h = instance.hangar;
        let step = cfg.grid_step;
        let futures: Vec<&AircraftSpec> = instance.future.iter().collect();
        let widths: Vec<f64> = futures.iter().map(|f| f.width).collect();
        let lengths: Vec<f64> = futures.iter().map(|f| f.length).collect();
        let x_edges: Vec<f64> = instance.current.iter().map(|c| c.x_init.unwrap_or(0.0) + c.width + h.buffer).collect();
        let y_edges: Vec<f64> = instance.current.iter().map(|c| c.y_init.unwrap_or(0.0) + c.length + h.buffer).collect();
        let xs = stacked_coordinates(&h, step, &x_edges, &widths, h.hw - h.buffer);
        let ys = stacked_coordinates(&h, step, &y_edges, &lengths, h.hl - h.buffer);
        let unkey = |k: &u64| *k as f64 / 1e6;

        let acs: Vec<Ac> = instance
            .aircraft()
            .map(|spec| {
                if spec.is_current() {
                    let p = (spec.x_init.unwrap_or(0.0), spec.y_init.unwrap_or(0.0));
                    return Ac { spec, current: true, t_max: 0.0, fits: true, spots: vec![p] };
                }
                let mut spots: Vec<(f64, f64)> = Vec::new();
                for x in xs.iter().map(unkey).filter(|&x| x + spec.width <= h.hw - h.buffer + TOL) {
                    for y in ys.iter().map(unkey).filter(|&y| y + spec.length <= h.hl - h.buffer + TOL) {
                        spots.push((x, y));
                    }
                }
                spots.sort_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)).then(a.1.total_cmp(&b.1)).then(a.0.total_cmp(&b.0)));
                let fits = h.fits(spec.width, spec.length) && !spots.is_empty();
                Ac { spec, current: false, t_max: max_admissible_time(spec), fits, spots }
            })
            .collect();

        let n_cur = instance.current.len();
        let mut priority: Vec<usize> = (n_cur..acs.len()).collect();
        priority.sort_by(|&a, &b| PriorityKey::of(acs[a].spec).cmp(&PriorityKey::of(acs[b].spec)));

        let (_, current_asg) = commit_current(instance);
        let mut seed: Vec<Assignment> = current_asg;
        seed.extend(instance.future.iter().map(|f| Assignment::rejected(f.id.clone())));
        let order: Vec<&str> = instance.aircraft().map(|a| a.id.as_str()).collect();
        seed.sort_by_key(|a| order.iter().position(|id| *id == a.aircraft_id));
        let best = Solution { instance_label: instance.label.clone(), assignments: seed, provenance: Provenance::Oracle };
        let best_cost = evaluate_cost(instance, &best).map(|c| c.total).unwrap_or(f64::INFINITY);

        let n = acs.len();
        Self {
            h,
            cfg,
            acs,
            priority,
            st: vec![St::Pending; n],
            best_cost,
            best,
            nodes: 0,
            exhausted: false,
            deadline: Instant::now() + Duration::from_secs_f64(cfg.time_budget.max(0.0)),
            pack_cache: HashMap::new(),
            layout_cache: HashMap::new(),
        }
    }

    fn earliest_in(&self, spec: &AircraftSpec, last: f64) -> f64 {
        let t = spec.eta.max(last + self.h.eps_t);
        match self.cfg.time_candidates {
            TimeCandidates::EventDriven => t,
            TimeCandidates::Grid { step } => (t / step - TOL).ceil() * step,
        }
    }

    fn earliest_out(&self, spec: &AircraftSpec, rin: f64, last: f64) -> f64 {
        (rin + spec.service).max(last + self.h.eps_t)
    }

    fn lower_bound(&self, last: f64, time_cost: f64) -> f64 {
        let pos = self.h.eps_p * 2.0 * self.h.buffer;
        let mut lb = time_cost;
        for (i, a) in self.acs.iter().enumerate() {
            let s = a.spec;
            lb += match self.st[i] {
                St::Present(rin) => {
                    let out = self.earliest_out(s, rin, last);
                    s.p_dep * (out - s.etd).max(0.0) + if a.current { 0.0 } else { pos }
                }
                St::Done(..) => {
                    if a.current {
                        0.0
                    } else {
                        pos
                    }
                }
                St::Pending => {
                    let t = self.earliest_in(s, last);
                    if a.fits && t <= a.t_max + TOL {
                        let accept = s.arrival_penalty() * (t - s.eta).max(0.0)
                            + s.p_dep * (t + s.service - s.etd).max(0.0)
                            + pos;
                        accept.min(s.rejection_penalty())
                    } else {
                        s.rejection_penalty()
                    }
                }
            };
        }
        lb
    }

    fn out_of_budget(&mut self) -> bool {
        if self.exhausted {
            return true;
        }
        if self.nodes >= self.cfg.node_budget || (self.nodes.is_multiple_of(512) && Instant::now() >= self.deadline) {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn dfs(&mut self, last: f64, time_cost: f64) {
        self.nodes += 1;
        if self.out_of_budget() {
            return;
        }
        if self.lower_bound(last, time_cost) >= self.best_cost - 1e-9 {
            return;
        }
        let present: Vec<usize> = (0..self.acs.len()).filter(|&i| matches!(self.st[i], St::Present(_))).collect();

        for k in 0..self.priority.len() {
            let f = self.priority[k];
            if self.st[f] != St::Pending || !self.acs[f].fits {
                continue;
            }
            let spec = self.acs[f].spec;
            let t = self.earliest_in(spec, last);
            if t > self.acs[f].t_max + TOL {
                continue;
            }
            let mask = present.iter().fold(1u64 << f, |m, &i| m | 1 << i);
            if !self.packable(mask) {
                continue;
            }
            self.st[f] = St::Present(t);
            let c = spec.arrival_penalty() * (t - spec.eta).max(0.0);
            self.dfs(t, time_cost + c);
            self.st[f] = St::Pending;
        }

        for &a in &present {
            let St::Present(rin) = self.st[a] else { unreachable!() };
            let spec = self.acs[a].spec;
            if self.acs[a].current && self.current_blocked(a, &present) {
                continue;
            }
            let t = self.earliest_out(spec, rin, last);
            self.st[a] = St::Done(rin, t);
            let c = spec.p_dep * (t - spec.etd).max(0.0);
            self.dfs(t, time_cost + c);
            self.st[a] = St::Present(rin);
        }

        if present.is_empty() {
            self.leaf(time_cost);
        }
    }

    /// A current aircraft cannot leave while another current one is
    /// parked in front of it.
    fn current_blocked(&self, a: usize, present: &[usize]) -> bool {
        let ra = self.acs[a].rect(self.acs[a].spots[0]);
        present.iter().any(|&d| {
            d != a && self.acs[d].current && self.acs[d].rect(self.acs[d].spots[0]).blocks(&ra, self.h.buffer)
        })
    }

    /// Whether the aircraft in `mask` fit in the hangar together, ignoring
    /// blocking.
    fn packable(&mut self, mask: u64) -> bool {
        if let Some(&v) = self.pack_cache.get(&mask) {
            return v;
        }
        let members: Vec<usize> = (0..self.acs.len()).filter(|i| mask & (1 << i) != 0).collect();
        let slots: Vec<Slot> = members.iter().map(|&ac| Slot { ac, rin: 0.0, rout: 1.0 }).collect();
        let rel = vec![vec![Rel::Separate; slots.len()]; slots.len()];
        let ok = self.layout(&slots, &rel, f64::INFINITY, true).is_some();
        self.pack_cache.insert(mask, ok);
        ok
    }

    fn leaf(&mut self, time_cost: f64) {
        let mut rejection = 0.0;
        let mut slots = Vec::new();
        for (i, a) in self.acs.iter().enumerate() {
            match self.st[i] {
                St::Pending => rejection += a.spec.rejection_penalty(),
                St::Done(rin, rout) => slots.push(Slot { ac: i, rin: if a.current { 0.0 } else { rin }, rout }),
                St::Present(_) => unreachable!("leaf with aircraft inside"),
            }
        }
        let base = time_cost + rejection;
        let n_future = slots.iter().filter(|s| !self.acs[s.ac].current).count() as f64;
        if base + self.h.eps_p * 2.0 * self.h.buffer * n_future >= self.best_cost - 1e-9 {
            return;
        }
        let n = slots.len();
        let mut rel = vec![vec![Rel::Free; n]; n];
        let mut key_pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (si, sj) = (slots[i], slots[j]);
                if si.rin.max(sj.rin) + TOL >= si.rout.min(sj.rout) {
                    continue;
                }
                let over = |u: Slot, l: Slot| {
                    let (uc, lc) = (self.acs[u.ac].current, self.acs[l.ac].current);
                    (lc || (!uc && l.rin < u.rin)) && u.rout < l.rout
                };
                let (ij, ji) = (over(si, sj), over(sj, si));
                rel[i][j] = Rel::CoPresent { upper_ok: ij, lower_ok: ji };
                rel[j][i] = Rel::CoPresent { upper_ok: ji, lower_ok: ij };
                key_pairs.push((si.ac as u8, sj.ac as u8, u8::from(ij) | u8::from(ji) << 1));
            }
        }
        let mask = slots.iter().fold(0u64, |m, s| m | 1 << s.ac);
        let key = (mask, key_pairs);
        let budget = if self.h.eps_p > 0.0 { (self.best_cost - base) / self.h.eps_p } else { f64::INFINITY };
        let layout = match self.layout_cache.get(&key) {
            Some(v) => v.clone(),
            None => {
                let v = self.layout(&slots, &rel, f64::INFINITY, self.h.eps_p == 0.0);
                self.layout_cache.insert(key, v.clone());
                v
            }
        };
        let Some((pos_sum, spots)) = layout else { return };
        if pos_sum > budget {
            return;
        }
        let total = base + self.h.eps_p * pos_sum;
        if total < self.best_cost - 1e-9 {
            self.best_cost = total;
            self.record(&slots, &spots);
        }
    }

    fn record(&mut self, slots: &[Slot], spots: &[(f64, f64)]) {
        let mut assignments: Vec<Assignment> =
            self.acs.iter().map(|a| Assignment::rejected(a.spec.id.clone())).collect();
        for (s, &(x, y)) in slots.iter().zip(spots) {
            assignments[s.ac] = Assignment::accepted(self.acs[s.ac].spec, x, y, s.rin, s.rout);
        }
        self.best.assignments = assignments;
    }

    /// Minimum `sum(x + y)` over future aircraft of a layout meeting
    /// `rel`, with the chosen spot of every slot. With `first` set, any
    /// feasible layout is returned.
    fn layout(&self, slots: &[Slot], rel: &[Vec<Rel>], bound: f64, first: bool) -> Option<(f64, Vec<(f64, f64)>)> {
        let n = slots.len();
        // Fixed aircraft first, then larger footprints.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (aa, ab) = (&self.acs[slots[a].ac], &self.acs[slots[b].ac]);
            ab.current
                .cmp(&aa.current)
                .then((ab.spec.width * ab.spec.length).total_cmp(&(aa.spec.width * aa.spec.length)))
                .then(a.cmp(&b))
        });
        let mut chosen: Vec<Option<(f64, f64)>> = vec![None; n];
        let mut best: Option<(f64, Vec<(f64, f64)>)> = None;
        let mut bound = bound;
        let min_rest: Vec<f64> = (0..=n)
            .map(|k| {
                order[k..]
                    .iter()
                    .map(|&i| {
                        let a = &self.acs[slots[i].ac];
                        if a.current {
                            0.0
                        } else {
                            a.spots.first().map_or(f64::INFINITY, |p| p.0 + p.1)
                        }
                    })
                    .sum()
            })
            .collect();
        self.place(slots, rel, &order, 0, 0.0, &min_rest, &mut chosen, &mut best, &mut bound, first);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn place(
        &self,
        slots: &[Slot],
        rel: &[Vec<Rel>],
        order: &[usize],
        k: usize,
        sum: f64,
        min_rest: &[f64],
        chosen: &mut Vec<Option<(f64, f64)>>,
        best: &mut Option<(f64, Vec<(f64, f64)>)>,
        bound: &mut f64,
        first: bool,
    ) -> bool {
        if k == order.len() {
            if sum < *bound - 1e-9 || best.is_none() {
                *bound = sum;
                *best = Some((sum, chosen.iter().map(|c| c.expect("all placed")).collect()));
            }
            return first;
        }
        let i = order[k];
        let a = &self.acs[slots[i].ac];
        for &p in &a.spots {
            let cost = if a.current { 0.0 } else { p.0 + p.1 };
            if sum + cost + min_rest[k + 1] >= *bound - 1e-9 && best.is_some() {
                break;
            }
            let r = a.rect(p);
            let ok = order[..k].iter().all(|&j| {
                let other = self.acs[slots[j].ac].rect(chosen[j].expect("placed earlier"));
                rel[i][j].allows(&r, &other, self.h.buffer)
            });
            if !ok {
                continue;
            }
            chosen[i] = Some(p);
            if self.place(slots, rel, order, k + 1, sum + cost, min_rest, chosen, best, bound, first) {
                return true;
            }
            chosen[i] = None;
        }
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Rel {
    /// Never inside together.
    Free,
    /// Must not overlap; blocking ignored.
    Separate,
    /// Inside together. `upper_ok`: this aircraft may sit in front of the
    /// other in its lane; `lower_ok`: the other may sit in front of this one.
    CoPresent { upper_ok: bool, lower_ok: bool },
}

impl Rel {
    fn allows(&self, me: &Footprint, other: &Footprint, buffer: f64) -> bool {
        match *self {
            Rel::Free => true,
            Rel::Separate => me.separated(other, buffer),
            Rel::CoPresent { upper_ok, lower_ok } => {
                if me.x_separated(other, buffer) {
                    true
                } else if me.above(other, buffer) {
                    upper_ok
                } else if other.above(me, buffer) {
                    lower_ok
                } else {
                    false
                }
            }
        }
    }
}

/// Finds a minimum-cost plan on the position grid.
pub fn solve_exact(instance: &Instance, config: &OracleConfig) -> Result<OracleResult> {
    instance.validate()?;
    if instance.future.len() > config.max_future || instance.len() > 63 {
        return Err(Error::InstanceTooLarge { future: instance.future.len(), limit: config.max_future });
    }
    if !(config.grid_step > 0.0) || config.node_budget == 0 || !(config.time_budget > 0.0) {
        return Err(Error::InvalidConfig("oracle budgets and grid step must be positive".into()));
    }
    if let TimeCandidates::Grid { step } = config.time_candidates {
        if !(step > 0.0) {
            return Err(Error::InvalidConfig("time grid step must be positive".into()));
        }
    }
    let mut s = Search::new(instance, config);
    for i in 0..instance.current.len() {
        s.st[i] = St::Present(0.0);
    }
    s.dfs(f64::NEG_INFINITY, 0.0);
    let status = if s.exhausted { OracleStatus::BudgetExhausted } else { OracleStatus::ProvenOptimalOnGrid };
    let cost = evaluate_cost(instance, &s.best)?;
    Ok(OracleResult { solution: s.best, cost, status, nodes_explored: s.nodes })
}
