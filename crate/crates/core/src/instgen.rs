//! Seeded benchmark instance generator.
//!
//! Randomness comes from ChaCha8 seeded with the master seed; every
//! parameter type draws from its own stream so that adding a parameter
//! later leaves the existing draws untouched. Stream numbers:
//!
//! | stream | draws |
//! |---|---|
//! | 0 | ETA |
//! | 1 | service time |
//! | 2 | departure buffer time |
//! | 3 | aircraft model |
//! | 4 | VIP flag |
//! | 5 | rejection penalty |
//! | 6..=9 | service, buffer, model and VIP of current aircraft |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ach::grid_scan_order;
use crate::error::{Error, Result};
use crate::geometry::Footprint;
use crate::model::{AircraftSpec, HangarConfig, Instance};

/// Default model catalog, `(width, length)` in meters.
pub const DEFAULT_CATALOG: [(f64, f64); 8] =
    [(24.0, 22.0), (26.0, 24.0), (28.0, 26.0), (30.0, 30.0), (34.0, 34.0), (36.0, 38.0), (40.0, 42.0), (45.0, 48.0)];

pub const DEFAULT_CONGESTION: f64 = 0.2;
pub const DEFAULT_HIGH_REJECTION_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n: usize,
    pub seed: u64,
    /// Hours of arrival window per aircraft.
    pub time_horizon_factor: f64,
    pub serv_range: (f64, f64),
    pub buffer_time_range: (f64, f64),
    pub vip_prob: f64,
    pub p_rej_vip: (u32, u32),
    pub p_rej_normal: (u32, u32),
    /// `(p_arr, p_dep)`.
    pub delay_penalties_normal: (f64, f64),
    pub delay_penalties_vip: (f64, f64),
    pub model_catalog: Vec<(f64, f64)>,
    /// Inter-arrival gaps are multiplied by this factor.
    pub congestion: Option<f64>,
    pub n_current: usize,
    pub high_rejection: bool,
    pub high_rejection_factor: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n: 10,
            seed: 1,
            time_horizon_factor: 80.0,
            serv_range: (100.0, 400.0),
            buffer_time_range: (24.0, 72.0),
            vip_prob: 0.2,
            p_rej_vip: (1500, 2000),
            p_rej_normal: (700, 1200),
            delay_penalties_normal: (10.0, 20.0),
            delay_penalties_vip: (30.0, 60.0),
            model_catalog: DEFAULT_CATALOG.to_vec(),
            congestion: None,
            n_current: 0,
            high_rejection: false,
            high_rejection_factor: DEFAULT_HIGH_REJECTION_FACTOR,
        }
    }
}

impl GeneratorConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, seed, ..Self::default() }
    }

    fn check(&self, hangar: &HangarConfig) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        let range_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi;
        if !range_ok(self.serv_range) || self.serv_range.0 <= 0.0 {
            return bad("service range must be positive and ordered");
        }
        if !range_ok(self.buffer_time_range) {
            return bad("buffer time range must be non-negative and ordered");
        }
        if self.p_rej_vip.0 > self.p_rej_vip.1 || self.p_rej_normal.0 > self.p_rej_normal.1 {
            return bad("rejection penalty ranges must be ordered");
        }
        if !(0.0..=1.0).contains(&self.vip_prob) {
            return bad("vip probability must lie in [0, 1]");
        }
        if !(self.time_horizon_factor >= 0.0 && self.time_horizon_factor.is_finite()) {
            return bad("time horizon factor must be non-negative");
        }
        if let Some(c) = self.congestion {
            if !(c > 0.0 && c <= 1.0) {
                return bad("congestion factor must lie in (0, 1]");
            }
        }
        if !(self.high_rejection_factor >= 0.0 && self.high_rejection_factor.is_finite()) {
            return bad("high rejection factor must be non-negative");
        }
        if self.model_catalog.is_empty() {
            return bad("model catalog is empty");
        }
        for &(w, l) in &self.model_catalog {
            if !(w > 0.0 && l > 0.0) || !hangar.fits(w, l) {
                return Err(Error::CatalogDoesNotFit(format!("{w} x {l}")));
            }
        }
        Ok(())
    }

    /// `Inst-<N>-<seed>`, with `-C` for compressed arrivals and `+` for
    /// raised rejection penalties.
    pub fn label(&self) -> String {
        let mut s = format!("Inst-{:02}-{}", self.n, self.seed);
        if self.congestion.is_some() {
            s.push_str("-C");
        }
        if self.high_rejection {
            s.push('+');
        }
        s
    }
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

struct Streams {
    service: ChaCha8Rng,
    buffer: ChaCha8Rng,
    model: ChaCha8Rng,
    vip: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64, base: u64) -> Self {
        Self {
            service: stream(seed, base),
            buffer: stream(seed, base + 1),
            model: stream(seed, base + 2),
            vip: stream(seed, base + 3),
        }
    }
}

/// Compresses gaps between consecutive sorted arrivals by `factor`,
/// keeping the earliest arrival in place.
pub fn compress_arrivals(etas: &mut [f64], factor: f64) {
    let mut order: Vec<usize> = (0..etas.len()).collect();
    order.sort_by(|&a, &b| etas[a].total_cmp(&etas[b]).then(a.cmp(&b)));
    let Some(&first) = order.first() else { return };
    let origin = etas[first];
    for i in order {
        etas[i] = origin + factor * (etas[i] - origin);
    }
}

/// Builds an instance; a pure function of `(config, hangar)`.
pub fn generate(config: &GeneratorConfig, hangar: &HangarConfig) -> Result<Instance> {
    hangar.validate()?;
    config.check(hangar)?;
    let seed = config.seed;
    let eta_max = config.n as f64 * config.time_horizon_factor;

    let mut eta_rng = stream(seed, 0);
    let mut etas: Vec<f64> = (0..config.n).map(|_| uniform(&mut eta_rng, (0.0, eta_max))).collect();
    if let Some(c) = config.congestion {
        compress_arrivals(&mut etas, c);
    }

    let mut s = Streams::new(seed, 1);
    let mut prej_rng = stream(seed, 5);
    let mut future = Vec::with_capacity(config.n);
    for (i, &eta) in etas.iter().enumerate() {
        let service = uniform(&mut s.service, config.serv_range);
        let slack = uniform(&mut s.buffer, config.buffer_time_range);
        let (w, l) = config.model_catalog[s.model.random_range(0..config.model_catalog.len())];
        let vip = s.vip.random_bool(config.vip_prob);
        let (lo, hi) = if vip { config.p_rej_vip } else { config.p_rej_normal };
        let mut p_rej = prej_rng.random_range(lo..=hi) as f64;
        if config.high_rejection {
            p_rej *= config.high_rejection_factor;
        }
        let (p_arr, p_dep) = if vip { config.delay_penalties_vip } else { config.delay_penalties_normal };
        let mut spec = AircraftSpec::future(format!("f{:02}", i + 1), w, l, eta, eta + service + slack, service, p_rej, p_arr, p_dep);
        spec.vip = vip;
        future.push(spec);
    }

    let current = place_current(config, hangar)?;
    let instance = Instance { hangar: *hangar, current, future, label: config.label() };
    instance.validate()?;
    Ok(instance)
}

fn place_current(config: &GeneratorConfig, hangar: &HangarConfig) -> Result<Vec<AircraftSpec>> {
    let mut s = Streams::new(config.seed, 6);
    let mut placed: Vec<Footprint> = Vec::new();
    let mut out = Vec::with_capacity(config.n_current);
    for i in 0..config.n_current {
        let service = uniform(&mut s.service, config.serv_range);
        let slack = uniform(&mut s.buffer, config.buffer_time_range);
        let (w, l) = config.model_catalog[s.model.random_range(0..config.model_catalog.len())];
        let vip = s.vip.random_bool(config.vip_prob);
        let spot = grid_scan_order(hangar, w, l, hangar.grid_step)
            .into_iter()
            .map(|(x, y)| Footprint::new(x, y, w, l))
            .find(|fp| placed.iter().all(|p| p.separated(fp, hangar.buffer)));
        let Some(fp) = spot else {
            return Err(Error::PlacementImpossible { placed: i, requested: config.n_current });
        };
        placed.push(fp);
        let p_dep = if vip { config.delay_penalties_vip.1 } else { config.delay_penalties_normal.1 };
        let mut spec = AircraftSpec::current(format!("c{:02}", i + 1), w, l, fp.x, fp.y, service + slack, service, p_dep);
        spec.vip = vip;
        out.push(spec);
    }
    Ok(out)
}
