//! Fixtures and reference computations shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

use hangar_core::geometry::grid_points;
use hangar_core::{
    evaluate_cost, validate, AircraftSpec, Assignment, HangarConfig, Instance, Provenance, Solution, ViolationKind,
};

pub fn fut(id: &str, w: f64, l: f64, eta: f64, service: f64, etd: f64) -> AircraftSpec {
    AircraftSpec::future(id, w, l, eta, etd, service, 1000.0, 10.0, 20.0)
}

pub fn plan(current: Vec<AircraftSpec>, future: Vec<AircraftSpec>, asg: Vec<(f64, f64, f64, f64)>) -> (Instance, Solution) {
    let inst = Instance { hangar: HangarConfig::default(), current, future, label: "fx".into() };
    let assignments = inst
        .aircraft()
        .zip(asg)
        .map(|(spec, (x, y, rin, rout))| Assignment::accepted(spec, x, y, rin, rout))
        .collect();
    let sol = Solution { instance_label: "fx".into(), assignments, provenance: Provenance::Manual };
    (inst, sol)
}

/// Two aircraft in one lane; `b` parked in front of `a` until 120.
pub fn blocking_pair(rout_a: f64) -> (Instance, Solution) {
    plan(
        vec![],
        vec![fut("a", 30.0, 20.0, 0.0, 50.0, 100.0), fut("b", 30.0, 20.0, 10.0, 100.0, 200.0)],
        vec![(5.0, 5.0, 0.0, rout_a), (5.0, 30.0, 10.0, 120.0)],
    )
}

pub fn families(kind: ViolationKind) -> &'static [&'static str] {
    match kind {
        ViolationKind::OutOfBounds => &["eq7_xmin", "eq8_xmax", "eq9_ymin", "eq10_ymax"],
        ViolationKind::SpatialOverlap => &["eq11_right", "eq12_above", "eq13_sep"],
        ViolationKind::ServiceTooShort => &["eq4_servt"],
        ViolationKind::EarlyRollIn => &["eq3_eta"],
        ViolationKind::MovementTooClose => &[
            "eq14_outin",
            "eq15_inin",
            "eq16_inin",
            "eq15b_outout",
            "eq16b_outout",
            "eq16c_inout",
            "eq16d_inout",
        ],
        ViolationKind::ExitBlocked => &["eq17_exitblock"],
        ViolationKind::EntryBlocked => &["eq18_entryblock"],
        ViolationKind::CurrentStateMismatch => &["fix19_accept", "fix20_x", "fix21_y", "fix22_rollin"],
        ViolationKind::NegativeTime => &["dom_nonneg"],
    }
}

pub fn fixture(kind: ViolationKind) -> (Instance, Solution) {
    let side = |id: &str, eta: f64| fut(id, 24.0, 20.0, eta, 100.0, 300.0);
    match kind {
        ViolationKind::OutOfBounds => plan(vec![], vec![fut("a", 30.0, 20.0, 0.0, 50.0, 100.0)], vec![(40.0, 5.0, 0.0, 50.0)]),
        ViolationKind::SpatialOverlap => plan(
            vec![],
            vec![side("a", 0.0), side("b", 10.0)],
            vec![(5.0, 5.0, 0.0, 100.0), (30.0, 5.0, 10.0, 110.0)],
        ),
        ViolationKind::ServiceTooShort => plan(vec![], vec![fut("a", 30.0, 20.0, 0.0, 100.0, 300.0)], vec![(5.0, 5.0, 0.0, 50.0)]),
        ViolationKind::EarlyRollIn => plan(vec![], vec![fut("a", 30.0, 20.0, 10.0, 50.0, 300.0)], vec![(5.0, 5.0, 5.0, 60.0)]),
        ViolationKind::MovementTooClose => plan(
            vec![],
            vec![side("a", 0.0), side("b", 10.0)],
            vec![(5.0, 5.0, 0.0, 200.0), (36.0, 5.0, 10.0, 200.05)],
        ),
        ViolationKind::ExitBlocked => blocking_pair(100.0),
        ViolationKind::EntryBlocked => plan(
            vec![],
            vec![fut("a", 30.0, 20.0, 0.0, 100.0, 300.0), fut("b", 30.0, 20.0, 10.0, 100.0, 300.0)],
            vec![(5.0, 30.0, 0.0, 200.0), (5.0, 5.0, 10.0, 300.0)],
        ),
        ViolationKind::CurrentStateMismatch => plan(
            vec![AircraftSpec::current("c", 30.0, 20.0, 5.0, 5.0, 100.0, 50.0, 20.0)],
            vec![],
            vec![(10.0, 5.0, 0.0, 60.0)],
        ),
        ViolationKind::NegativeTime => plan(vec![], vec![fut("a", 30.0, 20.0, 0.0, 50.0, 300.0)], vec![(5.0, 5.0, -2.0, 60.0)]),
    }
}

#[derive(Clone, Copy)]
enum Ev {
    In(usize),
    Out(usize),
}

fn orders(pending: &mut Vec<Ev>, seq: &mut Vec<Ev>, inside: &mut Vec<bool>, out: &mut Vec<Vec<Ev>>) {
    if pending.is_empty() {
        out.push(seq.clone());
        return;
    }
    for k in 0..pending.len() {
        let e = pending[k];
        if let Ev::Out(i) = e {
            if !inside[i] {
                continue;
            }
        }
        pending.remove(k);
        seq.push(e);
        if let Ev::In(i) = e {
            inside[i] = true;
        }
        orders(pending, seq, inside, out);
        if let Ev::In(i) = e {
            inside[i] = false;
        }
        seq.pop();
        pending.insert(k, e);
    }
}

/// Every acceptance subset, every event order at its earliest times and
/// every pair of grid positions, checked by the validator.
pub fn brute_force(inst: &Instance, step: f64) -> f64 {
    let h = inst.hangar;
    let all: Vec<&AircraftSpec> = inst.aircraft().collect();
    let n_cur = inst.current.len();
    let n_fut = inst.future.len();
    let mut best = f64::INFINITY;
    for subset in 0..(1u32 << n_fut) {
        let acc: Vec<usize> = (0..n_fut).filter(|k| subset & (1 << k) != 0).map(|k| n_cur + k).collect();
        let mut pending: Vec<Ev> = (0..n_cur).map(Ev::Out).collect();
        for &a in &acc {
            pending.push(Ev::In(a));
            pending.push(Ev::Out(a));
        }
        let mut inside = vec![false; all.len()];
        for c in inside.iter_mut().take(n_cur) {
            *c = true;
        }
        let mut seqs = Vec::new();
        orders(&mut pending, &mut Vec::new(), &mut inside, &mut seqs);
        let spots: Vec<Vec<(f64, f64)>> = acc
            .iter()
            .map(|&a| {
                let xs = grid_points(h.buffer, h.hw - h.buffer - all[a].width, step);
                let ys = grid_points(h.buffer, h.hl - h.buffer - all[a].length, step);
                xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
            })
            .collect();
        for seq in &seqs {
            let mut rin = vec![0.0; all.len()];
            let mut rout = vec![0.0; all.len()];
            let mut last = f64::NEG_INFINITY;
            for e in seq {
                last = match *e {
                    Ev::In(i) => {
                        rin[i] = all[i].eta.max(last + h.eps_t);
                        rin[i]
                    }
                    Ev::Out(i) => {
                        rout[i] = (rin[i] + all[i].service).max(last + h.eps_t);
                        rout[i]
                    }
                };
            }
            let mut pick = vec![0usize; acc.len()];
            loop {
                let assignments: Vec<Assignment> = all
                    .iter()
                    .enumerate()
                    .map(|(i, spec)| {
                        if i < n_cur {
                            Assignment::accepted(spec, spec.x_init.unwrap(), spec.y_init.unwrap(), 0.0, rout[i])
                        } else if let Some(k) = acc.iter().position(|&a| a == i) {
                            let (x, y) = spots[k][pick[k]];
                            Assignment::accepted(spec, x, y, rin[i], rout[i])
                        } else {
                            Assignment::rejected(spec.id.clone())
                        }
                    })
                    .collect();
                let sol = Solution { instance_label: inst.label.clone(), assignments, provenance: Provenance::Manual };
                let cost = evaluate_cost(inst, &sol).unwrap().total;
                if cost < best && validate(inst, &sol).unwrap().feasible {
                    best = cost;
                }
                let mut k = 0;
                while k < pick.len() {
                    pick[k] += 1;
                    if pick[k] < spots[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == pick.len() {
                    break;
                }
            }
        }
    }
    best
}

