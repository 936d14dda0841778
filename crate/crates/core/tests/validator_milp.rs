//! The validator and the MILP row system agree: feasible plans satisfy
//! every row, and each kind of violation breaks its own row family.

mod common;

use hangar_core::exact::{solve_exact, OracleConfig};
use hangar_core::instgen::{generate, GeneratorConfig, DEFAULT_CONGESTION};
use hangar_core::milp::{build_model, check_satisfaction, derive_binaries, objective_value, MilpModel, Point, VarKind};
use hangar_core::{ach, evaluate_cost, validate, AircraftSpec, HangarConfig, Instance, ViolationKind};

use common::{blocking_pair, families, fixture};

fn violated_families(model: &MilpModel, point: &Point) -> Vec<String> {
    check_satisfaction(model, point).unwrap().iter().map(|v| v.family().to_string()).collect()
}

#[test]
fn each_violation_kind_breaks_its_row_family() {
    for kind in ViolationKind::ALL {
        let (inst, sol) = fixture(kind);
        let report = validate(&inst, &sol).unwrap();
        assert!(report.kinds().contains(&kind), "{kind}: validator found {:?}", report.kinds());
        let model = build_model(&inst);
        let point = derive_binaries(&model, &inst, &sol).unwrap();
        let hit = violated_families(&model, &point);
        assert!(
            hit.iter().any(|f| families(kind).contains(&f.as_str())),
            "{kind}: violated families {hit:?}"
        );
    }
}

#[test]
fn directed_fixtures_are_kind_specific() {
    for kind in ViolationKind::ALL {
        if kind == ViolationKind::NegativeTime {
            // A negative roll-in is also earlier than any admissible arrival.
            continue;
        }
        let (inst, sol) = fixture(kind);
        let kinds = validate(&inst, &sol).unwrap().kinds();
        assert_eq!(kinds, vec![kind]);
    }
}

/// With positions and times fixed, no choice of the free binaries makes
/// the point feasible.
#[test]
fn no_binary_completion_repairs_a_fixture() {
    for kind in ViolationKind::ALL {
        let (inst, sol) = fixture(kind);
        let model = build_model(&inst);
        let base = derive_binaries(&model, &inst, &sol).unwrap();
        let free: Vec<String> = model
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary && !v.is_fixed() && !v.name.starts_with("Accept("))
            .map(|v| v.name.clone())
            .collect();
        assert!(free.len() <= 12, "{kind}: {} free binaries", free.len());
        for bits in 0..(1u32 << free.len()) {
            let mut p = base.clone();
            for (k, name) in free.iter().enumerate() {
                p.insert(name.clone(), f64::from(bits >> k & 1));
            }
            assert!(!check_satisfaction(&model, &p).unwrap().is_empty(), "{kind}: completion {bits:b} is feasible");
        }
    }
}

#[test]
fn blocking_pair_splits_validator_and_rows_alike() {
    let eps = HangarConfig::default().eps_t;
    for (rout_a, feasible) in [(100.0, false), (120.0 + eps, true), (150.0, true)] {
        let (inst, sol) = blocking_pair(rout_a);
        let report = validate(&inst, &sol).unwrap();
        assert_eq!(report.feasible, feasible, "roll-out {rout_a}");
        assert_eq!(report.kinds().contains(&ViolationKind::ExitBlocked), !feasible);
        let model = build_model(&inst);
        let hit = violated_families(&model, &derive_binaries(&model, &inst, &sol).unwrap());
        assert_eq!(hit.iter().any(|f| f == "eq17_exitblock"), !feasible, "roll-out {rout_a}: {hit:?}");
        assert_eq!(hit.is_empty(), feasible);
    }
}

fn generated() -> Vec<Instance> {
    let h = HangarConfig::default();
    let mut out = Vec::new();
    for n in 1..=15 {
        for seed in [3, 17, 101] {
            let mut c = GeneratorConfig::new(n, seed);
            out.push(generate(&c, &h).unwrap());
            c.congestion = Some(DEFAULT_CONGESTION);
            out.push(generate(&c, &h).unwrap());
        }
    }
    let mut c = GeneratorConfig::new(6, 9);
    c.n_current = 2;
    c.model_catalog = vec![(24.0, 22.0), (26.0, 24.0)];
    out.push(generate(&c, &h).unwrap());
    out
}

#[test]
fn heuristic_plans_satisfy_every_row_and_price_identically() {
    for inst in generated() {
        let sol = ach::solve(&inst);
        assert!(validate(&inst, &sol).unwrap().feasible, "{}", inst.label);
        let model = build_model(&inst);
        let point = derive_binaries(&model, &inst, &sol).unwrap();
        let bad = check_satisfaction(&model, &point).unwrap();
        assert!(bad.is_empty(), "{}: {:?}", inst.label, &bad[..bad.len().min(5)]);
        let cost = evaluate_cost(&inst, &sol).unwrap().total;
        let obj = objective_value(&model, &point).unwrap();
        assert!((obj - cost).abs() <= 1e-6, "{}: objective {obj} cost {cost}", inst.label);
    }
}

#[test]
fn oracle_plans_satisfy_every_row() {
    let h = HangarConfig::default();
    for n in 1..=3 {
        for seed in 1..=8 {
            let inst = generate(&GeneratorConfig::new(n, seed), &h).unwrap();
            let r = solve_exact(&inst, &OracleConfig::default()).unwrap();
            let model = build_model(&inst);
            let point = derive_binaries(&model, &inst, &r.solution).unwrap();
            assert!(check_satisfaction(&model, &point).unwrap().is_empty(), "{}", inst.label);
            assert!((objective_value(&model, &point).unwrap() - r.cost.total).abs() <= 1e-6);
        }
    }
}

/// The time Big-M is the latest arrival plus all service times. A plan
/// that delays an accepted aircraft past that horizon while rejecting
/// another is valid, yet the single-M rows for the pair cannot be met.
#[test]
fn time_big_m_is_short_for_late_plans() {
    let huge = |id: &str, eta: f64, service: f64, p_rej: f64| {
        AircraftSpec::future(id, 55.0, 50.0, eta, eta + service + 500.0, service, p_rej, 10.0, 20.0)
    };
    let inst = Instance {
        hangar: HangarConfig::default(),
        current: vec![],
        future: vec![huge("f", 0.0, 50.0, 1000.0), huge("o", 10.0, 50.0, 2000.0), huge("r", 9.995, 0.01, 0.0)],
        label: "late".into(),
    };
    let sol = ach::solve(&inst);
    assert!(validate(&inst, &sol).unwrap().feasible);
    assert!(!sol.get("r").unwrap().accept);
    let f = sol.get("f").unwrap();
    let model = build_model(&inst);
    assert!(f.roll_out > model.big_m.time - inst.hangar.eps_t);
    let bad = check_satisfaction(&model, &derive_binaries(&model, &inst, &sol).unwrap()).unwrap();
    assert!(!bad.is_empty());
}
