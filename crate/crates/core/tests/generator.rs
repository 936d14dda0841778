//! Instance generator: distribution anchors and the congestion and
//! high-rejection variants.

use hangar_core::instgen::{generate, GeneratorConfig, DEFAULT_CONGESTION, DEFAULT_HIGH_REJECTION_FACTOR};
use hangar_core::{Error, HangarConfig};
use statrs::distribution::{Binomial, DiscreteCDF};

#[test]
fn five_hundred_aircraft_match_the_distributions() {
    let inst = generate(&GeneratorConfig::new(500, 12345), &HangarConfig::default()).unwrap();
    assert_eq!(inst.future.len(), 500);
    let vip = inst.future.iter().filter(|f| f.vip).count() as u64;
    let b = Binomial::new(0.2, 500).unwrap();
    let (lo, hi) = (b.inverse_cdf(0.0005), b.inverse_cdf(0.9995));
    assert!((lo..=hi).contains(&vip), "{vip} VIP aircraft outside [{lo}, {hi}]");
    for f in &inst.future {
        assert!((100.0..=400.0).contains(&f.service), "{}: service {}", f.id, f.service);
        let slack = f.etd - f.eta - f.service;
        assert!((24.0 - 1e-9..=72.0 + 1e-9).contains(&slack), "{}: slack {slack}", f.id);
        assert!(f.eta >= 0.0 && f.eta <= 500.0 * 80.0, "{}: eta {}", f.id, f.eta);
        let (p_rej, p_arr) = (f.rejection_penalty(), f.arrival_penalty());
        if f.vip {
            assert!((1500.0..=2000.0).contains(&p_rej));
            assert_eq!((p_arr, f.p_dep), (30.0, 60.0));
        } else {
            assert!((700.0..=1200.0).contains(&p_rej));
            assert_eq!((p_arr, f.p_dep), (10.0, 20.0));
        }
    }
}

#[test]
fn congestion_shrinks_gaps_and_keeps_stays() {
    let h = HangarConfig::default();
    let base_cfg = GeneratorConfig::new(8, 77);
    let mut c = base_cfg.clone();
    c.congestion = Some(DEFAULT_CONGESTION);
    let (base, tight) = (generate(&base_cfg, &h).unwrap(), generate(&c, &h).unwrap());
    assert_eq!(tight.label, "Inst-08-77-C");
    let first = base.future.iter().map(|f| f.eta).fold(f64::INFINITY, f64::min);
    for (a, b) in base.future.iter().zip(&tight.future) {
        assert!((b.eta - (first + (a.eta - first) * DEFAULT_CONGESTION)).abs() < 1e-9);
        assert!(((b.etd - b.eta) - (a.etd - a.eta)).abs() < 1e-9);
        assert_eq!((a.width, a.length, a.service, a.vip), (b.width, b.length, b.service, b.vip));
    }
}

#[test]
fn high_rejection_scales_only_the_rejection_penalty() {
    let h = HangarConfig::default();
    let base_cfg = GeneratorConfig::new(6, 3);
    let mut c = base_cfg.clone();
    c.high_rejection = true;
    let (base, high) = (generate(&base_cfg, &h).unwrap(), generate(&c, &h).unwrap());
    assert_eq!(high.label, "Inst-06-3+");
    for (a, b) in base.future.iter().zip(&high.future) {
        assert_eq!(b.rejection_penalty(), a.rejection_penalty() * DEFAULT_HIGH_REJECTION_FACTOR);
        assert_eq!((a.eta, a.etd, a.arrival_penalty()), (b.eta, b.etd, b.arrival_penalty()));
    }
}

#[test]
fn oversize_catalog_is_refused() {
    let mut c = GeneratorConfig::new(3, 1);
    c.model_catalog = vec![(24.0, 22.0), (70.0, 30.0)];
    assert!(matches!(generate(&c, &HangarConfig::default()), Err(Error::CatalogDoesNotFit(_))));
}

#[test]
fn current_aircraft_sit_inside_and_apart() {
    let mut c = GeneratorConfig::new(4, 8);
    c.n_current = 3;
    c.model_catalog = vec![(24.0, 22.0)];
    let inst = generate(&c, &HangarConfig::default()).unwrap();
    assert_eq!(inst.current.len(), 3);
    inst.validate().unwrap();
    let mut too_many = c.clone();
    too_many.n_current = 9;
    assert!(matches!(
        generate(&too_many, &HangarConfig::default()),
        Err(Error::PlacementImpossible { requested: 9, .. })
    ));
}
