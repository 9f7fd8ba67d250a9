mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use ebitsim_core::harness::{
    estimate_joint, max_discrepancy_curve, phi_grid, substream, sweep_phi,
};
use ebitsim_core::hilbert::sample_haar_basis;
use ebitsim_core::oracle::born_joint;
use ebitsim_core::{OrthonormalBasis, Protocol, ProtocolKind};

#[test]
fn estimates_are_normalized() {
    let mut rng = substream(400, 0);
    let ma = sample_haar_basis(5, &mut rng).unwrap();
    let mb = sample_haar_basis(5, &mut rng).unwrap();
    let p = Protocol::new(ProtocolKind::P1, 5).unwrap();
    let trials = 12_345;
    let est = estimate_joint(&p, &ma, &mb, trials, 401).unwrap();
    assert_eq!(est.trials(), trials);
    assert_eq!(est.counts().iter().flatten().sum::<u64>(), trials);
    let total: f64 = est.estimates().iter().flatten().sum();
    assert!((total - 1.0).abs() <= 1.0 / trials as f64);
    for (e, s) in est
        .estimates()
        .iter()
        .flatten()
        .zip(est.stderrs().iter().flatten())
    {
        assert!((s - (e * (1.0 - e) / trials as f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn exact_qubit_model_matches_born_rule() {
    let mut rng = substream(402, 0);
    let ma = sample_haar_basis(2, &mut rng).unwrap();
    let mb = sample_haar_basis(2, &mut rng).unwrap();
    let p = Protocol::new(ProtocolKind::TonerBacon, 2).unwrap();
    let trials = 1_000_000;
    let est = estimate_joint(&p, &ma, &mb, trials, 403).unwrap();
    let born = born_joint(&ma, &mb).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            let q = born.get(a, b);
            let sigma = (q * (1.0 - q) / trials as f64).sqrt();
            assert!((est.estimate(a, b) - q).abs() <= 3.0 * sigma);
        }
    }
}

#[test]
fn sweep_points_are_consistent() {
    let p = Protocol::new(ProtocolKind::P2a, 3).unwrap();
    let mb = OrthonormalBasis::computational(3).unwrap();
    let points = sweep_phi(&p, &mb, &phi_grid(9), 20_000, 404).unwrap();
    assert_eq!(points.len(), 9);
    for pt in &points {
        assert!((0.0..=1.0).contains(&pt.p_model));
        assert_eq!(pt.discrepancy, (pt.p_model - pt.p_quantum).abs());
        assert_eq!(pt.p_quantum, pt.phi.cos().powi(2));
    }
}

#[test]
fn p2b_is_exact_at_the_family_endpoints() {
    for dim in [3, 4, 10] {
        let p = Protocol::new(ProtocolKind::P2b, dim).unwrap();
        let mb = OrthonormalBasis::computational(dim).unwrap();
        let points = sweep_phi(&p, &mb, &[0.0, FRAC_PI_2], 50_000, 405).unwrap();
        for pt in points {
            assert!(pt.discrepancy <= 3.0 * pt.stderr + 1e-15, "N={dim}: {pt:?}");
        }
    }
}

/// Repeated short runs: the 5 sigma interval covers the long-run value.
#[test]
fn error_bars_are_calibrated() {
    let p = Protocol::new(ProtocolKind::P2b, 3).unwrap();
    let mb = OrthonormalBasis::computational(3).unwrap();
    let grid = [FRAC_PI_4];
    let reference = sweep_phi(&p, &mb, &grid, 2_000_000, 406).unwrap()[0].p_model;
    let covered = (0..100u64)
        .filter(|&r| {
            let pt = sweep_phi(&p, &mb, &grid, 10_000, 1_000 + r).unwrap()[0];
            (pt.p_model - reference).abs() <= 5.0 * pt.stderr
        })
        .count();
    assert!(covered >= 95, "{covered}/100");
}

#[test]
fn curves_are_reproducible() {
    let grid = phi_grid(5);
    let run = || max_discrepancy_curve(ProtocolKind::P1, &[3, 4], &grid, 20_000, 407).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.len(), 2);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.max_discrepancy.to_bits(), y.max_discrepancy.to_bits());
        assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
    }
    assert_eq!((a[0].dim, a[1].dim), (3, 4));
}
