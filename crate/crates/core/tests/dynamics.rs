use approx::assert_abs_diff_eq;
use macroq_core::catalog::{make_scs, make_squeezed_vacuum, make_thermal, DecoheredScsParams, GaussianChar};
use macroq_core::lindblad::{evolve, EvolutionSpec, TrajectoryPoint};
use macroq_core::phase_space::quadrature_second_moments;

fn at(traj: &[TrajectoryPoint], tau: f64) -> &TrajectoryPoint {
    traj.iter()
        .find(|p| (p.tau - tau).abs() < 1e-9)
        .expect("recorded point")
}

/// `dP/dtau` by a 5-point centred stencil over equally spaced records.
fn purity_rate(traj: &[TrajectoryPoint], k: usize) -> f64 {
    let h = traj[k + 1].tau - traj[k].tau;
    (traj[k - 2].purity - 8.0 * traj[k - 1].purity + 8.0 * traj[k + 1].purity - traj[k + 2].purity) / (12.0 * h)
}

#[test]
fn cat_trajectory_follows_closed_form() {
    let rho = make_scs(2.0, 40).unwrap().to_density();
    let traj = evolve(&rho, &EvolutionSpec::new(0.7, 0.0025, 1).unwrap()).unwrap();
    let n0 = traj[0].mean_n;
    for tau in [0.1, 0.3, 0.7] {
        let p = at(&traj, tau);
        let exact = DecoheredScsParams::from_tau(2.0, tau).unwrap();
        let rel = (p.measure - exact.measure()).abs() / exact.measure().abs();
        assert!(
            rel < 1e-5,
            "tau={tau}: {} vs {} (rel {rel:e})",
            p.measure,
            exact.measure()
        );
        assert_abs_diff_eq!(p.purity, exact.purity(), epsilon = 1e-8);
    }
    for p in &traj {
        assert_abs_diff_eq!(p.mean_n, n0 * (-p.tau).exp(), epsilon = 1e-6);
        assert!(p.trace_drift <= 1e-8 * 0.0025, "drift {:e} at {}", p.trace_drift, p.tau);
    }
    for k in 2..traj.len() - 2 {
        let gap = (purity_rate(&traj, k) + 2.0 * traj[k].measure).abs();
        assert!(gap <= 1e-5, "tau={} gap={gap:e}", traj[k].tau);
    }
}

#[test]
fn squeezed_moments_follow_gaussian_loss() {
    let s = 1.5;
    let rho = make_squeezed_vacuum(s, 200).unwrap().to_density();
    let traj = evolve(&rho, &EvolutionSpec::new(1.0, 0.005, 50).unwrap()).unwrap();
    let g0 = GaussianChar::pure_squeezed(s);
    for p in &traj {
        let (x2, p2) = quadrature_second_moments(&p.rho).unwrap();
        let g = g0.decohere(p.tau);
        assert!((4.0 * p2 - g.a).abs() < 1e-6, "A at {}: {} vs {}", p.tau, 4.0 * p2, g.a);
        assert!((4.0 * x2 - g.b).abs() < 1e-6, "B at {}: {} vs {}", p.tau, 4.0 * x2, g.b);
        assert!((p.measure - g.measure()).abs() < 1e-6);
    }
}

#[test]
fn thermal_purity_grows_initially() {
    let rho = make_thermal(1.0, 60).unwrap();
    let traj = evolve(&rho, &EvolutionSpec::new(0.05, 0.01, 1).unwrap()).unwrap();
    assert!(traj[0].measure < 0.0);
    assert!(traj[1].purity > traj[0].purity);
}

#[test]
fn larger_cats_decay_faster() {
    let curve = |alpha: f64, r: f64| DecoheredScsParams::from_decay(alpha, 1.0 - r * r).unwrap().measure();
    let rs: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    assert!(curve(4.0, 0.0) > curve(2.0, 0.0));
    let crossing = rs.iter().find(|&&r| curve(4.0, r) < curve(2.0, r));
    assert!(crossing.is_some());
    let fraction = |alpha: f64, r: f64| curve(alpha, r) / curve(alpha, 0.0);
    for &r in rs.iter().filter(|&&r| r > 0.0 && r < 0.7) {
        assert!(fraction(4.0, r) < fraction(2.0, r), "r={r}");
    }
}
