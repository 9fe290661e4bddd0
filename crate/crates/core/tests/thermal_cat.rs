use macroq_core::catalog::ThermalScsParams;
use macroq_core::fock::{DensityMatrix, ModeCutoffs, C64};
use macroq_core::measure::{measure_char_quadrature, measure_operator, QuadratureOptions};
use macroq_core::phase_space::PhaseSpaceEvaluator;
use nalgebra::{DMatrix, DVector};

fn oracle(p: &ThermalScsParams) -> f64 {
    let opts = QuadratureOptions {
        radial_cut: 2.0 * p.d + 7.0 * p.v.sqrt() + 8.0,
        tol: 1e-9,
        max_intervals: 2000,
    };
    measure_char_quadrature(|xi| C64::new(p.char_at(xi[0]), 0.0), 1, &opts)
        .unwrap()
        .value
}

#[test]
fn closed_form_matches_quadrature_oracle() {
    for v in [2.0, 5.0, 10.0] {
        for d in [1.0, 3.0, 5.0] {
            let p = ThermalScsParams::new(v, d).unwrap();
            let q = oracle(&p);
            assert!(
                (q - p.measure()).abs() < 1e-6,
                "V={v} d={d}: oracle {q} closed {}",
                p.measure()
            );
        }
    }
}

#[test]
fn wide_thermal_limit() {
    let p = ThermalScsParams::new(1e4, 0.0).unwrap();
    assert!((p.measure() - 0.5).abs() < 1e-2);
}

/// The state built directly in Fock space by trapezoid integration over the
/// Gaussian weight `exp(-|a - d|^2 / nbar)`.
fn fock_construction(p: &ThermalScsParams, cutoff: usize, half_width: f64, n: usize) -> DensityMatrix {
    let nbar = (p.v - 1.0) / 2.0;
    let h = 2.0 * half_width / (n - 1) as f64;
    let mut data = DMatrix::<C64>::zeros(cutoff, cutoff);
    for i in 0..n {
        for j in 0..n {
            let a = C64::new(p.d - half_width + h * i as f64, -half_width + h * j as f64);
            let w = (-(a - p.d).norm_sqr() / nbar).exp();
            let mut ket = DVector::<C64>::zeros(cutoff);
            let mut c = C64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
            for k in 0..cutoff {
                // |a> + |-a> keeps only even levels
                if k % 2 == 0 {
                    ket[k] = c * 2.0;
                }
                c = c * a / ((k + 1) as f64).sqrt();
            }
            data += &ket * ket.adjoint() * C64::new(w, 0.0);
        }
    }
    DensityMatrix::normalize_from(ModeCutoffs::single(cutoff).unwrap(), data).unwrap()
}

#[test]
fn analytic_chi_matches_fock_construction() {
    for (v, d) in [(2.0, 1.0), (3.0, 1.5)] {
        let p = ThermalScsParams::new(v, d).unwrap();
        let sigma = ((v - 1.0) / 4.0).sqrt();
        let rho = fock_construction(&p, 50, 8.0 * sigma, 81);
        let r = measure_operator(&rho);
        assert!((r.value - p.measure()).abs() < 1e-8, "I {} vs {}", r.value, p.measure());
        assert!((r.mean_n - p.mean_number()).abs() < 1e-8);
        assert!((r.purity - p.purity()).abs() < 1e-8);
        let mut ev = PhaseSpaceEvaluator::new(&rho).unwrap();
        for xi in [
            C64::new(0.3, 0.0),
            C64::new(-0.7, 1.1),
            C64::new(1.4, -0.2),
            C64::new(0.0, 2.0),
        ] {
            let chi = ev.chi(xi);
            assert!(
                (chi.re - p.char_at(xi)).abs() < 1e-8,
                "chi({xi}) {chi} vs {}",
                p.char_at(xi)
            );
            assert!(chi.im.abs() < 1e-10);
        }
    }
}
