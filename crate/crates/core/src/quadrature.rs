//! Globally adaptive 21-point Gauss–Kronrod quadrature with vector-valued
//! integrands, and nested iteration over several dimensions.

use alloc::vec::Vec;

// Kronrod abscissae (positive half) and weights; the Gauss 10-point rule uses
// every other abscissa starting at index 1.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// An integral estimate over `K` components with a single absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const K: usize> {
    pub value: [f64; K],
    pub error: f64,
    pub converged: bool,
}

impl<const K: usize> Estimate<K> {
    pub fn exact(value: [f64; K]) -> Self {
        Self {
            value,
            error: 0.0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_intervals: 400,
        }
    }
}

struct Segment<const K: usize> {
    a: f64,
    b: f64,
    est: Estimate<K>,
}

fn gk21<const K: usize, F>(f: &mut F, a: f64, b: f64) -> Estimate<K>
where
    F: FnMut(f64) -> Estimate<K>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [0.0; K];
    let mut gauss = [0.0; K];
    let mut inner_err = 0.0;
    let mut converged = true;
    let mut acc = |x: f64, wk: f64, wg: f64, kron: &mut [f64; K], gauss: &mut [f64; K]| {
        let e = f(x);
        for c in 0..K {
            kron[c] += wk * e.value[c];
            gauss[c] += wg * e.value[c];
        }
        inner_err += wk * e.error;
        converged &= e.converged;
    };
    acc(center, WGK[10], 0.0, &mut kron, &mut gauss);
    for i in 0..10 {
        let dx = half * XGK[i];
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        acc(center - dx, WGK[i], wg, &mut kron, &mut gauss);
        acc(center + dx, WGK[i], wg, &mut kron, &mut gauss);
    }
    let mut err = 0.0f64;
    for c in 0..K {
        kron[c] *= half;
        gauss[c] *= half;
        err = err.max((kron[c] - gauss[c]).abs());
    }
    Estimate {
        value: kron,
        error: err + half.abs() * inner_err,
        converged,
    }
}

/// Integrates `f` over `[a, b]`, bisecting the worst segment until the summed
/// error estimate falls below `max(abs_tol, rel_tol * |value[0]|)`.
///
/// The returned estimate has `converged == false` if the interval budget ran
/// out or any nested estimate did not converge.
pub fn integrate<const K: usize, F>(mut f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> Estimate<K>
where
    F: FnMut(f64) -> Estimate<K>,
{
    let first = gk21(&mut f, a, b);
    let mut segments: Vec<Segment<K>> = alloc::vec![Segment { a, b, est: first }];
    loop {
        let mut total = [0.0; K];
        let mut err = 0.0;
        let mut nested_ok = true;
        let mut worst = 0;
        for (idx, s) in segments.iter().enumerate() {
            for c in 0..K {
                total[c] += s.est.value[c];
            }
            err += s.est.error;
            nested_ok &= s.est.converged;
            if s.est.error > segments[worst].est.error {
                worst = idx;
            }
        }
        let target = opts.abs_tol.max(opts.rel_tol * total[0].abs());
        if err <= target || segments.len() >= opts.max_intervals {
            return Estimate {
                value: total,
                error: err,
                converged: nested_ok && err <= target,
            };
        }
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Interval cannot be split further in floating point.
            return Estimate {
                value: total,
                error: err,
                converged: false,
            };
        }
        let left = gk21(&mut f, s.a, mid);
        let right = gk21(&mut f, mid, s.b);
        segments.push(Segment {
            a: s.a,
            b: mid,
            est: left,
        });
        segments.push(Segment {
            a: mid,
            b: s.b,
            est: right,
        });
    }
}

/// Iterated integration over a box `bounds[0] x bounds[1] x ...`, outermost
/// dimension first. Inner tolerances are scaled so that the propagated inner
/// error stays within half of the outer budget; `weight(level, x)` multiplies
/// the integrand at each level (Jacobian factors).
pub fn integrate_nested<const K: usize, F, W>(
    f: &mut F,
    weight: &W,
    bounds: &[(f64, f64)],
    opts: &AdaptiveOptions,
) -> Estimate<K>
where
    F: FnMut(&[f64]) -> [f64; K],
    W: Fn(usize, f64) -> f64,
{
    let mut coords = alloc::vec![0.0; bounds.len()];
    nested_level(f, weight, bounds, 0, &mut coords, opts)
}

fn nested_level<const K: usize, F, W>(
    f: &mut F,
    weight: &W,
    bounds: &[(f64, f64)],
    level: usize,
    coords: &mut Vec<f64>,
    opts: &AdaptiveOptions,
) -> Estimate<K>
where
    F: FnMut(&[f64]) -> [f64; K],
    W: Fn(usize, f64) -> f64,
{
    let (a, b) = bounds[level];
    let last = level + 1 == bounds.len();
    let wmax = weight(level, a).abs().max(weight(level, b).abs()).max(1.0);
    let inner = AdaptiveOptions {
        abs_tol: opts.abs_tol / (2.0 * (b - a).abs() * wmax),
        rel_tol: 0.0,
        max_intervals: opts.max_intervals,
    };
    let this_level = AdaptiveOptions {
        abs_tol: opts.abs_tol * 0.5,
        ..*opts
    };
    integrate(
        |x| {
            coords[level] = x;
            let w = weight(level, x);
            let mut e = if last {
                Estimate::exact(f(coords))
            } else {
                nested_level(f, weight, bounds, level + 1, coords, &inner)
            };
            for v in e.value.iter_mut() {
                *v *= w;
            }
            e.error *= w.abs();
            e
        },
        a,
        b,
        &this_level,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let e = integrate(
            |x| Estimate::exact([x.powi(7) - 3.0 * x]),
            -1.0,
            2.0,
            &Default::default(),
        );
        assert!(e.converged);
        assert_abs_diff_eq!(e.value[0], 255.0 / 8.0 - 4.5, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_and_oscillatory() {
        let e = integrate(
            |x| Estimate::exact([(-x * x).exp(), (20.0 * x).cos() * (-x * x).exp()]),
            -10.0,
            10.0,
            &AdaptiveOptions {
                abs_tol: 1e-13,
                ..Default::default()
            },
        );
        assert!(e.converged);
        assert_abs_diff_eq!(e.value[0], PI.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.value[1], PI.sqrt() * (-100.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn polar_gaussian_moment() {
        // int (r^2 - 1) e^{-r^2} d^2 xi = 0 and int e^{-r^2} d^2 xi = pi
        let mut f = |c: &[f64]| {
            let r2 = c[0] * c[0];
            [(r2 - 1.0) * (-r2).exp(), (-r2).exp()]
        };
        let w = |level: usize, x: f64| if level == 0 { x } else { 1.0 };
        let e = integrate_nested(
            &mut f,
            &w,
            &[(0.0, 8.0), (0.0, 2.0 * PI)],
            &AdaptiveOptions {
                abs_tol: 1e-11,
                ..Default::default()
            },
        );
        assert!(e.converged);
        assert_abs_diff_eq!(e.value[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e.value[1], PI, epsilon = 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let e = integrate(
            |x: f64| Estimate::exact([(1.0 / x.max(1e-300)).sin()]),
            0.0,
            1.0,
            &AdaptiveOptions {
                abs_tol: 1e-14,
                rel_tol: 0.0,
                max_intervals: 5,
            },
        );
        assert!(!e.converged);
    }
}
