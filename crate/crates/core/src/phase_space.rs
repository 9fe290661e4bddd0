//! Wigner and characteristic functions of single-mode states, sampled grids,
//! and the discrete Fourier map between them.
//!
//! Conventions: `chi(xi) = Tr[rho D(xi)]`, and
//! `W(alpha) = pi^-2 \int d^2xi chi(xi) exp(-2i(alpha_r xi_i - alpha_i xi_r))`,
//! normalized so `\int W d^2alpha = 1`. Grid axes are the alpha-plane
//! coordinates directly: `x = alpha_r`, `p = alpha_i`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::{fill_displacement, DensityMatrix, C64};

/// Uniform axis `min, min + step, ..., max` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid("axis needs n >= 2 and finite max > min"));
        }
        Ok(Self { min, max, n })
    }

    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + self.step() * i as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.value(i))
    }

    /// The axis made of every other sample.
    pub fn decimated(&self) -> Result<Self> {
        let n = self.n.div_ceil(2);
        Self::new(self.min, self.value(2 * (n - 1)), n)
    }

    /// Dual axis for the kernel `exp(2i x xi)`: spacing `pi / (n step)`,
    /// centred on zero, same point count.
    pub fn reciprocal(&self) -> Result<Self> {
        let dxi = PI / (self.n as f64 * self.step());
        let half = 0.5 * (self.n - 1) as f64 * dxi;
        Self::new(-half, half, self.n)
    }
}

pub type Meta = Vec<(String, String)>;

/// Sampled Wigner function, values row-major over `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x: Axis,
    pub p: Axis,
    values: Vec<f64>,
    pub meta: Meta,
}

impl WignerGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x: Axis, p: Axis, values: Vec<f64>, meta: Meta) -> Result<Self> {
        if x.n < Self::MIN_POINTS || p.n < Self::MIN_POINTS {
            return Err(Error::InvalidGrid("each axis needs at least 16 points"));
        }
        if values.len() != x.n * p.n {
            return Err(Error::DimensionMismatch {
                expected: x.n * p.n,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample"));
        }
        Ok(Self { x, p, values, meta })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p.n + j]
    }

    pub fn cell_area(&self) -> f64 {
        self.x.step() * self.p.step()
    }

    /// Riemann sum of `W`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Largest `|W|` on the grid edges.
    pub fn boundary_max(&self) -> f64 {
        let (nx, np) = (self.x.n, self.p.n);
        let mut m = 0.0f64;
        for i in 0..nx {
            m = m.max(self.get(i, 0).abs()).max(self.get(i, np - 1).abs());
        }
        for j in 0..np {
            m = m.max(self.get(0, j).abs()).max(self.get(nx - 1, j).abs());
        }
        m
    }

    /// Every other sample along both axes.
    pub fn decimated(&self) -> Result<Self> {
        let x = self.x.decimated()?;
        let p = self.p.decimated()?;
        let mut values = Vec::with_capacity(x.n * p.n);
        for i in 0..x.n {
            for j in 0..p.n {
                values.push(self.get(2 * i, 2 * j));
            }
        }
        Self::new(x, p, values, self.meta.clone())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Sampled characteristic function, values row-major over `xi_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharGrid {
    pub xr: Axis,
    pub xi: Axis,
    values: Vec<C64>,
    pub meta: Meta,
}

impl CharGrid {
    pub fn new(xr: Axis, xi: Axis, values: Vec<C64>, meta: Meta) -> Result<Self> {
        if values.len() != xr.n * xi.n {
            return Err(Error::DimensionMismatch {
                expected: xr.n * xi.n,
                got: values.len(),
            });
        }
        Ok(Self { xr, xi, values, meta })
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.xi.n + j]
    }
}

fn require_single_mode(rho: &DensityMatrix) -> Result<usize> {
    let modes = rho.cutoffs().modes();
    if modes != 1 {
        return Err(Error::NotSingleMode { modes });
    }
    Ok(rho.dim())
}

/// Reusable evaluator for `chi` and `W` of one single-mode state.
pub struct PhaseSpaceEvaluator<'a> {
    rho: &'a DensityMatrix,
    table: DMatrix<C64>,
}

impl<'a> PhaseSpaceEvaluator<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Result<Self> {
        let d = require_single_mode(rho)?;
        Ok(Self {
            rho,
            table: DMatrix::zeros(d, d),
        })
    }

    /// `sum_{m,n} rho[n,m] D[m,n] s_n` with `s_n = (-1)^n` when `parity`.
    fn contract(&mut self, beta: C64, parity: bool) -> C64 {
        let d = self.rho.dim();
        fill_displacement(&mut self.table, d, beta);
        let rho = self.rho.data();
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..d {
            let mut col = C64::new(0.0, 0.0);
            for m in 0..d {
                col += rho[(n, m)] * self.table[(m, n)];
            }
            if parity && n % 2 == 1 {
                acc -= col;
            } else {
                acc += col;
            }
        }
        acc
    }

    pub fn chi(&mut self, xi: C64) -> C64 {
        self.contract(xi, false)
    }

    /// `W(alpha) = (2/pi) Tr[rho D(2 alpha) P]`.
    pub fn wigner(&mut self, alpha: C64) -> f64 {
        2.0 / PI * self.contract(alpha * 2.0, true).re
    }
}

/// `(<x^2>, <p^2>)` with `x = (a + a^dag)/2`, `p = (a - a^dag)/(2i)`.
pub fn quadrature_second_moments(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let d = require_single_mode(rho)?;
    let data = rho.data();
    let mut n = 0.0;
    let mut a2 = C64::new(0.0, 0.0);
    for k in 0..d {
        n += k as f64 * data[(k, k)].re;
        if k >= 2 {
            // <k| rho a^2 |k> = sqrt(k (k-1)) rho[k, k-2]
            a2 += data[(k, k - 2)] * ((k * (k - 1)) as f64).sqrt();
        }
    }
    let x2 = (2.0 * a2.re + 2.0 * n + 1.0) / 4.0;
    let p2 = (-2.0 * a2.re + 2.0 * n + 1.0) / 4.0;
    Ok((x2, p2))
}

/// Half-width of a square alpha-plane grid that keeps the edges below
/// `1e-8` of the peak for Gaussian-like and cat states: `max(5, 6.5 sigma)`.
pub fn suggest_half_width(rho: &DensityMatrix) -> Result<f64> {
    let (x2, p2) = quadrature_second_moments(rho)?;
    Ok((6.5 * x2.max(p2).sqrt()).max(5.0))
}

pub fn char_at(rho: &DensityMatrix, xi: C64) -> Result<C64> {
    Ok(PhaseSpaceEvaluator::new(rho)?.chi(xi))
}

pub fn wigner_at(rho: &DensityMatrix, alpha: C64) -> Result<f64> {
    Ok(PhaseSpaceEvaluator::new(rho)?.wigner(alpha))
}

/// Samples `W` of a single-mode state on the `x` by `p` grid.
///
/// Fails with [`Error::Coverage`] if the sampled integral is off by more than 1%.
pub fn wigner_of(rho: &DensityMatrix, x: Axis, p: Axis) -> Result<WignerGrid> {
    let mut ev = PhaseSpaceEvaluator::new(rho)?;
    let mut values = Vec::with_capacity(x.n * p.n);
    for xv in x.values() {
        for pv in p.values() {
            values.push(ev.wigner(C64::new(xv, pv)));
        }
    }
    let meta = vec![(String::from("convention"), String::from("alpha-plane"))];
    let grid = WignerGrid::new(x, p, values, meta)?;
    let integral = grid.integral();
    if (integral - 1.0).abs() > 0.01 {
        return Err(Error::Coverage { integral });
    }
    Ok(grid)
}

pub fn char_of(rho: &DensityMatrix, xr: Axis, xi: Axis) -> Result<CharGrid> {
    let mut ev = PhaseSpaceEvaluator::new(rho)?;
    let mut values = Vec::with_capacity(xr.n * xi.n);
    for r in xr.values() {
        for i in xi.values() {
            values.push(ev.chi(C64::new(r, i)));
        }
    }
    let meta = vec![(String::from("convention"), String::from("alpha-plane"))];
    CharGrid::new(xr, xi, values, meta)
}

/// `chi(xi) ~ dx dp sum W(x,p) exp(2i (x xi_i - p xi_r))`, evaluated as a
/// separable direct transform onto arbitrary `xi` axes.
pub fn wigner_to_char(grid: &WignerGrid, xr: &Axis, xi: &Axis) -> CharGrid {
    let (nx, np) = (grid.x.n, grid.p.n);
    // partial[i][k] = sum_j W[i,j] exp(-2i p_j xr_k)
    let p_phase: Vec<C64> = grid
        .p
        .values()
        .flat_map(|pv| xr.values().map(move |r| C64::from_polar(1.0, -2.0 * pv * r)))
        .collect();
    let mut partial = vec![C64::new(0.0, 0.0); nx * xr.n];
    for i in 0..nx {
        let row = &mut partial[i * xr.n..(i + 1) * xr.n];
        for j in 0..np {
            let w = grid.get(i, j);
            if w == 0.0 {
                continue;
            }
            let phases = &p_phase[j * xr.n..(j + 1) * xr.n];
            for (acc, ph) in row.iter_mut().zip(phases) {
                *acc += ph * w;
            }
        }
    }
    let x_phase: Vec<C64> = grid
        .x
        .values()
        .flat_map(|xv| xi.values().map(move |q| C64::from_polar(1.0, 2.0 * xv * q)))
        .collect();
    let area = grid.cell_area();
    let mut values = vec![C64::new(0.0, 0.0); xr.n * xi.n];
    for i in 0..nx {
        let phases = &x_phase[i * xi.n..(i + 1) * xi.n];
        for k in 0..xr.n {
            let t = partial[i * xr.n + k] * area;
            let out = &mut values[k * xi.n..(k + 1) * xi.n];
            for (acc, ph) in out.iter_mut().zip(phases) {
                *acc += t * ph;
            }
        }
    }
    CharGrid {
        xr: *xr,
        xi: *xi,
        values,
        meta: grid.meta.clone(),
    }
}

/// Dual axes of a Wigner grid: `xi_r` is conjugate to `p`, `xi_i` to `x`.
pub fn reciprocal_axes(grid: &WignerGrid) -> Result<(Axis, Axis)> {
    Ok((grid.p.reciprocal()?, grid.x.reciprocal()?))
}

/// Dominant angular frequency of `W(x_index, p)` along `p`, by peak-picking
/// a zero-padded (factor 2) discrete transform. The zero-frequency bin is
/// skipped.
pub fn fringe_frequency(grid: &WignerGrid, x_index: usize) -> f64 {
    let n = grid.p.n;
    let padded = 2 * n;
    let dp = grid.p.step();
    let slice: Vec<f64> = (0..n).map(|j| grid.get(x_index, j)).collect();
    let mut best = (0.0f64, 0.0f64);
    for k in 1..padded / 2 {
        let omega = 2.0 * PI * k as f64 / (padded as f64 * dp);
        let mut acc = C64::new(0.0, 0.0);
        for (j, w) in slice.iter().enumerate() {
            acc += C64::from_polar(*w, -omega * dp * j as f64);
        }
        if acc.norm() > best.1 {
            best = (omega, acc.norm());
        }
    }
    best.0
}
