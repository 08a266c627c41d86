//! Sampled functions on C (uniform grid) and on the Heisenberg group, the
//! central-variable transform, norms and radial reduction.

use crate::error::{domain, Error, Result};
use crate::specfun::{factorial, gauss_legendre_on, laguerre_functions_upto};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

pub type C64 = Complex64;

/// Order-independent-of-threads summation: fixed binary split.
pub fn pairwise_sum(v: &[C64]) -> C64 {
    if v.len() <= 16 {
        return v.iter().fold(C64::new(0.0, 0.0), |a, b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn pairwise_sum_real(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_real(&v[..mid]) + pairwise_sum_real(&v[mid..])
}

/// Uniform grid `x_i = -L + i h`, `h = 2L/N`, `i = 0..N`, on each axis of C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
    #[serde(default = "one")]
    pub n: usize,
}

fn one() -> usize {
    1
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        let g = GridSpec { half_width, points, n: 1 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0) || self.points < 8 || self.points % 2 != 0 {
            return Err(Error::Config(format!(
                "grid needs L > 0 and an even N >= 8, got L={} N={}",
                self.half_width, self.points
            )));
        }
        if self.n != 1 {
            return Err(Error::Config("sampled grids exist only for n = 1".into()));
        }
        Ok(())
    }

    /// Default desk-scale grid.
    pub fn desk() -> Self {
        GridSpec { half_width: 8.0, points: 64, n: 1 }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    /// Index of `x` when it sits on a grid node.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let s = (x + self.half_width) / self.spacing();
        let i = s.round();
        if (s - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.points {
            Some(i as usize)
        } else {
            None
        }
    }
}

/// Complex samples on a [`GridSpec`], row-major in `x` then `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZField {
    pub grid: GridSpec,
    pub values: Vec<C64>,
    pub lambda_tag: Option<f64>,
}

impl ZField {
    pub fn zeros(grid: GridSpec) -> Self {
        ZField { grid, values: vec![C64::new(0.0, 0.0); grid.len()], lambda_tag: None }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> C64 + Sync) -> Self {
        let xs = grid.coords();
        let n = grid.points;
        let values: Vec<C64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(xs[idx / n], xs[idx % n]))
            .collect();
        ZField { grid, values, lambda_tag: None }
    }

    pub fn with_tag(mut self, lambda: f64) -> Self {
        self.lambda_tag = Some(lambda);
        self
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.grid.points + j]
    }

    /// Value at an arbitrary point: exact on nodes, bilinear between them, zero outside.
    pub fn value_at(&self, x: f64, y: f64) -> C64 {
        let g = &self.grid;
        if let (Some(i), Some(j)) = (g.node_index(x), g.node_index(y)) {
            return self.at(i, j);
        }
        let h = g.spacing();
        let sx = (x + g.half_width) / h;
        let sy = (y + g.half_width) / h;
        if sx < 0.0 || sy < 0.0 || sx > (g.points - 1) as f64 || sy > (g.points - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let i = (sx.floor() as usize).min(g.points - 2);
        let j = (sy.floor() as usize).min(g.points - 2);
        let fx = sx - i as f64;
        let fy = sy - j as f64;
        self.at(i, j) * ((1.0 - fx) * (1.0 - fy))
            + self.at(i + 1, j) * (fx * (1.0 - fy))
            + self.at(i, j + 1) * ((1.0 - fx) * fy)
            + self.at(i + 1, j + 1) * (fx * fy)
    }

    /// Band-limited (Whittaker) interpolation from all grid samples; spectrally
    /// accurate for smooth fields that vanish at the boundary.
    pub fn value_sinc(&self, x: f64, y: f64) -> C64 {
        let g = &self.grid;
        if let (Some(i), Some(j)) = (g.node_index(x), g.node_index(y)) {
            return self.at(i, j);
        }
        let h = g.spacing();
        let kernel = |u: f64| -> Vec<f64> {
            (0..g.points)
                .map(|i| {
                    let s = (u - g.coord(i)) / h;
                    if s.abs() < 1e-12 {
                        1.0
                    } else {
                        (PI * s).sin() / (PI * s)
                    }
                })
                .collect()
        };
        let kx = kernel(x);
        let ky = kernel(y);
        let mut acc = C64::new(0.0, 0.0);
        for (i, wx) in kx.iter().enumerate() {
            let row = &self.values[i * g.points..(i + 1) * g.points];
            let mut r = C64::new(0.0, 0.0);
            for (v, wy) in row.iter().zip(&ky) {
                r += v * wy;
            }
            acc += r * wx;
        }
        acc
    }

    pub fn check_same_grid(&self, other: &ZField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape(format!("grids differ: {:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> ZField {
        ZField { grid: self.grid, values: self.values.iter().map(|v| f(*v)).collect(), lambda_tag: self.lambda_tag }
    }

    pub fn scale(&self, c: C64) -> ZField {
        self.map(|v| v * c)
    }

    pub fn sub(&self, other: &ZField) -> Result<ZField> {
        self.check_same_grid(other)?;
        Ok(ZField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            lambda_tag: self.lambda_tag,
        })
    }

    pub fn add(&self, other: &ZField) -> Result<ZField> {
        self.check_same_grid(other)?;
        Ok(ZField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            lambda_tag: self.lambda_tag,
        })
    }

    pub fn conj(&self) -> ZField {
        self.map(|v| v.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus on the outermost ring of grid points.
    pub fn boundary_max(&self) -> f64 {
        let n = self.grid.points;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in [0, n - 1] {
                m = m.max(self.at(i, j).norm()).max(self.at(j, i).norm());
            }
        }
        m
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "y", "re", "im"])?;
        let xs = self.grid.coords();
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in xs.iter().enumerate() {
                let v = self.at(i, j);
                w.write_record(&[fmt(*x), fmt(*y), fmt(v.re), fmt(v.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path, grid: GridSpec) -> Result<ZField> {
        let mut r = csv::Reader::from_path(path)?;
        let mut values = Vec::with_capacity(grid.len());
        for rec in r.records() {
            let rec = rec?;
            let p = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Io("short CSV row".into()))?
                    .parse::<f64>()
                    .map_err(|e| Error::Io(e.to_string()))
            };
            values.push(C64::new(p(2)?, p(3)?));
        }
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("CSV has {} rows, grid needs {}", values.len(), grid.len())));
        }
        Ok(ZField { grid, values, lambda_tag: None })
    }
}

/// Shortest round-trip float formatting, so CSV bytes depend only on values.
pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// `h^2 Σ g`.
pub fn integrate_z(g: &ZField) -> C64 {
    let h = g.grid.spacing();
    pairwise_sum(&g.values) * (h * h)
}

pub fn l2_norm_z(g: &ZField) -> f64 {
    let h = g.grid.spacing();
    let sq: Vec<f64> = g.values.iter().map(|v| v.norm_sqr()).collect();
    (pairwise_sum_real(&sq) * h * h).sqrt()
}

pub fn l1_norm_z(g: &ZField) -> f64 {
    let h = g.grid.spacing();
    let a: Vec<f64> = g.values.iter().map(|v| v.norm()).collect();
    pairwise_sum_real(&a) * h * h
}

/// `∫ f ḡ dz`.
pub fn inner_z(f: &ZField, g: &ZField) -> Result<C64> {
    f.check_same_grid(g)?;
    let h = f.grid.spacing();
    let p: Vec<C64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).collect();
    Ok(pairwise_sum(&p) * (h * h))
}

/// Profiles in the z variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZProfile {
    Zero,
    /// `exp(-|z - c|^2 / (2 sigma^2))`
    Gaussian {
        sigma: f64,
        #[serde(default)]
        cx: f64,
        #[serde(default)]
        cy: f64,
    },
    /// `z^p zbar^q exp(-|z|^2 / (2 sigma^2))`
    Harmonic { p: usize, q: usize, sigma: f64 },
    /// `exp(1 - 1/(1 - (r/R)^2))` inside the disc, truncated below 1e-14.
    Bump { radius: f64 },
    /// `phi_{k,lambda}(z)`
    Laguerre { k: usize, lambda: f64 },
}

impl ZProfile {
    pub fn eval(&self, x: f64, y: f64) -> C64 {
        match *self {
            ZProfile::Zero => C64::new(0.0, 0.0),
            ZProfile::Gaussian { sigma, cx, cy } => {
                let r2 = (x - cx).powi(2) + (y - cy).powi(2);
                C64::new((-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
            }
            ZProfile::Harmonic { p, q, sigma } => {
                let z = C64::new(x, y);
                let g = (-(x * x + y * y) / (2.0 * sigma * sigma)).exp();
                z.powu(p as u32) * z.conj().powu(q as u32) * g
            }
            _ => C64::new(self.radial(x.hypot(y)).unwrap_or(0.0), 0.0),
        }
    }

    /// Radial value when the profile is radial about the origin.
    pub fn radial(&self, r: f64) -> Option<f64> {
        match *self {
            ZProfile::Zero => Some(0.0),
            ZProfile::Gaussian { sigma, cx, cy } if cx == 0.0 && cy == 0.0 => Some((-r * r / (2.0 * sigma * sigma)).exp()),
            ZProfile::Harmonic { p: 0, q: 0, sigma } => Some((-r * r / (2.0 * sigma * sigma)).exp()),
            ZProfile::Bump { radius } => {
                let s = r / radius;
                if s >= 1.0 {
                    return Some(0.0);
                }
                let v = (1.0 - 1.0 / (1.0 - s * s)).exp();
                Some(if v < 1e-14 { 0.0 } else { v })
            }
            ZProfile::Laguerre { k, lambda } => Some(laguerre_functions_upto(k, 1, lambda, r)[k]),
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        self.radial(0.5).is_some()
    }

    pub fn sample(&self, grid: GridSpec) -> ZField {
        ZField::from_fn(grid, |x, y| self.eval(x, y))
    }

    /// Radius beyond which the profile is below 1e-16 of its scale.
    pub fn reach(&self) -> f64 {
        match *self {
            ZProfile::Zero => 0.0,
            ZProfile::Gaussian { sigma, cx, cy } => cx.hypot(cy) + 8.6 * sigma,
            ZProfile::Harmonic { p, q, sigma } => sigma * (8.6 + ((p + q) as f64).sqrt() * 2.0),
            ZProfile::Bump { radius } => radius,
            ZProfile::Laguerre { k, lambda } => ((8.0 * k as f64 + 4.0) / lambda.abs()).sqrt() + 12.0 / lambda.abs().sqrt(),
        }
    }
}

/// Profiles in the central variable with a closed-form transform
/// `vhat(lambda) = ∫ e^{i lambda t} v(t) dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CentralProfile {
    /// `exp(-(t - shift)^2 / (2 sigma^2))`
    Gaussian {
        sigma: f64,
        #[serde(default)]
        shift: f64,
    },
}

impl CentralProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            CentralProfile::Gaussian { sigma, shift } => (-(t - shift).powi(2) / (2.0 * sigma * sigma)).exp(),
        }
    }

    pub fn hat(&self, lambda: f64) -> C64 {
        match *self {
            CentralProfile::Gaussian { sigma, shift } => {
                let m = sigma * (2.0 * PI).sqrt() * (-0.5 * sigma * sigma * lambda * lambda).exp();
                C64::from_polar(m, lambda * shift)
            }
        }
    }

    pub fn l2_sq(&self) -> f64 {
        match *self {
            CentralProfile::Gaussian { sigma, .. } => sigma * PI.sqrt(),
        }
    }

    pub fn l1(&self) -> f64 {
        match *self {
            CentralProfile::Gaussian { sigma, .. } => sigma * (2.0 * PI).sqrt(),
        }
    }
}

/// Fully sampled function on the z-grid times a uniform t-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledT {
    pub grid: GridSpec,
    pub t_half_width: f64,
    pub t_points: usize,
    /// `values[zi * t_points + ti]`
    pub values: Vec<C64>,
}

impl SampledT {
    pub fn dt(&self) -> f64 {
        2.0 * self.t_half_width / self.t_points as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        -self.t_half_width + i as f64 * self.dt()
    }

    pub fn from_fn(grid: GridSpec, t_half_width: f64, t_points: usize, f: impl Fn(f64, f64, f64) -> C64 + Sync) -> Self {
        let xs = grid.coords();
        let n = grid.points;
        let dt = 2.0 * t_half_width / t_points as f64;
        let values = (0..grid.len() * t_points)
            .into_par_iter()
            .map(|idx| {
                let zi = idx / t_points;
                let ti = idx % t_points;
                f(xs[zi / n], xs[zi % n], -t_half_width + ti as f64 * dt)
            })
            .collect();
        SampledT { grid, t_half_width, t_points, values }
    }

    pub fn band_limit(&self) -> f64 {
        PI / self.dt()
    }
}

/// A function on the Heisenberg group (n = 1 for sampled forms).
#[derive(Debug, Clone, PartialEq)]
pub enum HField {
    Separable { u: ZProfile, v: CentralProfile },
    Sampled(SampledT),
    /// Heat kernel of the sublaplacian at time `b`, defined by its Laguerre series.
    HeatKernel { b: f64 },
}

/// Number of Laguerre terms so that `e^{-2 b |lambda| K}` is below 1e-17.
pub fn heat_terms(b: f64, lambda: f64) -> usize {
    let k = (39.0 / (2.0 * b * lambda.abs())).ceil();
    (k.min(200_000.0) as usize).max(4)
}

/// `p_b^lambda(r) = (2pi)^{-n} |lambda|^n Σ_{k<=K} e^{-b(2k+n)|lambda|} phi_{k,lambda}^{n-1}(r)`,
/// and at `lambda = 0` its limit `(4 pi b)^{-n} e^{-r^2/(4b)}`.
pub fn heat_series(b: f64, lambda: f64, n: usize, r: f64, terms: usize) -> f64 {
    if lambda == 0.0 {
        return (4.0 * PI * b).powi(-(n as i32)) * (-r * r / (4.0 * b)).exp();
    }
    let l = lambda.abs();
    let phis = laguerre_functions_upto(terms, n, l, r);
    let q = (-2.0 * b * l).exp();
    let mut w = (-b * n as f64 * l).exp();
    let mut acc = 0.0;
    for p in phis {
        acc += w * p;
        w *= q;
    }
    (l / (2.0 * PI)).powi(n as i32) * acc
}

impl HField {
    pub fn gaussian(sigma_z: f64, sigma_t: f64) -> Self {
        HField::Separable {
            u: ZProfile::Gaussian { sigma: sigma_z, cx: 0.0, cy: 0.0 },
            v: CentralProfile::Gaussian { sigma: sigma_t, shift: 0.0 },
        }
    }

    pub fn zero() -> Self {
        HField::Separable { u: ZProfile::Zero, v: CentralProfile::Gaussian { sigma: 1.0, shift: 0.0 } }
    }

    /// Radial in z about the origin.
    pub fn is_radial(&self) -> bool {
        match self {
            HField::Separable { u, .. } => u.is_radial(),
            HField::HeatKernel { .. } => true,
            HField::Sampled(_) => false,
        }
    }

    /// `f^lambda(z)` at a point (sampled fields are read from the grid).
    pub fn central_value(&self, lambda: f64, x: f64, y: f64) -> Result<C64> {
        match self {
            HField::Separable { u, v } => Ok(u.eval(x, y) * v.hat(lambda)),
            HField::HeatKernel { b } => {
                Ok(C64::new(heat_series(*b, lambda, 1, x.hypot(y), heat_terms(*b, lambda)), 0.0))
            }
            HField::Sampled(s) => {
                let g = &s.grid;
                match (g.node_index(x), g.node_index(y)) {
                    (Some(i), Some(j)) => central_sampled_at(s, lambda, i * g.points + j),
                    _ => domain("sampled fields are evaluated on grid nodes only"),
                }
            }
        }
    }

    /// Radial value `f_0^lambda(r)` for fields radial in z.
    pub fn radial_central(&self, lambda: f64, r: f64) -> Option<C64> {
        match self {
            HField::Separable { u, v } => u.radial(r).map(|val| v.hat(lambda) * val),
            HField::HeatKernel { b } => Some(C64::new(heat_series(*b, lambda, 1, r, heat_terms(*b, lambda)), 0.0)),
            HField::Sampled(_) => None,
        }
    }

    /// Radius beyond which every slice `f^lambda` is negligible.
    pub fn reach(&self) -> f64 {
        match self {
            HField::Separable { u, .. } => u.reach(),
            HField::HeatKernel { b } => 2.0 * (40.0 * b).sqrt() + 2.0,
            HField::Sampled(s) => s.grid.half_width * std::f64::consts::SQRT_2,
        }
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> Result<C64> {
        match self {
            HField::Separable { u, v } => Ok(u.eval(x, y) * v.eval(t)),
            HField::Sampled(s) => {
                let g = &s.grid;
                let ti = (t + s.t_half_width) / s.dt();
                match (g.node_index(x), g.node_index(y)) {
                    (Some(i), Some(j)) if (ti - ti.round()).abs() < 1e-9 && ti >= 0.0 && (ti.round() as usize) < s.t_points => {
                        Ok(s.values[(i * g.points + j) * s.t_points + ti.round() as usize])
                    }
                    _ => domain("sampled fields are evaluated on grid nodes only"),
                }
            }
            HField::HeatKernel { .. } => domain("the heat kernel is handled through its central transform"),
        }
    }
}

fn central_sampled_at(s: &SampledT, lambda: f64, zi: usize) -> Result<C64> {
    if lambda.abs() > s.band_limit() {
        return Err(Error::BandLimit { lambda: lambda.abs(), limit: s.band_limit() });
    }
    let dt = s.dt();
    let row = &s.values[zi * s.t_points..(zi + 1) * s.t_points];
    let terms: Vec<C64> = row
        .iter()
        .enumerate()
        .map(|(i, v)| v * C64::from_polar(1.0, lambda * s.t(i)))
        .collect();
    Ok(pairwise_sum(&terms) * dt)
}

/// `f^lambda(z) = ∫ e^{i lambda t} f(z,t) dt` on a z-grid.
pub fn central_transform(f: &HField, lambda: f64, grid: GridSpec) -> Result<ZField> {
    let out = match f {
        HField::Sampled(s) => {
            if s.grid != grid {
                return Err(Error::Shape("sampled field lives on a different grid".into()));
            }
            if lambda.abs() > s.band_limit() {
                return Err(Error::BandLimit { lambda: lambda.abs(), limit: s.band_limit() });
            }
            let values = (0..grid.len())
                .into_par_iter()
                .map(|zi| central_sampled_at(s, lambda, zi).expect("band checked"))
                .collect();
            ZField { grid, values, lambda_tag: None }
        }
        HField::HeatKernel { b } => {
            let terms = heat_terms(*b, lambda);
            ZField::from_fn(grid, |x, y| C64::new(heat_series(*b, lambda, 1, x.hypot(y), terms), 0.0))
        }
        HField::Separable { u, v } => {
            let c = v.hat(lambda);
            ZField::from_fn(grid, |x, y| u.eval(x, y) * c)
        }
    };
    Ok(out.with_tag(lambda))
}

/// `‖f‖_{L^2(H)}`.
pub fn l2_norm_h(f: &HField, grid: GridSpec) -> f64 {
    match f {
        HField::Separable { u, v } => l2_norm_z(&u.sample(grid)) * v.l2_sq().sqrt(),
        HField::Sampled(s) => {
            let sq: Vec<f64> = s.values.iter().map(|v| v.norm_sqr()).collect();
            let h = grid.spacing();
            (pairwise_sum_real(&sq) * h * h * s.dt()).sqrt()
        }
        HField::HeatKernel { b } => {
            // (2pi)^{-1} ∫ ‖p_b^lambda‖^2 d lambda with ‖p_b^lambda‖^2 = (2pi)^{-1}|l| Σ_k e^{-2b(2k+1)|l|}
            let top = 40.0 / b;
            let (x, w) = gauss_legendre_on(200, 0.0, top);
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(l, wi)| wi * l / (2.0 * PI) / (2.0 * (2.0 * b * l).sinh()))
                .sum();
            (2.0 * s / (2.0 * PI)).sqrt()
        }
    }
}

/// `‖f‖_{L^1(H)}`; the heat kernel is positive with total mass `∫ p_b^0`.
pub fn l1_norm_h(f: &HField, grid: GridSpec) -> f64 {
    match f {
        HField::Separable { u, v } => l1_norm_z(&u.sample(grid)) * v.l1(),
        HField::Sampled(s) => {
            let a: Vec<f64> = s.values.iter().map(|v| v.norm()).collect();
            let h = grid.spacing();
            pairwise_sum_real(&a) * h * h * s.dt()
        }
        HField::HeatKernel { b } => {
            let g = ZField::from_fn(grid, |x, y| C64::new(heat_series(*b, 0.0, 1, x.hypot(y), 0), 0.0));
            integrate_z(&g).re
        }
    }
}

/// Surface measure of the unit sphere in C^n = R^{2n}: `2 pi^n / (n-1)!`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powi(n as i32) / factorial(n - 1)
}

/// A radial function on C^n sampled at Gauss–Legendre nodes on `[0, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub n: usize,
    pub r_nodes: Vec<f64>,
    /// Gauss–Legendre weight times `r^{2n-1}`.
    pub weights: Vec<f64>,
    pub values: Vec<C64>,
}

impl RadialProfile {
    pub fn nodes(n: usize, reach: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
        let (r, w) = gauss_legendre_on(count, 0.0, reach);
        let weights = r.iter().zip(&w).map(|(r, w)| w * r.powi(2 * n as i32 - 1)).collect();
        (r, weights)
    }

    pub fn from_fn(n: usize, reach: f64, count: usize, f: impl Fn(f64) -> C64) -> Self {
        let (r_nodes, weights) = Self::nodes(n, reach, count);
        let values = r_nodes.iter().map(|&r| f(r)).collect();
        RadialProfile { n, r_nodes, weights, values }
    }

    /// `∫_0^R v(r) g(r) r^{2n-1} dr`.
    pub fn radial_integral(&self, g: impl Fn(f64) -> f64) -> C64 {
        let terms: Vec<C64> = self
            .r_nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((r, w), v)| v * (w * g(*r)))
            .collect();
        pairwise_sum(&terms)
    }

    /// `∫_{C^n} f dz`.
    pub fn integrate(&self) -> C64 {
        self.radial_integral(|_| 1.0) * sphere_area(self.n)
    }

    pub fn l2_norm(&self) -> f64 {
        let terms: Vec<f64> = self.weights.iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr()).collect();
        (pairwise_sum_real(&terms) * sphere_area(self.n)).sqrt()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "re", "im"])?;
        for (r, v) in self.r_nodes.iter().zip(&self.values) {
            w.write_record(&[fmt(*r), fmt(v.re), fmt(v.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Angular average of an n = 1 field onto Gauss–Legendre radii in `[0, R]`
/// (band-limited interpolation, 256 equispaced angles).
pub fn radialize(g: &ZField, reach: f64, count: usize) -> Result<RadialProfile> {
    let limit = g.grid.half_width - g.grid.spacing();
    if reach > limit {
        return domain(format!("radius {reach} exceeds the grid reach {limit}"));
    }
    let angles = 256usize;
    Ok(RadialProfile::from_fn(1, reach, count, |r| {
        let vals: Vec<C64> = (0..angles)
            .map(|a| {
                let th = 2.0 * PI * a as f64 / angles as f64;
                g.value_sinc(r * th.cos(), r * th.sin())
            })
            .collect();
        pairwise_sum(&vals) / angles as f64
    }))
}
