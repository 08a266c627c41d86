//! Radial theory: bounded spherical functions, the Gelfand transform,
//! heat-kernel synthesis, the radial factorization of the forward transform
//! and the convolution-multiplier property.

use crate::error::{domain, Result};
use crate::fan::{normalization, FanPoint};
use crate::field::{
    central_transform, fmt, heat_series, heat_terms, integrate_z, l2_norm_z, pairwise_sum, sphere_area, CentralProfile,
    GridSpec, HField, RadialProfile, ZField, ZProfile, C64,
};
use crate::specfun::{bessel_ratio, binomial, laguerre_functions_upto};
use crate::strichartz::RADIAL_NODES;
use crate::twisted::{laguerre_field, laguerre_projection_radial_all, twisted_conv};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::path::Path;

/// A function on H^n that is radial in z.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialH {
    /// `u(|z|) v(t)` with `u` a radial profile.
    Separable { u: ZProfile, v: CentralProfile, n: usize },
    HeatKernel { b: f64, n: usize },
}

impl RadialH {
    pub fn new_separable(u: ZProfile, v: CentralProfile, n: usize) -> Result<Self> {
        if !u.is_radial() {
            return domain("profile is not radial");
        }
        if n == 0 {
            return domain("n must be >= 1");
        }
        Ok(RadialH::Separable { u, v, n })
    }

    pub fn gaussian(sigma_z: f64, sigma_t: f64, n: usize) -> Self {
        RadialH::Separable {
            u: ZProfile::Gaussian { sigma: sigma_z, cx: 0.0, cy: 0.0 },
            v: CentralProfile::Gaussian { sigma: sigma_t, shift: 0.0 },
            n,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            RadialH::Separable { n, .. } | RadialH::HeatKernel { n, .. } => n,
        }
    }

    /// `f_0^lambda(r)`.
    pub fn central(&self, lambda: f64, r: f64) -> C64 {
        match self {
            RadialH::Separable { u, v, .. } => v.hat(lambda) * u.radial(r).unwrap_or(0.0),
            RadialH::HeatKernel { b, n } => C64::new(heat_series(*b, lambda, *n, r, heat_terms(*b, lambda)), 0.0),
        }
    }

    pub fn reach(&self) -> f64 {
        match self {
            RadialH::Separable { u, .. } => u.reach(),
            RadialH::HeatKernel { b, n } => 2.0 * (40.0 * b).sqrt() + 2.0 + (*n as f64 - 1.0) * (4.0 * b).sqrt(),
        }
    }

    pub fn profile(&self, lambda: f64) -> RadialProfile {
        RadialProfile::from_fn(self.n(), self.reach(), RADIAL_NODES, |r| self.central(lambda, r))
    }

    /// The same function on the n = 1 grid pipeline.
    pub fn to_hfield(&self) -> Result<HField> {
        match self {
            RadialH::Separable { u, v, n: 1 } => Ok(HField::Separable { u: u.clone(), v: v.clone() }),
            RadialH::HeatKernel { b, n: 1 } => Ok(HField::HeatKernel { b: *b }),
            _ => domain("only n = 1 functions live on the grid"),
        }
    }

    /// `‖f‖_{L^1(H^n)}` by radial quadrature (the heat kernel has mass 1).
    pub fn l1_norm(&self) -> f64 {
        match self {
            RadialH::Separable { u, v, n } => {
                let p = RadialProfile::from_fn(*n, u.reach(), RADIAL_NODES, |r| C64::new(u.radial(r).unwrap_or(0.0).abs(), 0.0));
                p.integrate().re * v.l1()
            }
            RadialH::HeatKernel { .. } => self.profile(0.0).integrate().re,
        }
    }
}

/// Bounded spherical function: `normalization(k,n) phi_{k,lambda}(r) e^{i lambda t}` on rays,
/// `(n-1)! 2^{n-1} J_{n-1}(sqrt(tau) r)/(sqrt(tau) r)^{n-1}` on the limiting ray.
pub fn spherical_function(a: &FanPoint, r: f64, t: f64) -> Result<C64> {
    match *a {
        FanPoint::Ray { k, lambda, n } => {
            let v = normalization(k, n) * laguerre_functions_upto(k, n, lambda, r)[k];
            Ok(C64::from_polar(v, lambda * t))
        }
        FanPoint::Limit { tau, n } => Ok(C64::new(bessel_ratio(n, tau.sqrt() * r)?, 0.0)),
    }
}

/// `𝒢f(a) = ∫ f(z,t) e~_a(z,t) dz dt` through the radial pipeline (any n).
pub fn gelfand_transform(f: &RadialH, a: &FanPoint) -> Result<C64> {
    let n = f.n();
    if a.n() != n {
        return domain(format!("fan point has n = {}, function has n = {n}", a.n()));
    }
    match *a {
        FanPoint::Ray { k, lambda, .. } => {
            let p = f.profile(lambda);
            Ok(laguerre_projection_radial_all(&p, k, lambda)[k])
        }
        FanPoint::Limit { tau, .. } => {
            let p = f.profile(0.0);
            let s = tau.sqrt();
            let terms: Vec<C64> = p
                .r_nodes
                .iter()
                .zip(&p.weights)
                .zip(&p.values)
                .map(|((r, w), v)| v * (w * bessel_ratio(n, s * r).expect("r >= 0")))
                .collect();
            Ok(pairwise_sum(&terms) * sphere_area(n))
        }
    }
}

/// All ray values `𝒢f(k, lambda)` for `k <= k_max` at one lambda.
pub fn gelfand_transform_rays(f: &RadialH, lambda: f64, k_max: usize) -> Vec<C64> {
    laguerre_projection_radial_all(&f.profile(lambda), k_max, lambda)
}

/// `𝒢f(a)` by 2-D quadrature of `f^lambda(z) e~_a(z,0)` on an n = 1 grid (any f).
pub fn gelfand_transform_grid(f: &HField, a: &FanPoint, grid: GridSpec) -> Result<C64> {
    let (lambda, ker) = match *a {
        FanPoint::Ray { k, lambda, n: 1 } => (lambda, laguerre_field(grid, k, lambda)),
        FanPoint::Limit { tau, n: 1 } => {
            let s = tau.sqrt();
            (0.0, ZField::from_fn(grid, |x, y| C64::new(bessel_ratio(1, s * x.hypot(y)).expect("r >= 0"), 0.0)))
        }
        _ => return domain("grid pairing is for n = 1"),
    };
    let fl = central_transform(f, lambda, grid)?;
    let prod = ZField { values: fl.values.iter().zip(&ker.values).map(|(u, v)| u * v).collect(), ..fl };
    Ok(integrate_z(&prod))
}

/// Laguerre coefficients `c_k` in `g = Σ c_k phi_{k,lambda}`.
pub fn laguerre_coefficients(g: &RadialProfile, k_max: usize, lambda: f64) -> Vec<C64> {
    let s = (lambda.abs() / (2.0 * PI)).powi(g.n as i32);
    laguerre_projection_radial_all(g, k_max, lambda).into_iter().map(|c| c * s).collect()
}

/// `Σ c_k phi_{k,lambda}^{n-1}` on Gauss–Legendre radii.
pub fn laguerre_synthesis(coeffs: &[C64], lambda: f64, n: usize, reach: f64, count: usize) -> RadialProfile {
    let k_max = coeffs.len().saturating_sub(1);
    RadialProfile::from_fn(n, reach, count, |r| {
        let phis = laguerre_functions_upto(k_max, n, lambda, r);
        coeffs.iter().zip(&phis).map(|(c, p)| c * p).sum()
    })
}

/// Heat-kernel slice with its truncation data.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatProfile {
    pub profile: RadialProfile,
    pub terms: usize,
    pub tail_bound: f64,
    pub warning: Option<String>,
}

/// `p_b^lambda = (2pi)^{-n}|lambda|^n Σ_{k<K} e^{-b(2k+n)|lambda|} phi_{k,lambda}` on `[0, reach]`.
/// The tail estimate is `e^{-b(2K+n)|lambda|}/(1 - e^{-2b|lambda|})` times the
/// prefactor and `max |phi_K|`; a warning is attached when it exceeds `tolerance`.
pub fn heat_kernel_profile(b: f64, lambda: f64, terms: usize, n: usize, reach: f64, tolerance: f64) -> Result<HeatProfile> {
    if !(b > 0.0) || lambda == 0.0 || terms == 0 {
        return domain("heat kernel needs b > 0, lambda != 0 and at least one term");
    }
    let l = lambda.abs();
    let pre = (l / (2.0 * PI)).powi(n as i32);
    let k_top = terms - 1;
    let coeffs: Vec<C64> = (0..terms).map(|k| C64::new(pre * (-b * (2 * k + n) as f64 * l).exp(), 0.0)).collect();
    let profile = laguerre_synthesis(&coeffs, l, n, reach, RADIAL_NODES);
    let tail_bound = pre * (-b * (2 * terms + n) as f64 * l).exp() / (1.0 - (-2.0 * b * l).exp())
        * binomial(k_top + n, n - 1);
    let warning = (tail_bound > tolerance)
        .then(|| format!("heat series with {terms} terms has tail {tail_bound:.2e} > {tolerance:.1e}"));
    Ok(HeatProfile { profile, terms, tail_bound, warning })
}

/// Relative L2 distance between the forward slice at a ray and `𝒢f(a) phi_{k,lambda}`.
pub fn radial_factorization_residual(f: &HField, a: &FanPoint, grid: GridSpec) -> Result<f64> {
    let FanPoint::Ray { k, lambda, n: 1 } = *a else {
        return domain("factorization is checked on n = 1 rays");
    };
    let slice = twisted_conv(&central_transform(f, -lambda, grid)?, &laguerre_field(grid, k, lambda), -lambda)?;
    let g = gelfand_transform_grid(f, a, grid)?;
    let model = laguerre_field(grid, k, lambda).scale(g);
    relative(&slice, &model)
}

fn relative(got: &ZField, model: &ZField) -> Result<f64> {
    let d = l2_norm_z(&got.sub(model)?);
    let scale = l2_norm_z(model).max(l2_norm_z(got));
    Ok(if scale == 0.0 { 0.0 } else { d / scale })
}

/// Both sides of the multiplier identity at one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierCheck {
    /// `‖lhs - rhs‖ / max(‖lhs‖, ‖rhs‖)`, 0 when both vanish.
    pub residual: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    /// `‖fhat(a)‖ ‖g^{-lambda}‖_1`, the a-priori size of either side.
    pub scale: f64,
}

/// Multiplier property at a ray: `f^{-lambda} *_{-lambda} (g^{-lambda} *_{-lambda} phi_k)` against
/// `R_k(-lambda, g) fhat(a)`.
pub fn multiplier_residual(f: &HField, g: &RadialH, a: &FanPoint, grid: GridSpec) -> Result<MultiplierCheck> {
    let FanPoint::Ray { k, lambda, n: 1 } = *a else {
        return domain("the multiplier check runs on n = 1 rays");
    };
    let gh = g.to_hfield()?;
    let phi = laguerre_field(grid, k, lambda);
    let fl = central_transform(f, -lambda, grid)?;
    let gl = central_transform(&gh, -lambda, grid)?;
    let inner = twisted_conv(&gl, &phi, -lambda)?;
    let lhs = twisted_conv(&fl, &inner, -lambda)?;
    let rk = gelfand_transform_rays(g, -lambda, k)[k];
    let fhat = twisted_conv(&fl, &phi, -lambda)?;
    let rhs = fhat.scale(rk);
    Ok(MultiplierCheck {
        residual: relative(&lhs, &rhs)?,
        lhs_norm: l2_norm_z(&lhs),
        rhs_norm: l2_norm_z(&rhs),
        scale: l2_norm_z(&fhat) * crate::field::l1_norm_z(&gl),
    })
}

/// `𝒢(f * g)(a)` with the group convolution taken slice-wise on the grid:
/// `(f*g)^lambda = f^lambda *_lambda g^lambda`.
pub fn gelfand_of_convolution(f: &HField, g: &HField, a: &FanPoint, grid: GridSpec) -> Result<C64> {
    let FanPoint::Ray { k, lambda, n: 1 } = *a else {
        return domain("grid convolution is for n = 1 rays");
    };
    let conv = twisted_conv(&central_transform(f, lambda, grid)?, &central_transform(g, lambda, grid)?, lambda)?;
    let ker = laguerre_field(grid, k, lambda);
    let prod: Vec<C64> = conv.values.iter().zip(&ker.values).map(|(u, v)| u * v).collect();
    Ok(integrate_z(&ZField { values: prod, ..conv }))
}

/// Sweep `𝒢f` over ray and limit points in parallel.
pub fn gelfand_sweep(f: &RadialH, points: &[FanPoint]) -> Result<Vec<C64>> {
    points.par_iter().map(|a| gelfand_transform(f, a)).collect()
}

/// CSV with columns `k, lambda, tau, re, im` (k empty on the limiting ray).
pub fn write_gelfand_csv(path: &Path, points: &[FanPoint], values: &[C64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "lambda", "tau", "re", "im"])?;
    for (a, v) in points.iter().zip(values) {
        let k = match a {
            FanPoint::Ray { k, .. } => k.to_string(),
            FanPoint::Limit { .. } => String::new(),
        };
        w.write_record(&[k, fmt(a.lambda()), fmt(crate::fan::tau_of(a)), fmt(v.re), fmt(v.im)])?;
    }
    w.flush()?;
    Ok(())
}
