//! Circle-harmonic decomposition on C and the Hecke–Bochner identities for n = 1.

use crate::error::{domain, Error, Result};
use crate::fan::FanPoint;
use crate::field::{central_transform, fmt, l2_norm_z, pairwise_sum, GridSpec, HField, RadialProfile, ZField, C64};
use crate::gelfand::spherical_function;
use crate::specfun::laguerre_functions_upto;
use crate::twisted::{laguerre_field, laguerre_projection_radial_all, twisted_conv};
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

/// Angular nodes of the circle quadrature.
pub const ANGLES: usize = 256;

/// Degree of `z^p zbar^q`; on C one of them is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HarmonicDegree {
    pub p: usize,
    pub q: usize,
}

impl HarmonicDegree {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p > 0 && q > 0 {
            return domain(format!("z^{p} zbar^{q} is not harmonic on C"));
        }
        Ok(HarmonicDegree { p, q })
    }

    /// Angular frequency `p - q`.
    pub fn frequency(&self) -> i64 {
        self.p as i64 - self.q as i64
    }

    pub fn swapped(&self) -> Self {
        HarmonicDegree { p: self.q, q: self.p }
    }

    /// `P(z) = z^p zbar^q`.
    pub fn poly(&self, x: f64, y: f64) -> C64 {
        let z = C64::new(x, y);
        z.powu(self.p as u32) * z.conj().powu(self.q as u32)
    }
}

/// `(1/2pi) ∫ g(r e^{i theta}) e^{-i(p-q) theta} d theta` by the trapezoid rule on
/// band-limited interpolants of the grid samples.
pub fn circle_coefficient(g: &ZField, degree: HarmonicDegree, r: f64) -> Result<C64> {
    Ok(circle_coefficients(g, &[degree.frequency()], r)?[0])
}

/// Coefficients for several angular frequencies at one radius.
pub fn circle_coefficients(g: &ZField, frequencies: &[i64], r: f64) -> Result<Vec<C64>> {
    let limit = g.grid.half_width - g.grid.spacing();
    if !(r >= 0.0) || r > limit {
        return domain(format!("radius {r} outside [0, {limit}]"));
    }
    let samples: Vec<C64> = (0..ANGLES)
        .map(|a| {
            let th = 2.0 * PI * a as f64 / ANGLES as f64;
            g.value_sinc(r * th.cos(), r * th.sin())
        })
        .collect();
    Ok(frequencies
        .iter()
        .map(|&m| {
            let terms: Vec<C64> = samples
                .iter()
                .enumerate()
                .map(|(a, v)| v * C64::from_polar(1.0, -(m as f64) * 2.0 * PI * a as f64 / ANGLES as f64))
                .collect();
            pairwise_sum(&terms) / ANGLES as f64
        })
        .collect())
}

/// Circle coefficient of `f(., t)` for a function on H^1.
pub fn circle_coefficient_at(f: &HField, degree: HarmonicDegree, r: f64, t: f64, grid: GridSpec) -> Result<C64> {
    let g = ZField::from_fn(grid, |x, y| f.eval(x, y, t).unwrap_or(C64::new(0.0, 0.0)));
    circle_coefficient(&g, degree, r)
}

/// Result of the fan shift `a(p,q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shifted {
    Point(FanPoint),
    /// The shifted Laguerre index is negative, so the term vanishes.
    Annihilated,
}

/// `a(p,q) = (lambda, (2k+p-q+n)|lambda|)` as a ray of the fan in dimension `n+p+q`,
/// i.e. Laguerre index `k-q`. Negative lambda uses `a(q,p)` in the coefficient theorem.
pub fn a_shift(a: &FanPoint, degree: HarmonicDegree) -> Result<Shifted> {
    let FanPoint::Ray { k, lambda, n } = *a else {
        return domain("the shift acts on ray points");
    };
    if k < degree.q {
        return Ok(Shifted::Annihilated);
    }
    Ok(Shifted::Point(FanPoint::Ray { k: k - degree.q, lambda, n: n + degree.p + degree.q }))
}

/// Laguerre coefficient `R_j^{m-1}(lambda, g)` of a radial profile in dimension `m`.
fn shifted_coefficient(g: &RadialProfile, j: usize, lambda: f64) -> C64 {
    laguerre_projection_radial_all(g, j, lambda)[j]
}

/// `(1/2pi) ∫ f^lambda(r e^{i theta}) e^{-i(p-q)theta} d theta / r^{p+q}` as a profile in dimension `1+p+q`.
fn degree_profile(fl: &ZField, degree: HarmonicDegree, reach: f64, count: usize) -> Result<RadialProfile> {
    let m = 1 + degree.p + degree.q;
    let (r_nodes, weights) = RadialProfile::nodes(m, reach, count);
    let values = r_nodes
        .iter()
        .map(|&r| Ok(circle_coefficient(fl, degree, r)? / r.powi((degree.p + degree.q) as i32)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile { n: m, r_nodes, weights, values })
}

/// Radial nodes used when a degree profile is extracted from the grid.
pub const DEGREE_NODES: usize = 160;

fn grid_reach(grid: GridSpec) -> f64 {
    grid.half_width - grid.spacing()
}

/// The dimension-shift identity at one ray: `f^lambda *_lambda phi_k` on the grid for
/// `f = P g`, against `(2pi)^{-p-q} |lambda|^{p+q} P(z) R(lambda, g) phi_{k'}^{p+q}` with
/// `k' = k - p` for `lambda > 0` and `k - q` for `lambda < 0`, the coefficient taken in
/// dimension `1+p+q`. Returns the relative L2 distance scaled by the larger side.
pub fn hecke_bochner_residual(g: &HField, degree: HarmonicDegree, k: usize, lambda: f64, grid: GridSpec) -> Result<HeckeCheck> {
    if lambda == 0.0 {
        return domain("lambda must be nonzero");
    }
    if !g.is_radial() {
        return domain("g must be radial in z");
    }
    let gl = central_transform(g, lambda, grid)?;
    let fl = ZField::from_fn(grid, |x, y| degree.poly(x, y) * gl.value_at(x, y));
    let lhs = twisted_conv(&fl, &laguerre_field(grid, k, lambda), lambda)?;
    let drop = if lambda > 0.0 { degree.p } else { degree.q };
    let rhs = if k < drop {
        ZField::zeros(grid)
    } else {
        let j = k - drop;
        let m = 1 + degree.p + degree.q;
        let prof = RadialProfile::from_fn(m, g.reach().min(40.0), crate::strichartz::RADIAL_NODES, |r| {
            g.radial_central(lambda, r).expect("radial")
        });
        let c = shifted_coefficient(&prof, j, lambda)
            * ((2.0 * PI).powi(-((degree.p + degree.q) as i32)) * lambda.abs().powi((degree.p + degree.q) as i32));
        ZField::from_fn(grid, |x, y| degree.poly(x, y) * c * laguerre_functions_upto(j, m, lambda, x.hypot(y))[j])
    };
    let (ln, rn) = (l2_norm_z(&lhs), l2_norm_z(&rhs));
    let d = l2_norm_z(&lhs.sub(&rhs)?);
    let scale = ln.max(rn);
    Ok(HeckeCheck { residual: if scale == 0.0 { 0.0 } else { d / scale }, lhs_norm: ln, rhs_norm: rn, f_norm: l2_norm_z(&fl) })
}

/// Sizes of both sides of a Hecke–Bochner comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeckeCheck {
    pub residual: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    /// `‖f^lambda‖_2` for scale.
    pub f_norm: f64,
}

/// Angular coefficient theorem at a ray. The left side integrates the forward slice
/// `fhat(a, r.)` against `e^{-i(p-q)theta}` (normalized circle measure); the right side is
/// `(2pi)^{-p-q} (|lambda| r)^{p+q} 𝒢_{1+p+q}(g_{p,q})(a') e_{k'}(r, 0)` with
/// `a' = a(p,q), k' = k-q` for `lambda > 0` and `a' = a(q,p), k' = k-p` for `lambda < 0`,
/// where `g_{p,q}` is read off `f^lambda` on the grid.
pub fn coefficient_theorem_residual(
    f: &HField,
    degree: HarmonicDegree,
    a: &FanPoint,
    radii: &[f64],
    grid: GridSpec,
) -> Result<HeckeCheck> {
    let FanPoint::Ray { k, lambda, n: 1 } = *a else {
        return domain("the coefficient theorem is checked on n = 1 rays");
    };
    let slice = twisted_conv(&central_transform(f, -lambda, grid)?, &laguerre_field(grid, k, lambda), -lambda)?;
    let lhs: Vec<C64> = radii.iter().map(|&r| circle_coefficient(&slice, degree, r)).collect::<Result<_>>()?;
    let shift = if lambda > 0.0 { a_shift(a, degree)? } else { a_shift(a, degree.swapped())? };
    let rhs: Vec<C64> = match shift {
        Shifted::Annihilated => vec![C64::new(0.0, 0.0); radii.len()],
        Shifted::Point(ap) => {
            let FanPoint::Ray { k: j, n: m, .. } = ap else { unreachable!() };
            if m != 1 + degree.p + degree.q {
                return Err(Error::Shape("shifted dimension mismatch".into()));
            }
            let fl = central_transform(f, lambda, grid)?;
            let prof = degree_profile(&fl, degree, grid_reach(grid), DEGREE_NODES)?;
            let gel = shifted_coefficient(&prof, j, lambda);
            let pq = (degree.p + degree.q) as i32;
            radii
                .iter()
                .map(|&r| {
                    let e = spherical_function(&FanPoint::Ray { k: j, lambda, n: m }, r, 0.0).expect("ray")
                        / crate::fan::normalization(j, m);
                    gel * (2.0 * PI).powi(-pq) * (lambda.abs() * r).powi(pq) * e
                })
                .collect()
        }
    };
    let ln = lhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let rn = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let d = lhs.iter().zip(&rhs).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    let scale = ln.max(rn);
    Ok(HeckeCheck {
        residual: if scale == 0.0 { 0.0 } else { d / scale },
        lhs_norm: ln,
        rhs_norm: rn,
        f_norm: l2_norm_z(&central_transform(f, -lambda, grid)?),
    })
}

/// Rebuild `g` at radius `r` and angle `theta` from its circle coefficients with `|p-q| <= max_freq`.
pub fn harmonic_reconstruction(g: &ZField, max_freq: i64, r: f64, thetas: &[f64]) -> Result<Vec<C64>> {
    let freqs: Vec<i64> = (-max_freq..=max_freq).collect();
    let coeffs = circle_coefficients(g, &freqs, r)?;
    Ok(thetas
        .iter()
        .map(|th| freqs.iter().zip(&coeffs).map(|(m, c)| c * C64::from_polar(1.0, *m as f64 * th)).sum())
        .collect())
}

/// One row of a residual table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeckeRow {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub lambda: f64,
    pub residual: f64,
}

/// CSV with columns `p, q, k, lambda, residual`.
pub fn write_hecke_csv(path: &Path, rows: &[HeckeRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["p", "q", "k", "lambda", "residual"])?;
    for r in rows {
        w.write_record(&[r.p.to_string(), r.q.to_string(), r.k.to_string(), fmt(r.lambda), fmt(r.residual)])?;
    }
    w.flush()?;
    Ok(())
}
