//! Forward, normalized and inverse transforms over a fan grid, the Plancherel
//! functional, the reproducing projector and the synthesis map.

use crate::error::{domain, Error, Result};
use crate::fan::{normalization, FanGrid, FanPoint};
use crate::field::{central_transform, fmt, l2_norm_h, l2_norm_z, pairwise_sum, GridSpec, HField, RadialProfile, ZField, C64};
use crate::specfun::{bessel_ratio, binomial, laguerre_functions_upto};
use crate::twisted::{laguerre_field, laguerre_norm_sq, laguerre_tail_fraction, laguerre_projection_radial_all, twisted_conv};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::path::Path;

/// One transform slice `z ↦ fhat(a, z)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Slice {
    Grid(ZField),
    /// `coeff * phi_{k,lambda}^{n-1}(|z|)`
    Radial { coeff: C64, k: usize, lambda: f64, n: usize },
}

impl Slice {
    pub fn value(&self, x: f64, y: f64) -> C64 {
        match self {
            Slice::Grid(g) => g.value_at(x, y),
            Slice::Radial { coeff, k, lambda, n } => coeff * laguerre_functions_upto(*k, *n, *lambda, x.hypot(y))[*k],
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Slice::Grid(g) => l2_norm_z(g).powi(2),
            Slice::Radial { coeff, k, lambda, n } => coeff.norm_sqr() * laguerre_norm_sq(*k, *n, *lambda),
        }
    }

    /// Supremum over z (the maximum of `|phi_k|` sits at the origin).
    pub fn sup_abs(&self) -> f64 {
        match self {
            Slice::Grid(g) => g.max_abs(),
            Slice::Radial { coeff, k, n, .. } => coeff.norm() * binomial(k + n - 1, *k),
        }
    }

    pub fn to_field(&self, grid: GridSpec) -> ZField {
        match self {
            Slice::Grid(g) => g.clone(),
            _ => ZField::from_fn(grid, |x, y| self.value(x, y)),
        }
    }

    pub fn scale(&self, c: f64) -> Slice {
        match self {
            Slice::Grid(g) => Slice::Grid(g.scale(C64::new(c, 0.0))),
            Slice::Radial { coeff, k, lambda, n } => Slice::Radial { coeff: coeff * c, k: *k, lambda: *lambda, n: *n },
        }
    }
}

/// How ray slices are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Full twisted convolution on the grid.
    Grid,
    /// Laguerre coefficients of a radial function.
    Radial,
    /// Radial when the input is radial in z, grid otherwise.
    #[default]
    Auto,
}

/// Slices for every ray point of a fan (lambda ascending, then k) followed by
/// the limiting-ray points.
#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzCoefficients {
    pub fan: FanGrid,
    pub grid: GridSpec,
    pub points: Vec<FanPoint>,
    pub slices: Vec<Slice>,
    pub normalized: bool,
    pub n: usize,
}

impl StrichartzCoefficients {
    pub fn ray_index(&self, lambda_index: usize, k: usize) -> usize {
        lambda_index * (self.fan.k_max + 1) + k
    }

    pub fn ray(&self, lambda_index: usize, k: usize) -> &Slice {
        &self.slices[self.ray_index(lambda_index, k)]
    }

    pub fn ray_count(&self) -> usize {
        self.fan.lambda_nodes.len() * (self.fan.k_max + 1)
    }

    pub fn limit(&self, tau_index: usize) -> &Slice {
        &self.slices[self.ray_count() + tau_index]
    }

    /// Slice-wise sum; both sides must share fan, grid and state.
    pub fn add(&self, other: &StrichartzCoefficients) -> Result<StrichartzCoefficients> {
        if self.fan != other.fan || self.grid != other.grid || self.normalized != other.normalized {
            return Err(Error::Shape("coefficient sets differ in layout".into()));
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| match (a, b) {
                (Slice::Radial { coeff: c1, k, lambda, n }, Slice::Radial { coeff: c2, .. }) => {
                    Ok(Slice::Radial { coeff: c1 + c2, k: *k, lambda: *lambda, n: *n })
                }
                _ => Ok(Slice::Grid(a.to_field(self.grid).add(&b.to_field(self.grid))?)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StrichartzCoefficients { slices, ..self.clone() })
    }
}

fn use_radial(f: &HField, route: Route) -> Result<bool> {
    match route {
        Route::Grid => Ok(false),
        Route::Radial if !f.is_radial() => domain("the radial route needs a function radial in z"),
        Route::Radial => Ok(true),
        Route::Auto => Ok(f.is_radial()),
    }
}

/// Quadrature nodes used for radial coefficient integrals.
pub const RADIAL_NODES: usize = 384;

/// Limiting-ray slice `∫ f^0(u) chi_tau(|z - u|) du` by direct 2-D quadrature,
/// with the kernel tabulated on the lattice of grid differences.
pub fn limit_slice(f0: &ZField, tau: f64, n: usize) -> Result<ZField> {
    let grid = f0.grid;
    let np = grid.points;
    let h = grid.spacing();
    let s = tau.sqrt();
    let span = 2 * np - 1;
    let mut chi = vec![0.0; span * span];
    for di in 0..span {
        for dj in 0..span {
            let dx = (di as f64 - (np - 1) as f64) * h;
            let dy = (dj as f64 - (np - 1) as f64) * h;
            chi[di * span + dj] = bessel_ratio(n, s * dx.hypot(dy))?;
        }
    }
    let values: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (idx / np, idx % np);
            let mut row_sums = Vec::with_capacity(np);
            for c in 0..np {
                let di = a + np - 1 - c;
                let mut acc = C64::new(0.0, 0.0);
                for d in 0..np {
                    acc += f0.values[c * np + d] * chi[di * span + b + np - 1 - d];
                }
                row_sums.push(acc);
            }
            pairwise_sum(&row_sums) * (h * h)
        })
        .collect();
    Ok(ZField { grid, values, lambda_tag: Some(0.0) })
}

/// Forward transform over a fan: `f^{-lambda} *_{-lambda} phi_{k,lambda}` on rays
/// and the Bessel pairing with `f^0` on the limiting ray.
pub fn forward(f: &HField, fan: &FanGrid, grid: GridSpec, route: Route) -> Result<StrichartzCoefficients> {
    fan.validate()?;
    grid.validate()?;
    let radial = use_radial(f, route)?;
    if fan.n != 1 {
        return domain("the grid pipeline is for n = 1; use the radial Gelfand pipeline for n >= 2");
    }
    let per_lambda: Vec<Vec<Slice>> = fan
        .lambda_nodes
        .par_iter()
        .map(|&lambda| -> Result<Vec<Slice>> {
            if radial {
                let reach = f.reach();
                let prof = RadialProfile::from_fn(1, reach, RADIAL_NODES, |r| {
                    f.radial_central(-lambda, r).expect("radial input")
                });
                let coeffs = laguerre_projection_radial_all(&prof, fan.k_max, lambda);
                Ok(coeffs
                    .into_iter()
                    .enumerate()
                    .map(|(k, coeff)| Slice::Radial { coeff, k, lambda, n: 1 })
                    .collect())
            } else {
                let fl = central_transform(f, -lambda, grid)?;
                (0..=fan.k_max)
                    .map(|k| {
                        let s = twisted_conv(&fl, &laguerre_field(grid, k, lambda), -lambda)?;
                        Ok(Slice::Grid(s.with_tag(lambda)))
                    })
                    .collect()
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = fan.rays();
    let mut slices: Vec<Slice> = per_lambda.into_iter().flatten().collect();
    if !fan.tau_nodes.is_empty() {
        let f0 = central_transform(f, 0.0, grid)?;
        for &tau in &fan.tau_nodes {
            slices.push(Slice::Grid(limit_slice(&f0, tau, 1)?));
        }
        points.extend(fan.limits());
    }
    Ok(StrichartzCoefficients { fan: fan.clone(), grid, points, slices, normalized: false, n: fan.n })
}

/// Scale ray slices by `k!(n-1)!/(k+n-1)!`; limiting-ray slices are unchanged.
pub fn normalize(c: &StrichartzCoefficients) -> Result<StrichartzCoefficients> {
    if c.normalized {
        return Err(Error::State("coefficients are already normalized".into()));
    }
    let slices = c
        .points
        .iter()
        .zip(&c.slices)
        .map(|(a, s)| match a {
            FanPoint::Ray { k, n, .. } => s.scale(normalization(*k, *n)),
            FanPoint::Limit { .. } => s.clone(),
        })
        .collect();
    Ok(StrichartzCoefficients { slices, normalized: true, ..c.clone() })
}

/// Pointwise forward value from a sampled `f^{-lambda}` (or `f^0` on the limiting ray):
/// rays use `∫ f^{-lambda}(u) phi_k(z-u) e^{(i lambda/2) Im(z conj u)} du`.
pub fn forward_at(f_slice: &ZField, a: &FanPoint, x: f64, y: f64) -> Result<C64> {
    let grid = f_slice.grid;
    let xs = grid.coords();
    let np = grid.points;
    let h = grid.spacing();
    let mut rows = Vec::with_capacity(np);
    match *a {
        FanPoint::Ray { k, lambda, n } => {
            if n != 1 {
                return domain("pointwise evaluation is for n = 1");
            }
            for (c, &u) in xs.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (d, &v) in xs.iter().enumerate() {
                    let fv = f_slice.values[c * np + d];
                    if fv == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let r = (x - u).hypot(y - v);
                    let phi = laguerre_functions_upto(k, 1, lambda, r)[k];
                    acc += fv * phi * C64::from_polar(1.0, 0.5 * lambda * (y * u - x * v));
                }
                rows.push(acc);
            }
        }
        FanPoint::Limit { tau, n } => {
            let s = tau.sqrt();
            for (c, &u) in xs.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (d, &v) in xs.iter().enumerate() {
                    let fv = f_slice.values[c * np + d];
                    acc += fv * bessel_ratio(n, s * (x - u).hypot(y - v))?;
                }
                rows.push(acc);
            }
        }
    }
    Ok(pairwise_sum(&rows) * (h * h))
}

/// Inversion integral: `Σ_cells nu × ∫ fhat(a,w) e^{i lambda t} e^{(i lambda/2) Im(z conj w)} phi_k(z-w) dw`.
/// Limiting-ray slices carry no mass.
pub fn inverse(c: &StrichartzCoefficients, eval_points: &[(f64, f64, f64)]) -> Result<Vec<C64>> {
    if c.normalized {
        return Err(Error::State("inverse expects unnormalized coefficients".into()));
    }
    let fan = &c.fan;
    let n = fan.n;
    let grid = c.grid;
    let xs = grid.coords();
    let np = grid.points;
    let h = grid.spacing();
    Ok(eval_points
        .par_iter()
        .map(|&(x, y, t)| {
            let mut cells = Vec::with_capacity(fan.lambda_nodes.len());
            for (li, &lambda) in fan.lambda_nodes.iter().enumerate() {
                let mut ks = vec![C64::new(0.0, 0.0); fan.k_max + 1];
                let any_grid = (0..=fan.k_max).any(|k| matches!(c.ray(li, k), Slice::Grid(_)));
                if any_grid {
                    // one Laguerre sweep per quadrature node serves every k
                    let mut acc = vec![vec![C64::new(0.0, 0.0); np]; fan.k_max + 1];
                    for (ci, &u) in xs.iter().enumerate() {
                        for (di, &v) in xs.iter().enumerate() {
                            let phis = laguerre_functions_upto(fan.k_max, n, lambda, (x - u).hypot(y - v));
                            let phase = C64::from_polar(1.0, 0.5 * lambda * (y * u - x * v));
                            for (k, row) in acc.iter_mut().enumerate() {
                                if let Slice::Grid(g) = c.ray(li, k) {
                                    row[ci] += g.values[ci * np + di] * phase * phis[k];
                                }
                            }
                        }
                    }
                    for (k, row) in acc.iter().enumerate() {
                        ks[k] = pairwise_sum(row) * (h * h);
                    }
                }
                for (k, slot) in ks.iter_mut().enumerate() {
                    if let Slice::Radial { coeff, .. } = c.ray(li, k) {
                        // phi *_lambda phi = (2pi/|lambda|)^n phi
                        let phi = laguerre_functions_upto(k, n, lambda, x.hypot(y))[k];
                        *slot = coeff * (2.0 * PI / lambda.abs()).powi(n as i32) * phi;
                    }
                }
                let s = ks.iter().fold(C64::new(0.0, 0.0), |a, b| a + b);
                cells.push(s * C64::from_polar(fan.nu(li), lambda * t));
            }
            pairwise_sum(&cells)
        })
        .collect())
}

/// `‖f‖^2` against the discretized `Σ nu ∫|fhat|^2`, plus the share of the last ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelPair {
    pub lhs: f64,
    pub rhs: f64,
    pub tail: f64,
}

pub fn plancherel_pair(f: &HField, c: &StrichartzCoefficients) -> PlancherelPair {
    let lhs = l2_norm_h(f, c.grid).powi(2);
    let fan = &c.fan;
    let mut rhs = Vec::with_capacity(fan.lambda_nodes.len());
    let mut last = Vec::with_capacity(fan.lambda_nodes.len());
    for li in 0..fan.lambda_nodes.len() {
        let nu = fan.nu(li);
        let per_k: Vec<f64> = (0..=fan.k_max).map(|k| c.ray(li, k).norm_sq()).collect();
        rhs.push(nu * per_k.iter().sum::<f64>());
        last.push(nu * per_k[fan.k_max]);
    }
    let rhs = crate::field::pairwise_sum_real(&rhs);
    let last = crate::field::pairwise_sum_real(&last);
    PlancherelPair { lhs, rhs, tail: if rhs > 0.0 { last / rhs } else { 0.0 } }
}

/// `(2pi)^{-n}|lambda|^n phi_{k,lambda} *_lambda s`, using the ray's own lambda for either sign.
pub fn project(s: &ZField, k: usize, lambda: f64) -> Result<ZField> {
    let phi = laguerre_field(s.grid, k, lambda);
    Ok(twisted_conv(&phi, s, lambda)?.scale(C64::new(lambda.abs() / (2.0 * PI), 0.0)))
}

/// Whether the grid can hold the ray's Laguerre function: the mass outside the
/// inscribed disc is below `1e-12` and the spacing resolves the fastest oscillation.
pub fn grid_resolves(k: usize, lambda: f64, grid: GridSpec) -> bool {
    let wavenumber = ((2 * k + 1) as f64 * lambda.abs()).sqrt();
    laguerre_tail_fraction(k, lambda, grid.half_width) < 1e-12 && grid.spacing() * wavenumber <= 2.0
}

/// Relative L2 distance between a slice and its projection; 0 for a zero slice.
pub fn projector_residual_slice(s: &ZField, k: usize, lambda: f64) -> Result<f64> {
    let norm = l2_norm_z(s);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let p = project(s, k, lambda)?;
    Ok(l2_norm_z(&p.sub(s)?) / norm)
}

pub fn projector_residual(c: &StrichartzCoefficients, a: usize) -> Result<f64> {
    match c.points[a] {
        FanPoint::Ray { k, lambda, .. } => match &c.slices[a] {
            Slice::Grid(g) => projector_residual_slice(g, k, lambda),
            Slice::Radial { .. } => Ok(0.0),
        },
        FanPoint::Limit { .. } => domain("the projector is defined on ray points only"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorRow {
    pub index: usize,
    pub k: usize,
    pub lambda: f64,
    pub residual: f64,
    pub resolved: bool,
}

/// Projector residual of every ray slice, flagged by whether the grid resolves it.
pub fn projector_rows(c: &StrichartzCoefficients) -> Result<Vec<ProjectorRow>> {
    (0..c.ray_count())
        .into_par_iter()
        .map(|a| match c.points[a] {
            FanPoint::Ray { k, lambda, .. } => Ok(ProjectorRow {
                index: a,
                k,
                lambda,
                residual: projector_residual(c, a)?,
                resolved: matches!(c.slices[a], Slice::Radial { .. }) || grid_resolves(k, lambda, c.grid),
            }),
            FanPoint::Limit { .. } => unreachable!("rays come first"),
        })
        .collect()
}

/// Reject coefficient sets whose grid slices fail the projector test.
pub fn check_projector(c: &StrichartzCoefficients, tolerance: f64) -> Result<()> {
    if c.normalized {
        return Err(Error::State("synthesis expects unnormalized slices".into()));
    }
    let checks: Vec<(usize, f64)> = (0..c.ray_count())
        .into_par_iter()
        .map(|a| (a, projector_residual(c, a).unwrap_or(f64::INFINITY)))
        .collect();
    if let Some((a, r)) = checks.iter().find(|(_, r)| *r > tolerance) {
        return Err(Error::Rejected(format!(
            "slice at {:?} fails the projector test: residual {r:.3e} > {tolerance:.1e}",
            c.points[*a]
        )));
    }
    Ok(())
}

fn synthesis_weight(fan: &FanGrid, li: usize) -> f64 {
    let n = fan.n as i32;
    (2.0 * PI).powi(-n - 1) * fan.lambda_nodes[li].abs().powi(n) * fan.lambda_weights[li]
}

/// `(2pi)^{-n-1} Σ_cells |lambda|^n d lambda Σ_k e^{i lambda t} F(a, z)`, after checking
/// that every grid slice passes the projector test within `tolerance`.
pub fn synthesize(c: &StrichartzCoefficients, eval_points: &[(f64, f64, f64)], tolerance: f64) -> Result<Vec<C64>> {
    check_projector(c, tolerance)?;
    let fan = &c.fan;
    Ok(eval_points
        .par_iter()
        .map(|&(x, y, t)| {
            let cells: Vec<C64> = fan
                .lambda_nodes
                .iter()
                .enumerate()
                .map(|(li, &lambda)| {
                    let s = (0..=fan.k_max).fold(C64::new(0.0, 0.0), |acc, k| acc + c.ray(li, k).value(x, y));
                    s * C64::from_polar(synthesis_weight(fan, li), lambda * t)
                })
                .collect();
            pairwise_sum(&cells)
        })
        .collect())
}

/// The synthesized function as `Σ_cells e^{i lambda t} G_cell(z)`: one `(lambda, G)` pair per cell.
pub fn synthesis_profiles(c: &StrichartzCoefficients, tolerance: f64) -> Result<Vec<(f64, ZField)>> {
    check_projector(c, tolerance)?;
    let fan = &c.fan;
    (0..fan.lambda_nodes.len())
        .map(|li| {
            let mut g = ZField::zeros(c.grid);
            for k in 0..=fan.k_max {
                g = g.add(&c.ray(li, k).to_field(c.grid))?;
            }
            Ok((fan.lambda_nodes[li], g.scale(C64::new(synthesis_weight(fan, li), 0.0))))
        })
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// File name of a ray slice.
pub fn ray_file_name(k: usize, lambda: f64) -> String {
    format!("ray_k{k}_lam{}{:.4}.csv", if lambda < 0.0 { '-' } else { '+' }, lambda.abs())
}

pub fn limit_file_name(tau: f64) -> String {
    format!("limit_tau{tau:.4}.csv")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientManifest {
    pub grid: GridSpec,
    pub n: usize,
    pub normalized: bool,
    pub slices: Vec<SliceEntry>,
}

/// Write `fan.json`, one CSV per slice, and `manifest.json` with checksums.
pub fn write_dir(c: &StrichartzCoefficients, dir: &Path) -> Result<CoefficientManifest> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("fan.json"), c.fan.to_json()?)?;
    let mut entries = Vec::with_capacity(c.slices.len());
    for (a, s) in c.points.iter().zip(&c.slices) {
        let name = match *a {
            FanPoint::Ray { k, lambda, .. } => ray_file_name(k, lambda),
            FanPoint::Limit { tau, .. } => limit_file_name(tau),
        };
        let path = dir.join(&name);
        s.to_field(c.grid).write_csv(&path)?;
        entries.push(SliceEntry { sha256: sha256_hex(&std::fs::read(&path)?), file: name });
    }
    let manifest = CoefficientManifest { grid: c.grid, n: c.n, normalized: c.normalized, slices: entries };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Read a directory written by [`write_dir`]; checksums are verified.
pub fn read_dir(dir: &Path) -> Result<StrichartzCoefficients> {
    let fan = FanGrid::from_json(&std::fs::read_to_string(dir.join("fan.json"))?)?;
    let manifest: CoefficientManifest = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json"))?)?;
    let mut points = fan.rays();
    points.extend(fan.limits());
    if points.len() != manifest.slices.len() {
        return Err(Error::Shape("manifest and fan disagree on the number of slices".into()));
    }
    let mut slices = Vec::with_capacity(points.len());
    for e in &manifest.slices {
        let path = dir.join(&e.file);
        if sha256_hex(&std::fs::read(&path)?) != e.sha256 {
            return Err(Error::Io(format!("checksum mismatch for {}", e.file)));
        }
        slices.push(Slice::Grid(ZField::read_csv(&path, manifest.grid)?));
    }
    Ok(StrichartzCoefficients { fan, grid: manifest.grid, points, slices, normalized: manifest.normalized, n: manifest.n })
}

/// Long-format CSV of slice values at the grid nodes inside `|x|,|y| <= window`.
pub fn write_long_csv(c: &StrichartzCoefficients, path: &Path, window: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["kind", "k", "lambda", "tau", "x", "y", "re", "im"])?;
    let xs: Vec<f64> = c.grid.coords().into_iter().filter(|x| x.abs() <= window).collect();
    for (a, s) in c.points.iter().zip(&c.slices) {
        let (kind, k, lambda, tau) = match *a {
            FanPoint::Ray { k, lambda, .. } => ("ray", k.to_string(), lambda, crate::fan::tau_of(a)),
            FanPoint::Limit { tau, .. } => ("limit", String::new(), 0.0, tau),
        };
        for &x in &xs {
            for &y in &xs {
                let v = s.value(x, y);
                w.write_record(&[kind.to_string(), k.clone(), fmt(lambda), fmt(tau), fmt(x), fmt(y), fmt(v.re), fmt(v.im)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
