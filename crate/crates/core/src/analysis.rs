//! Harnesses for the decay and uncertainty statements: Riemann–Lebesgue scans,
//! continuity at the limiting ray, the L^1 sup bound, the Hausdorff–Young
//! endpoints, Hardy decay profiles and Ingham admissibility.
//!
//! Uncertainty statements are checked in their measurable direction only:
//! decay profiles and envelope constants on a finite fan. The conclusion
//! "f = 0" cannot be established numerically and is not claimed.

use crate::error::{domain, Result};
use crate::fan::{normalization, tau_of, FanGrid, FanPoint};
use crate::field::{central_transform, fmt, l1_norm_h, l1_norm_z, pairwise_sum_real, GridSpec, HField, RadialProfile, C64};
use crate::gelfand::{gelfand_transform_rays, RadialH};
use crate::specfun::{binomial, factorial, gauss_legendre_on};
use crate::strichartz::{forward, forward_at, normalize, Route, RADIAL_NODES};
use crate::twisted::laguerre_norm_sq;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

/// Outcome of one harness, exported as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub test: String,
    pub parameters: serde_json::Value,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(test: &str, parameters: serde_json::Value, statistic: f64, threshold: f64, pass: bool) -> Self {
        Verdict { test: test.into(), parameters, statistic, threshold, pass }
    }

    /// Passes when `statistic <= threshold`.
    pub fn at_most(test: &str, parameters: serde_json::Value, statistic: f64, threshold: f64) -> Self {
        Self::new(test, parameters, statistic, threshold, statistic <= threshold)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn norm_of(a: &FanPoint) -> f64 {
    let (l, t) = a.coords();
    l.hypot(t)
}

/// `|f~(a, z)|` at one point of H^n x fan, n = 1.
fn normalized_value(slices: &BTreeMap<u64, crate::field::ZField>, a: &FanPoint, z: (f64, f64)) -> Result<f64> {
    let key = (-a.lambda()).to_bits();
    let v = forward_at(&slices[&key], a, z.0, z.1)?;
    let scale = match *a {
        FanPoint::Ray { k, n, .. } => normalization(k, n),
        FanPoint::Limit { .. } => 1.0,
    };
    Ok(v.norm() * scale)
}

/// Central slices `f^{-lambda}` for every distinct lambda on a path.
fn central_slices(f: &HField, path: &[FanPoint], grid: GridSpec) -> Result<BTreeMap<u64, crate::field::ZField>> {
    let mut keys: Vec<f64> = path.iter().map(|a| -a.lambda()).collect();
    keys.sort_by(f64::total_cmp);
    keys.dedup();
    let fields = keys
        .par_iter()
        .map(|&l| central_transform(f, l, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(keys.iter().map(|l| l.to_bits()).zip(fields).collect())
}

/// Escape routes to infinity in the fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapePath {
    /// `k` fixed, `|lambda|` growing geometrically from `start` to `end`.
    AlongRay { k: usize, start: f64, end: f64, sign: f64 },
    /// Limiting ray, `tau` from 0 to `end`.
    LimitRay { end: f64 },
    /// `lambda` fixed, `k` from 0 to `k_end`.
    FixedLambda { lambda: f64, k_end: usize },
}

impl EscapePath {
    pub fn points(&self, count: usize, n: usize) -> Result<Vec<FanPoint>> {
        if count < 2 {
            return domain("a path needs at least two points");
        }
        let c = (count - 1) as f64;
        match *self {
            EscapePath::AlongRay { k, start, end, sign } => {
                if !(start > 0.0 && end > start) {
                    return domain("ray path needs 0 < start < end");
                }
                (0..count)
                    .map(|i| FanPoint::ray(k, sign.signum() * start * (end / start).powf(i as f64 / c), n))
                    .collect()
            }
            EscapePath::LimitRay { end } => (0..count).map(|i| FanPoint::limit(end * i as f64 / c, n)).collect(),
            EscapePath::FixedLambda { lambda, k_end } => {
                let mut ks: Vec<usize> = (0..count).map(|i| (k_end as f64 * i as f64 / c).round() as usize).collect();
                ks.dedup();
                ks.into_iter().map(|k| FanPoint::ray(k, lambda, n)).collect()
            }
        }
    }

    /// The three default routes at desk scale.
    pub fn defaults() -> [EscapePath; 3] {
        [
            EscapePath::AlongRay { k: 0, start: 0.25, end: 12.0, sign: 1.0 },
            EscapePath::LimitRay { end: 60.0 },
            EscapePath::FixedLambda { lambda: 1.0, k_end: 48 },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlRow {
    pub point: FanPoint,
    pub a_norm: f64,
    /// `|f~(a, z)|`
    pub value: f64,
    /// `‖f^{-lambda}‖_1`, which bounds `|f~(a, z)|`.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlScan {
    pub rows: Vec<RlRow>,
    /// Largest value over the last quartile of the path divided by the largest value overall.
    pub tail_ratio: f64,
}

impl RlScan {
    pub fn verdict(&self, name: &str, fraction: f64) -> Verdict {
        Verdict::at_most(
            name,
            serde_json::json!({ "points": self.rows.len(), "fraction": fraction }),
            self.tail_ratio,
            fraction,
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_table(
            path,
            &["a_norm", "lambda", "tau", "k", "value", "envelope"],
            self.rows.iter().map(|r| {
                let k = match r.point {
                    FanPoint::Ray { k, .. } => k.to_string(),
                    FanPoint::Limit { .. } => String::new(),
                };
                vec![fmt(r.a_norm), fmt(r.point.lambda()), fmt(tau_of(&r.point)), k, fmt(r.value), fmt(r.envelope)]
            }),
        )
    }
}

fn tail_ratio(values: &[f64]) -> f64 {
    let top = values.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let start = values.len() - values.len().div_ceil(4);
    values[start..].iter().cloned().fold(0.0, f64::max) / top
}

/// `|f~(a, z)|` along a path with `|a|` nondecreasing (n = 1).
pub fn rl_scan(f: &HField, z: (f64, f64), path: &[FanPoint], grid: GridSpec) -> Result<RlScan> {
    if path.is_empty() {
        return domain("empty path");
    }
    if path.windows(2).any(|w| norm_of(&w[1]) < norm_of(&w[0])) {
        return domain("path must move outward in the fan");
    }
    let slices = central_slices(f, path, grid)?;
    let rows = path
        .par_iter()
        .map(|a| {
            let value = normalized_value(&slices, a, z)?;
            let envelope = l1_norm_z(&slices[&(-a.lambda()).to_bits()]);
            Ok(RlRow { point: *a, a_norm: norm_of(a), value, envelope })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    Ok(RlScan { tail_ratio: tail_ratio(&values), rows })
}

/// Ray points `(k_j, tau/(2k_j+n))` approaching `(0, tau)` on the limiting ray.
pub fn continuity_sequence(tau: f64, ks: &[usize], n: usize, sign: f64) -> Result<Vec<FanPoint>> {
    if !(tau > 0.0) {
        return domain("the sequence needs tau > 0");
    }
    ks.iter().map(|&k| FanPoint::ray(k, sign.signum() * tau / (2 * k + n) as f64, n)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityRow {
    pub k: usize,
    pub lambda: f64,
    pub value: C64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityCheck {
    pub tau: f64,
    pub target: C64,
    pub rows: Vec<ContinuityRow>,
    /// Least-squares slope of `log gap` against `log(2k+n)`.
    pub fitted_exponent: f64,
    /// `gap_j / gap_{j+1}` for consecutive entries.
    pub shrink: Vec<f64>,
    pub monotone: bool,
    pub final_ok: bool,
}

impl ContinuityCheck {
    pub fn passes(&self) -> bool {
        self.monotone && self.final_ok
    }

    pub fn verdict(&self) -> Verdict {
        let last = self.rows.last().map_or(0.0, |r| r.gap);
        Verdict::new(
            "limit_continuity",
            serde_json::json!({
                "tau": self.tau,
                "k": self.rows.iter().map(|r| r.k).collect::<Vec<_>>(),
                "fitted_exponent": self.fitted_exponent,
                "shrink": self.shrink,
            }),
            last,
            5e-2 * self.target.norm() + 1e-4,
            self.passes(),
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_table(
            path,
            &["k", "lambda", "re", "im", "gap"],
            self.rows
                .iter()
                .map(|r| vec![r.k.to_string(), fmt(r.lambda), fmt(r.value.re), fmt(r.value.im), fmt(r.gap)]),
        )
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Gaps `|f~(a_j, z) - fhat(0, tau, z)|` along a sequence of ray points (n = 1).
pub fn limit_continuity_check(f: &HField, tau: f64, z: (f64, f64), sequence: &[FanPoint], grid: GridSpec) -> Result<ContinuityCheck> {
    if sequence.is_empty() {
        return domain("empty sequence");
    }
    let limit = FanPoint::limit(tau, 1)?;
    let target = forward_at(&central_transform(f, 0.0, grid)?, &limit, z.0, z.1)?;
    let slices = central_slices(f, sequence, grid)?;
    let rows = sequence
        .par_iter()
        .map(|a| match *a {
            FanPoint::Ray { k, lambda, n } => {
                let v = forward_at(&slices[&(-lambda).to_bits()], a, z.0, z.1)? * normalization(k, n);
                Ok(ContinuityRow { k, lambda, value: v, gap: (v - target).norm() })
            }
            FanPoint::Limit { .. } => domain("sequence entries must be ray points"),
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = 1e-300;
    let xs: Vec<f64> = rows.iter().map(|r| ((2 * r.k + 1) as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.gap.max(floor).ln()).collect();
    let fitted_exponent = if rows.len() > 1 { slope(&xs, &ys) } else { f64::NAN };
    let shrink: Vec<f64> = rows.windows(2).map(|w| w[0].gap / w[1].gap.max(floor)).collect();
    let monotone = rows.windows(2).all(|w| w[1].gap <= w[0].gap);
    let final_ok = rows.last().is_some_and(|r| r.gap <= 5e-2 * target.norm() + 1e-4);
    Ok(ContinuityCheck { tau, target, rows, fitted_exponent, shrink, monotone, final_ok })
}

/// Sup ratios `sup |f~| / ‖f‖_1` on rays and on the limiting ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBound {
    pub ray_ratio: f64,
    pub limit_ratio: f64,
    /// `(n-1)! 2^{n-1}` times the sup of the Bessel kernel, which is 1.
    pub limit_constant: f64,
}

impl SupBound {
    pub fn verdict(&self) -> Verdict {
        let pass = self.ray_ratio <= 1.0 + 1e-6 && self.limit_ratio <= self.limit_constant * (1.0 + 1e-6);
        Verdict::new(
            "linf_bound",
            serde_json::json!({ "limit_ratio": self.limit_ratio, "limit_constant": self.limit_constant }),
            self.ray_ratio,
            1.0 + 1e-6,
            pass,
        )
    }
}

/// Maximum of `|f~(a, z)| / ‖f‖_1` over the fan and the z-grid (n = 1).
pub fn linf_bound_check(f: &HField, fan: &FanGrid, grid: GridSpec) -> Result<SupBound> {
    let l1 = l1_norm_h(f, grid);
    let limit_constant = factorial(fan.n - 1) * 2f64.powi(fan.n as i32 - 1);
    if l1 == 0.0 {
        return Ok(SupBound { ray_ratio: 0.0, limit_ratio: 0.0, limit_constant });
    }
    let c = normalize(&forward(f, fan, grid, Route::Auto)?)?;
    let rays = c.ray_count();
    let ray_sup = c.slices[..rays].iter().map(|s| s.sup_abs()).fold(0.0, f64::max);
    let limit_sup = c.slices[rays..].iter().map(|s| s.sup_abs()).fold(0.0, f64::max);
    Ok(SupBound { ray_ratio: ray_sup / l1, limit_ratio: limit_sup / l1, limit_constant })
}

/// `‖f‖_{L^2(H^n)}^2` for radial inputs.
pub fn radial_l2_sq(f: &RadialH) -> f64 {
    match f {
        RadialH::Separable { u, v, n } => {
            let p = RadialProfile::from_fn(*n, u.reach(), RADIAL_NODES, |r| C64::new(u.radial(r).unwrap_or(0.0).powi(2), 0.0));
            p.integrate().re * v.l2_sq()
        }
        RadialH::HeatKernel { b, n } => {
            // (2pi)^{-1} ∫ (2pi)^{-n} |l|^n (2 sinh(2b|l|))^{-n} d lambda
            let (x, w) = gauss_legendre_on(400, 0.0, 40.0 / b);
            let nf = *n as i32;
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(l, wi)| wi * (l / (2.0 * PI)).powi(nf) * (2.0 * (2.0 * b * l).sinh()).powi(-nf))
                .sum();
            2.0 * s / (2.0 * PI)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyEndpoints {
    /// `sup_{rays} |f~| / ‖f‖_1`
    pub p1_ratio: f64,
    /// `Σ nu_2(a) ∫ |f~(a, z)|^2 dz`
    pub p2_spectral: f64,
    /// `‖f‖_2^2`
    pub p2_direct: f64,
}

impl HyEndpoints {
    pub fn p2_error(&self) -> f64 {
        if self.p2_direct == 0.0 {
            return self.p2_spectral.abs();
        }
        (self.p2_spectral - self.p2_direct).abs() / self.p2_direct
    }

    pub fn verdicts(&self) -> [Verdict; 2] {
        [
            Verdict::at_most("hy_endpoint_p1", serde_json::json!({}), self.p1_ratio, 1.0 + 1e-6),
            Verdict::at_most(
                "hy_endpoint_p2",
                serde_json::json!({ "spectral": self.p2_spectral, "direct": self.p2_direct }),
                self.p2_error(),
                1e-2,
            ),
        ]
    }
}

/// Both Hausdorff–Young endpoints for a function radial in z, any n, through
/// the Laguerre coefficients: `f~(a, z) = normalization(k, n) R_k(-lambda) phi_k(z)`.
pub fn hausdorff_young_endpoints(f: &RadialH, fan: &FanGrid) -> Result<HyEndpoints> {
    let n = f.n();
    if fan.n != n {
        return domain(format!("fan has n = {}, function has n = {n}", fan.n));
    }
    let l1 = f.l1_norm();
    let per_lambda: Vec<(f64, f64)> = fan
        .lambda_nodes
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let r = gelfand_transform_rays(f, -lambda, fan.k_max);
            let mut sup: f64 = 0.0;
            let mut mass = Vec::with_capacity(r.len());
            for (k, c) in r.iter().enumerate() {
                let nk = normalization(k, n);
                sup = sup.max(c.norm() * nk * binomial(k + n - 1, k));
                mass.push(fan.nu2(i, k) * (nk * c.norm()).powi(2) * laguerre_norm_sq(k, n, lambda));
            }
            (sup, pairwise_sum_real(&mass))
        })
        .collect();
    let sup = per_lambda.iter().map(|p| p.0).fold(0.0, f64::max);
    let spectral = pairwise_sum_real(&per_lambda.iter().map(|p| p.1).collect::<Vec<_>>());
    Ok(HyEndpoints {
        p1_ratio: if l1 > 0.0 { sup / l1 } else { 0.0 },
        p2_spectral: spectral,
        p2_direct: radial_l2_sq(f),
    })
}

/// `D(k, lambda) = |lambda|^n ∫ |fhat(a, z)|^2 dz` per ray point of the fan.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub k: usize,
    pub lambda: f64,
    pub tau: f64,
    pub d: f64,
    /// `D / binom(k+n-1, k)` times the envelope's inverse.
    pub ratio: f64,
}

/// `(k, lambda, tau, D, binom(k+n-1, k))` per ray point.
type DecayTable = Vec<(usize, f64, f64, f64, f64)>;

fn decay_table(f: &HField, fan: &FanGrid, grid: GridSpec) -> Result<DecayTable> {
    let c = forward(f, fan, grid, Route::Auto)?;
    let n = fan.n;
    Ok(c.points[..c.ray_count()]
        .iter()
        .zip(&c.slices)
        .map(|(a, s)| match *a {
            FanPoint::Ray { k, lambda, .. } => {
                (k, lambda, tau_of(a), lambda.abs().powi(n as i32) * s.norm_sq(), binomial(k + n - 1, k))
            }
            FanPoint::Limit { .. } => unreachable!("ray block"),
        })
        .collect())
}

/// Lower edge of the top quartile in `tau`.
fn top_quartile(taus: &[f64]) -> f64 {
    let mut t = taus.to_vec();
    t.sort_by(f64::total_cmp);
    t[(3 * t.len()) / 4]
}

/// Envelope holds on the grid when `D e^{g(tau)} / binom` over the top quartile in `tau`
/// stays within `1e-6` of its maximum below it.
fn envelope_holds(rows: &[DecayRow], cut: f64) -> bool {
    let (mut low, mut high) = (0.0f64, 0.0f64);
    for r in rows {
        if r.tau < cut {
            low = low.max(r.ratio);
        } else {
            high = high.max(r.ratio);
        }
    }
    high <= low * (1.0 + 1e-6)
}

fn envelope_rows(table: &DecayTable, weight: impl Fn(f64) -> f64) -> Vec<DecayRow> {
    table
        .iter()
        .map(|&(k, lambda, tau, d, binom)| DecayRow {
            k,
            lambda,
            tau,
            d,
            ratio: if d == 0.0 { 0.0 } else { ((d / binom).ln() + weight(tau)).exp() },
        })
        .collect()
}

fn write_decay_csv(rows: &[DecayRow], path: &Path) -> Result<()> {
    write_table(
        path,
        &["k", "lambda", "tau", "d", "ratio"],
        rows.iter().map(|r| vec![r.k.to_string(), fmt(r.lambda), fmt(r.tau), fmt(r.d), fmt(r.ratio)]),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub b: f64,
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `-log(D / binom)` against `tau`; infinite for `D ≡ 0`.
    pub fitted_rate: f64,
    /// `max D e^{2 b tau} / binom`.
    pub constant: f64,
    /// The bound with parameter `b` does not grow into the top quartile in `tau`.
    pub holds: bool,
    /// Largest `b'` whose bound still holds in that sense; `None` when every `b'` does.
    pub b_max: Option<f64>,
}

impl HardyReport {
    pub fn rate_error(&self) -> f64 {
        if self.fitted_rate.is_infinite() {
            return 0.0;
        }
        (self.fitted_rate / (2.0 * self.b) - 1.0).abs()
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::at_most(
            "hardy_profile",
            serde_json::json!({
                "b": self.b,
                "fitted_rate": if self.fitted_rate.is_finite() { Some(self.fitted_rate) } else { None },
                "constant": self.constant,
                "holds": self.holds,
                "b_max": self.b_max,
            }),
            self.rate_error(),
            0.05,
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_decay_csv(&self.rows, path)
    }
}

/// Hardy decay profile of `f` against `e^{-2 b (2k+n)|lambda|}` (n = 1).
pub fn hardy_profile(f: &HField, b: f64, fan: &FanGrid, grid: GridSpec) -> Result<HardyReport> {
    if !(b > 0.0) {
        return domain("b must be positive");
    }
    let table = decay_table(f, fan, grid)?;
    let rows = envelope_rows(&table, |tau| 2.0 * b * tau);
    let live: Vec<_> = table.iter().filter(|r| r.3 > 0.0).collect();
    if live.len() < 2 {
        return Ok(HardyReport { b, rows, fitted_rate: f64::INFINITY, constant: 0.0, holds: true, b_max: None });
    }
    let xs: Vec<f64> = live.iter().map(|r| r.2).collect();
    let ys: Vec<f64> = live.iter().map(|r| -(r.3 / r.4).ln()).collect();
    let fitted_rate = slope(&xs, &ys);
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let taus: Vec<f64> = table.iter().map(|r| r.2).collect();
    let cut = top_quartile(&taus);
    let holds = envelope_holds(&rows, cut);
    let holds_at = |bb: f64| envelope_holds(&envelope_rows(&table, |tau| 2.0 * bb * tau), cut);
    let (mut lo, mut hi) = (0.0, (fitted_rate.max(2.0 * b)).max(1e-3));
    while holds_at(hi) && hi < 1e6 {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(HardyReport { b, rows, fitted_rate, constant, holds, b_max: Some(lo) })
}

/// Decreasing profiles for the Ingham envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Theta {
    /// `1 / log(e + t)`
    InvLog,
    /// `1 / log(e + t)^2`
    InvLogSq,
    /// `eps t`, increasing; only meaningful in the decay check.
    Linear { eps: f64 },
    Zero,
}

impl Theta {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Theta::InvLog => 1.0 / (std::f64::consts::E + t).ln(),
            Theta::InvLogSq => (std::f64::consts::E + t).ln().powi(-2),
            Theta::Linear { eps } => eps * t,
            Theta::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Diverging,
    Converging,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    /// `∫_1^{T_max} Theta(t) dt / t`
    pub integral: f64,
    /// Contributions of the doubling intervals `[2^{j-1}, 2^j]`.
    pub increments: Vec<f64>,
    /// Decay exponent of the increments in `j`, fitted over the upper half.
    pub exponent: f64,
    pub trend: Trend,
}

/// Increments decaying like `j^{-alpha}` with `alpha` above this count as summable.
pub const CONVERGENCE_EXPONENT: f64 = 1.25;

/// Integrates `Theta(t)/t` on `[1, T_max]` over doubling intervals and classifies the tail.
/// Increment exponents within 0.25 of the harmonic borderline are classified as diverging.
pub fn ingham_admissibility(theta: &dyn Fn(f64) -> f64, t_max: f64) -> Result<Admissibility> {
    if !(t_max >= 16.0) || !t_max.is_finite() {
        return domain("T_max must be finite and at least 16");
    }
    let levels = t_max.log2().floor() as usize;
    let mut prev = theta(1.0);
    if !(prev >= 0.0) {
        return domain("theta must be nonnegative");
    }
    let (gx, gw) = gauss_legendre_on(24, 0.0, 1.0);
    let mut increments = Vec::with_capacity(levels);
    for j in 1..=levels {
        let (a, b) = ((j - 1) as f64 * std::f64::consts::LN_2, j as f64 * std::f64::consts::LN_2);
        let mut acc = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            acc += w * theta((a + (b - a) * x).exp());
        }
        for s in [0.25, 0.5, 0.75, 1.0] {
            let v = theta((a + (b - a) * s).exp());
            if !(v >= 0.0) || v > prev * (1.0 + 1e-12) {
                return domain("theta must be nonnegative and nonincreasing");
            }
            prev = v;
        }
        increments.push(acc * (b - a));
    }
    let integral = pairwise_sum_real(&increments);
    let half = levels / 2;
    let tail: Vec<(f64, f64)> = (half..levels)
        .filter(|&i| increments[i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), increments[i].ln()))
        .collect();
    let exponent = if tail.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = tail.into_iter().unzip();
        -slope(&xs, &ys)
    } else {
        f64::INFINITY
    };
    let trend = if exponent > CONVERGENCE_EXPONENT { Trend::Converging } else { Trend::Diverging };
    Ok(Admissibility { integral, increments, exponent, trend })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InghamReport {
    pub rows: Vec<DecayRow>,
    /// `max D e^{sqrt(tau) Theta(sqrt(tau))} / binom`
    pub constant: f64,
    pub holds: bool,
}

impl InghamReport {
    pub fn verdict(&self, theta: &Theta) -> Verdict {
        Verdict::new(
            "ingham_decay",
            serde_json::json!({ "theta": theta, "holds": self.holds }),
            self.constant,
            f64::MAX,
            self.holds && self.constant.is_finite(),
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_decay_csv(&self.rows, path)
    }
}

/// Ingham envelope `e^{-sqrt(tau) Theta(sqrt(tau))}` against the decay profile of `f` (n = 1).
pub fn ingham_decay_check(f: &HField, theta: &Theta, fan: &FanGrid, grid: GridSpec) -> Result<InghamReport> {
    let table = decay_table(f, fan, grid)?;
    let rows = envelope_rows(&table, |tau| tau.sqrt() * theta.eval(tau.sqrt()));
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let taus: Vec<f64> = table.iter().map(|r| r.2).collect();
    let holds = envelope_holds(&rows, top_quartile(&taus));
    Ok(InghamReport { rows, constant, holds })
}
