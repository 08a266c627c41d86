//! Finite sections of the Schrödinger representation: matrix elements of
//! `pi_lambda(z, 0)` in the scaled Hermite basis, the Weyl transform, the
//! group Fourier transform and the checks tying them to twisted convolution
//! and to the ray slices.

use crate::error::{domain, Error, Result};
use crate::fan::{FanGrid, FanPoint};
use crate::field::{central_transform, fmt, GridSpec, HField, ZField, C64};
use crate::specfun::{gauss_hermite, hermite_functions};
use crate::twisted::{laguerre_field, laguerre_tail_fraction, twisted_conv};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};
use std::path::Path;

pub const DEFAULT_TRUNCATION: usize = 32;

/// Number of Hermite basis vectors kept (n = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermiteTruncation(usize);

impl HermiteTruncation {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return domain("truncation must keep at least one basis vector");
        }
        Ok(HermiteTruncation(m))
    }

    pub fn m(&self) -> usize {
        self.0
    }
}

impl Default for HermiteTruncation {
    fn default() -> Self {
        HermiteTruncation(DEFAULT_TRUNCATION)
    }
}

/// `entries[alpha * m + beta] = <W Phi_beta, Phi_alpha>`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylMatrix {
    pub m: usize,
    pub lambda: f64,
    pub entries: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    lambda: f64,
    m: usize,
}

impl WeylMatrix {
    pub fn zeros(m: usize, lambda: f64) -> Self {
        WeylMatrix { m, lambda, entries: vec![C64::new(0.0, 0.0); m * m] }
    }

    /// Coordinate projection `|k><k|`.
    pub fn projection(m: usize, lambda: f64, k: usize) -> Result<Self> {
        if k >= m {
            return domain(format!("index {k} outside the truncation {m}"));
        }
        let mut p = Self::zeros(m, lambda);
        p.entries[k * m + k] = C64::new(1.0, 0.0);
        Ok(p)
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.m + col]
    }

    fn check(&self, other: &WeylMatrix) -> Result<()> {
        if self.m != other.m {
            return Err(Error::Shape(format!("truncations {} and {}", self.m, other.m)));
        }
        Ok(())
    }

    pub fn hs_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: C64) -> WeylMatrix {
        WeylMatrix { m: self.m, lambda: self.lambda, entries: self.entries.iter().map(|v| v * c).collect() }
    }

    pub fn sub(&self, other: &WeylMatrix) -> Result<WeylMatrix> {
        self.check(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(WeylMatrix { m: self.m, lambda: self.lambda, entries })
    }

    pub fn mul(&self, other: &WeylMatrix) -> Result<WeylMatrix> {
        self.check(other)?;
        let m = self.m;
        let mut out = Self::zeros(m, self.lambda);
        for i in 0..m {
            for l in 0..m {
                let a = self.entries[i * m + l];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..m {
                    out.entries[i * m + j] += a * other.entries[l * m + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> WeylMatrix {
        let m = self.m;
        let mut out = Self::zeros(m, self.lambda);
        for i in 0..m {
            for j in 0..m {
                out.entries[j * m + i] = self.entries[i * m + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.m).map(|i| self.entries[i * self.m + i]).sum()
    }

    /// `W P_k`: column `k` kept, the rest zeroed.
    pub fn column_block(&self, k: usize) -> Result<WeylMatrix> {
        if k >= self.m {
            return domain(format!("index {k} outside the truncation {}", self.m));
        }
        let mut out = Self::zeros(self.m, self.lambda);
        for i in 0..self.m {
            out.entries[i * self.m + k] = self.entries[i * self.m + k];
        }
        Ok(out)
    }

    /// Squared mass of the last row and column over the total.
    pub fn tail_mass(&self) -> f64 {
        let m = self.m;
        let total: f64 = self.entries.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let mut edge = 0.0;
        for i in 0..m {
            edge += self.entries[(m - 1) * m + i].norm_sqr();
            if i + 1 < m {
                edge += self.entries[i * m + m - 1].norm_sqr();
            }
        }
        edge / total
    }

    /// Largest singular value by power iteration on `W* W`.
    pub fn operator_norm(&self) -> f64 {
        let m = self.m;
        let mut v: Vec<C64> = (0..m).map(|i| C64::new(1.0 + 0.01 * i as f64, 0.0)).collect();
        let mut sigma = 0.0;
        for _ in 0..500 {
            let w: Vec<C64> = (0..m).map(|i| (0..m).map(|j| self.entries[i * m + j] * v[j]).sum()).collect();
            let u: Vec<C64> = (0..m).map(|j| (0..m).map(|i| self.entries[i * m + j].conj() * w[i]).sum()).collect();
            let nu = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if nu == 0.0 {
                return 0.0;
            }
            let next = nu.sqrt();
            v = u.iter().map(|x| x / nu).collect();
            if (next - sigma).abs() <= 1e-15 * next {
                return next;
            }
            sigma = next;
        }
        sigma
    }

    /// CSV `row,col,re,im` plus a JSON sidecar with the same stem.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["row", "col", "re", "im"])?;
        for i in 0..self.m {
            for j in 0..self.m {
                let v = self.get(i, j);
                w.write_record([i.to_string(), j.to_string(), fmt(v.re), fmt(v.im)])?;
            }
        }
        w.flush()?;
        let side = Sidecar { lambda: self.lambda, m: self.m };
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<WeylMatrix> {
        let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json"))?)?;
        let mut out = Self::zeros(side.m, side.lambda);
        let mut r = csv::Reader::from_path(path)?;
        let mut seen = 0;
        for rec in r.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Io(format!("bad field {i}")))
            };
            let (i, j) = (parse(0)? as usize, parse(1)? as usize);
            if i >= side.m || j >= side.m {
                return Err(Error::Shape(format!("entry ({i},{j}) outside {}", side.m)));
            }
            out.entries[i * side.m + j] = C64::new(parse(2)?, parse(3)?);
            seen += 1;
        }
        if seen != side.m * side.m {
            return Err(Error::Shape(format!("{seen} entries for truncation {}", side.m)));
        }
        Ok(out)
    }
}

/// Gauss–Hermite order resolving `h_alpha h_beta e^{i c v}` for orders below `top`.
pub fn quadrature_order(top: usize, lambda: f64, x: f64) -> usize {
    let c = lambda.abs().sqrt() * x.abs();
    let need = ((2 * top) as f64 + E * c + 40.0) / 2.0;
    (need.ceil() as usize).max(2 * top)
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_hermite(order);
        Rule { nodes, weights }
    }
}

/// Accumulates `scale * <pi_lambda(x,y,0) Phi_beta, Phi_alpha>` into `out` for alpha, beta < m.
fn pi_block_into(lambda: f64, x: f64, y: f64, m: usize, rule: &Rule, scale: C64, out: &mut [C64]) {
    let sl = lambda.abs().sqrt();
    let c = lambda.signum() * sl * x;
    let s = sl * y;
    let base = 0.5 * lambda * x * y;
    for (v, w) in rule.nodes.iter().zip(&rule.weights) {
        let u = v - 0.5 * s;
        let a = hermite_functions(m, u);
        let b = hermite_functions(m, v + 0.5 * s);
        let wv = scale * C64::from_polar(*w, c * u + base);
        for (alpha, ha) in a.iter().enumerate() {
            if *ha == 0.0 {
                continue;
            }
            let coef = wv * ha;
            let row = &mut out[alpha * m..(alpha + 1) * m];
            for (dst, hb) in row.iter_mut().zip(&b) {
                *dst += coef * hb;
            }
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda == 0.0 || !lambda.is_finite() {
        return domain("lambda must be finite and nonzero");
    }
    Ok(())
}

/// Finite section of `pi_lambda(z, 0)` with an explicit quadrature order, and a
/// warning when the order is too low for the requested block.
pub fn pi_matrix_with_order(lambda: f64, x: f64, y: f64, m: usize, order: usize) -> Result<(WeylMatrix, Option<String>)> {
    check_lambda(lambda)?;
    if m == 0 || order == 0 {
        return domain("empty block or quadrature");
    }
    let need = quadrature_order(m, lambda, x);
    let warning = (order < need).then(|| format!("Gauss-Hermite order {order} below {need} for orders < {m}"));
    let mut out = WeylMatrix::zeros(m, lambda);
    pi_block_into(lambda, x, y, m, &Rule::new(order), C64::new(1.0, 0.0), &mut out.entries);
    Ok((out, warning))
}

/// Finite section of `pi_lambda(z, 0)`.
pub fn pi_matrix(lambda: f64, x: f64, y: f64, m: usize) -> Result<WeylMatrix> {
    Ok(pi_matrix_with_order(lambda, x, y, m, quadrature_order(m, lambda, x))?.0)
}

/// `<pi_lambda(z, 0) Phi_beta, Phi_alpha>`.
pub fn pi_matrix_element(lambda: f64, x: f64, y: f64, alpha: usize, beta: usize) -> Result<C64> {
    let m = alpha.max(beta) + 1;
    Ok(pi_matrix(lambda, x, y, m)?.get(alpha, beta))
}

/// `W_lambda(g) = ∫ g(z) pi_lambda(z, 0) dz` on the grid of `g`.
pub fn weyl_transform(g: &ZField, lambda: f64, trunc: HermiteTruncation) -> Result<WeylMatrix> {
    check_lambda(lambda)?;
    let m = trunc.m();
    let grid = g.grid;
    let coords = grid.coords();
    let floor = g.max_abs() * 1e-18;
    if floor == 0.0 {
        return Ok(WeylMatrix::zeros(m, lambda));
    }
    let reach_x = (0..grid.points)
        .filter(|&i| (0..grid.points).any(|j| g.at(i, j).norm() > floor))
        .map(|i| coords[i].abs())
        .fold(0.0, f64::max);
    let rule = Rule::new(quadrature_order(m, lambda, reach_x));
    let h2 = grid.spacing() * grid.spacing();
    let rows: Vec<Vec<C64>> = (0..grid.points)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![C64::new(0.0, 0.0); m * m];
            for j in 0..grid.points {
                let v = g.at(i, j);
                if v.norm() > floor {
                    pi_block_into(lambda, coords[i], coords[j], m, &rule, v * h2, &mut acc);
                }
            }
            acc
        })
        .collect();
    let mut out = WeylMatrix::zeros(m, lambda);
    for row in rows {
        for (dst, v) in out.entries.iter_mut().zip(row) {
            *dst += v;
        }
    }
    Ok(out)
}

/// `fhat(lambda) = W_lambda(f^lambda)`.
pub fn group_fourier(f: &HField, lambda: f64, trunc: HermiteTruncation, grid: GridSpec) -> Result<WeylMatrix> {
    check_lambda(lambda)?;
    weyl_transform(&central_transform(f, lambda, grid)?, lambda, trunc)
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Relative HS distance between `(2pi)^{-1}|lambda| W(g *_lambda phi_k)` and `W(g) P_k`.
pub fn projection_identity_residual(g: &ZField, lambda: f64, k: usize, trunc: HermiteTruncation) -> Result<f64> {
    check_lambda(lambda)?;
    if k >= trunc.m() {
        return domain(format!("index {k} outside the truncation {}", trunc.m()));
    }
    let conv = padded_laguerre_conv(g, k, lambda)?;
    let lhs = weyl_transform(&conv, lambda, trunc)?.scale(C64::new(lambda.abs() / (2.0 * PI), 0.0));
    let rhs = weyl_transform(g, lambda, trunc)?.column_block(k)?;
    let scale = lhs.hs_norm().max(rhs.hs_norm());
    Ok(relative(lhs.sub(&rhs)?.hs_norm(), scale))
}

/// `g *_lambda phi_k` on a grid widened by the reach of `phi_k`, so that the
/// convolution is not cut at the edge of `g`'s grid.
fn padded_laguerre_conv(g: &ZField, k: usize, lambda: f64) -> Result<ZField> {
    let grid = g.grid;
    let h = grid.spacing();
    let mut extra = 0;
    while laguerre_tail_fraction(k, lambda, extra as f64 * h) > 1e-12 {
        extra += 1;
    }
    let wide = GridSpec::new(grid.half_width + extra as f64 * h, grid.points + 2 * extra)?;
    let padded = ZField::from_fn(wide, |x, y| match (grid.node_index(x), grid.node_index(y)) {
        (Some(i), Some(j)) => g.at(i, j),
        _ => C64::new(0.0, 0.0),
    });
    twisted_conv(&padded, &laguerre_field(wide, k, lambda), lambda)
}

/// Relative HS distance between `W(f *_lambda g)` and `W(f) W(g)`.
pub fn product_residual(f: &ZField, g: &ZField, lambda: f64, trunc: HermiteTruncation) -> Result<f64> {
    let lhs = weyl_transform(&twisted_conv(f, g, lambda)?, lambda, trunc)?;
    let rhs = weyl_transform(f, lambda, trunc)?.mul(&weyl_transform(g, lambda, trunc)?)?;
    let scale = lhs.hs_norm().max(rhs.hs_norm());
    Ok(relative(lhs.sub(&rhs)?.hs_norm(), scale))
}

/// Both sides of the slice norm relation at a ray point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsSlice {
    /// `∫ |fhat(a, z)|^2 dz` from the ray slice `f^{-lambda} *_{-lambda} phi_k`.
    pub lhs: f64,
    /// `2pi |lambda|^{-1} ‖fhat(lambda) P_k‖_HS^2` with `fhat(lambda) = W_lambda(f^lambda)`.
    pub rhs: f64,
    /// The same with `fhat(-lambda)`, the operator the slice actually carries.
    pub rhs_mirror: f64,
}

pub fn hs_slice_relation(f: &HField, a: &FanPoint, trunc: HermiteTruncation, grid: GridSpec) -> Result<HsSlice> {
    let (k, lambda) = match a {
        FanPoint::Ray { k, lambda, n: 1 } => (*k, *lambda),
        FanPoint::Ray { .. } => return domain("the matrix side is implemented for n = 1"),
        FanPoint::Limit { .. } => return domain("the slice relation needs a ray point"),
    };
    if k >= trunc.m() {
        return domain(format!("index {k} outside the truncation {}", trunc.m()));
    }
    let fm = central_transform(f, -lambda, grid)?;
    let slice = twisted_conv(&fm, &laguerre_field(grid, k, lambda), -lambda)?;
    let h = grid.spacing();
    let lhs = slice.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h;
    let c = 2.0 * PI / lambda.abs();
    let col = |w: &WeylMatrix| -> Result<f64> { Ok(w.column_block(k)?.hs_norm().powi(2)) };
    let rhs = c * col(&group_fourier(f, lambda, trunc, grid)?)?;
    let rhs_mirror = c * col(&weyl_transform(&fm, -lambda, trunc)?)?;
    Ok(HsSlice { lhs, rhs, rhs_mirror })
}

/// `∫ tr(fhat(lambda) ghat(lambda)^*) (2pi)^{-2}|lambda| d lambda` over the fan's lambda nodes.
pub fn parseval_pairing(f: &HField, g: &HField, fan: &FanGrid, trunc: HermiteTruncation, grid: GridSpec) -> Result<C64> {
    if fan.n != 1 {
        return domain("the matrix side is implemented for n = 1");
    }
    let mut acc = C64::new(0.0, 0.0);
    for (l, w) in fan.lambda_nodes.iter().zip(&fan.lambda_weights) {
        let fh = group_fourier(f, *l, trunc, grid)?;
        let gh = group_fourier(g, *l, trunc, grid)?;
        let tr = fh.mul(&gh.adjoint())?.trace();
        acc += tr * (w * l.abs() / (4.0 * PI * PI));
    }
    Ok(acc)
}
