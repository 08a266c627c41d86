//! Twisted convolution on the z-grid, Laguerre coefficients of radial
//! functions, and special Hermite partial sums.

use crate::error::{Error, Result};
use crate::fan::normalization;
use crate::field::{l2_norm_z, GridSpec, RadialProfile, ZField, C64};
use crate::specfun::{factorial, gauss_legendre_on, laguerre_functions_upto};
use rayon::prelude::*;
use std::f64::consts::PI;

/// `(f *_lambda g)(z) = ∫ f(z-w) g(w) e^{(i lambda/2) Im(z conj w)} dw` by direct
/// quadrature over the grid; `f(z-w)` off the grid counts as zero.
pub fn twisted_conv(f: &ZField, g: &ZField, lambda: f64) -> Result<ZField> {
    f.check_same_grid(g)?;
    let grid = f.grid;
    let n = grid.points;
    let half = n / 2;
    let xs = grid.coords();
    let h = grid.spacing();
    // Im(z conj w) = y x' - x y' splits the phase into two tables
    let p_tab: Vec<C64> = (0..n * n)
        .map(|idx| C64::from_polar(1.0, 0.5 * lambda * xs[idx / n] * xs[idx % n]))
        .collect();
    let fv = &f.values;
    let gv = &g.values;
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let xa = xs[a];
            let q: Vec<C64> = xs.iter().map(|yd| C64::from_polar(1.0, -0.5 * lambda * xa * yd)).collect();
            let mut out = vec![C64::new(0.0, 0.0); n];
            let mut gq = vec![C64::new(0.0, 0.0); n];
            for c in 0..n {
                let fi = a as isize - c as isize + half as isize;
                if fi < 0 || fi >= n as isize {
                    continue;
                }
                let frow = &fv[fi as usize * n..(fi as usize + 1) * n];
                if frow.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                    continue;
                }
                let grow = &gv[c * n..(c + 1) * n];
                for d in 0..n {
                    gq[d] = grow[d] * q[d];
                }
                for (b, o) in out.iter_mut().enumerate() {
                    // d ranges over b + half - n + 1 ..= b + half, clipped to the grid
                    let lo = (b + half + 1).saturating_sub(n);
                    let hi = (b + half).min(n - 1);
                    let mut acc = C64::new(0.0, 0.0);
                    for d in lo..=hi {
                        acc += frow[b + half - d] * gq[d];
                    }
                    *o += p_tab[b * n + c] * acc;
                }
            }
            for o in out.iter_mut() {
                *o *= h * h;
            }
            out
        })
        .collect();
    Ok(ZField { grid, values: rows.concat(), lambda_tag: f.lambda_tag })
}

/// `phi_{k,lambda}` sampled on an n = 1 grid.
pub fn laguerre_field(grid: GridSpec, k: usize, lambda: f64) -> ZField {
    ZField::from_fn(grid, |x, y| C64::new(laguerre_functions_upto(k, 1, lambda, x.hypot(y))[k], 0.0))
}

/// `‖phi_{k,lambda}^{n-1}‖^2 = (2pi)^n |lambda|^{-n} (k+n-1)!/(k!(n-1)!)`.
pub fn laguerre_norm_sq(k: usize, n: usize, lambda: f64) -> f64 {
    (2.0 * PI / lambda.abs()).powi(n as i32) / normalization(k, n)
}

/// Laguerre coefficient `R_k^{n-1}` of a radial profile:
/// `(2pi)^n 2^{1-n} k!/(k+n-1)! ∫_0^∞ f(r) phi_{k,lambda}^{n-1}(r) r^{2n-1} dr`.
/// Negative `k` gives 0.
pub fn laguerre_projection_radial(f: &RadialProfile, k: i64, lambda: f64, n: usize) -> Result<C64> {
    if f.n != n {
        return Err(Error::Shape(format!("profile has n = {}, asked for n = {n}", f.n)));
    }
    if lambda == 0.0 {
        return Err(Error::Domain("lambda must be nonzero".into()));
    }
    if k < 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let k = k as usize;
    let mut c = (2.0 * PI).powi(n as i32) * 2f64.powi(1 - n as i32);
    c *= factorial(k) / factorial(k + n - 1);
    let terms: Vec<C64> = (0..f.r_nodes.len())
        .map(|i| f.values[i] * (f.weights[i] * laguerre_functions_upto(k, n, lambda, f.r_nodes[i])[k]))
        .collect();
    Ok(crate::field::pairwise_sum(&terms) * c)
}

/// All coefficients `R_0..R_K` at once (one Laguerre sweep per node).
pub fn laguerre_projection_radial_all(f: &RadialProfile, k_max: usize, lambda: f64) -> Vec<C64> {
    let n = f.n;
    let sweeps: Vec<Vec<f64>> = f.r_nodes.iter().map(|&r| laguerre_functions_upto(k_max, n, lambda, r)).collect();
    (0..=k_max)
        .map(|k| {
            let c = 2.0 * PI.powi(n as i32) * normalization(k, n) / factorial(n - 1);
            let terms: Vec<C64> = (0..f.r_nodes.len()).map(|i| f.values[i] * (f.weights[i] * sweeps[i][k])).collect();
            crate::field::pairwise_sum(&terms) * c
        })
        .collect()
}

/// Partial special Hermite sum `(2pi)^{-1}|lambda| Σ_{k<=K} g *_lambda phi_k` (n = 1),
/// with the norm of the last term as a tail estimate.
pub fn special_hermite_partial_sum(g: &ZField, lambda: f64, k_top: usize) -> Result<(ZField, f64)> {
    if lambda == 0.0 {
        return Err(Error::Domain("lambda must be nonzero".into()));
    }
    let c = C64::new(lambda.abs() / (2.0 * PI), 0.0);
    let mut acc = ZField::zeros(g.grid);
    let mut tail = 0.0;
    for k in 0..=k_top {
        let term = twisted_conv(g, &laguerre_field(g.grid, k, lambda), lambda)?.scale(c);
        tail = l2_norm_z(&term);
        acc = acc.add(&term)?;
    }
    Ok((acc, tail))
}

/// Share of `∫|phi_{k,lambda}|^2 r dr` lying beyond `radius` (n = 1 measure).
pub fn laguerre_tail_fraction(k: usize, lambda: f64, radius: f64) -> f64 {
    let l = lambda.abs();
    // phi decays like e^{-l r^2/4} past the last zero at l r^2/2 ~ 4k+2
    let reach = ((8 * k + 4) as f64 / l).sqrt() + 12.0 / l.sqrt();
    let mass = |a: f64, b: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        let cells = 8 + (2 * k + 1) * ((b - a) / reach).ceil() as usize;
        let w = (b - a) / cells as f64;
        (0..cells)
            .map(|c| {
                let (xs, ws) = gauss_legendre_on(24, a + c as f64 * w, a + (c + 1) as f64 * w);
                xs.iter().zip(&ws).map(|(r, wt)| wt * r * laguerre_functions_upto(k, 1, l, *r)[k].powi(2)).sum::<f64>()
            })
            .sum()
    };
    let outer = mass(radius, reach.max(radius));
    let total = mass(0.0, radius.min(reach)) + outer;
    if total > 0.0 { outer / total } else { 0.0 }
}
