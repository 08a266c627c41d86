//! Laguerre, Bessel and Hermite functions plus the quadrature rules built on them.

use crate::error::{domain, Result};
use std::f64::consts::PI;

/// Degree `k` and type `delta` of a generalized Laguerre polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaguerreOrder {
    pub k: usize,
    pub delta: usize,
}

/// Binomial coefficient as a float, built multiplicatively.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// (m)! as a float. Exact up to 22!.
pub fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, i| acc * i as f64)
}

/// `L_k^delta(x)` by the three-term recurrence in `k`.
pub fn laguerre_poly(order: LaguerreOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return domain(format!("laguerre_poly needs finite x >= 0, got {x}"));
    }
    let d = order.delta as f64;
    let mut prev = 1.0;
    if order.k == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + d - x;
    for j in 1..order.k {
        let jf = j as f64;
        let next = ((2.0 * jf + d + 1.0 - x) * cur - (jf + d) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Weighted values `e^{-x/2} L_j^delta(x)` for `j = 0..=k_max`.
///
/// The weight rides along in the recurrence, so the values stay bounded by
/// `binom(j+delta, j)`. Arguments too large for the starting weight to be
/// representable fall back to a rescaled unweighted recurrence.
pub fn laguerre_weighted_upto(k_max: usize, delta: usize, x: f64) -> Vec<f64> {
    let d = delta as f64;
    let mut out = Vec::with_capacity(k_max + 1);
    if x * 0.5 < 700.0 {
        let w = (-0.5 * x).exp();
        let mut prev = w;
        out.push(prev);
        if k_max == 0 {
            return out;
        }
        let mut cur = (1.0 + d - x) * w;
        out.push(cur);
        for j in 1..k_max {
            let jf = j as f64;
            let next = ((2.0 * jf + d + 1.0 - x) * cur - (jf + d) * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
            out.push(cur);
        }
        return out;
    }
    // log-scaled route for huge x
    let mut log_scale = -0.5 * x;
    let mut prev = 1.0f64;
    let mut cur = 1.0 + d - x;
    out.push(prev * log_scale.exp());
    if k_max == 0 {
        return out;
    }
    out.push(cur * log_scale.exp());
    for j in 1..k_max {
        let jf = j as f64;
        let mut next = ((2.0 * jf + d + 1.0 - x) * cur - (jf + d) * prev) / (jf + 1.0);
        if next.abs() > 1e200 {
            cur *= 1e-200;
            next *= 1e-200;
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
        prev = cur;
        cur = next;
        out.push(cur * log_scale.exp());
    }
    out
}

/// `phi_{k,lambda}^{n-1}(r) = L_k^{n-1}(|lambda| r^2 / 2) e^{-|lambda| r^2 / 4}`.
/// Negative `k` gives 0.
pub fn laguerre_function(k: i64, n: usize, lambda: f64, r: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if n == 0 {
        return domain("dimension n must be >= 1");
    }
    if k < 0 {
        return Ok(0.0);
    }
    let x = 0.5 * lambda.abs() * r * r;
    Ok(*laguerre_weighted_upto(k as usize, n - 1, x).last().unwrap())
}

/// All `phi_{j,lambda}^{n-1}(r)` for `j = 0..=k_max`.
pub fn laguerre_functions_upto(k_max: usize, n: usize, lambda: f64, r: f64) -> Vec<f64> {
    laguerre_weighted_upto(k_max, n - 1, 0.5 * lambda.abs() * r * r)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda == 0.0 || !lambda.is_finite() {
        return domain(format!("lambda must be finite and nonzero, got {lambda}"));
    }
    Ok(())
}

fn series_is_stable(m: usize, t: f64) -> bool {
    t <= 4.0 || 0.25 * t * t <= (m + 1) as f64
}

fn bessel_series(m: usize, t: f64) -> f64 {
    let half = 0.5 * t;
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut j = 0usize;
    loop {
        j += 1;
        term *= -q / (j as f64 * (m + j) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || j > 400 {
            break;
        }
    }
    sum
}

fn bessel_miller(m: usize, t: f64) -> f64 {
    let top = m.max(t as usize);
    let mut start = top + 20 + (160.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut next = 0.0f64;
    let mut cur = 1.0f64;
    let mut sum = 0.0f64;
    let mut jm = 0.0f64;
    let two_over_t = 2.0 / t;
    let mut j = start;
    while j > 0 {
        let prev = j as f64 * two_over_t * cur - next;
        next = cur;
        cur = prev;
        j -= 1;
        // cur now holds J_j up to scale
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            sum *= 1e-250;
            jm *= 1e-250;
        }
        if j == m {
            jm = cur;
        }
        if j % 2 == 0 && j > 0 {
            sum += 2.0 * cur;
        }
    }
    sum += cur;
    jm / sum
}

/// Bessel function `J_m(t)` of integer order.
pub fn bessel_j(m: usize, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return domain(format!("bessel_j needs finite t >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    if series_is_stable(m, t) {
        Ok(bessel_series(m, t))
    } else {
        Ok(bessel_miller(m, t))
    }
}

/// `(n-1)! 2^{n-1} J_{n-1}(t) / t^{n-1}`, equal to 1 at `t = 0`.
pub fn bessel_ratio(n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return domain("dimension n must be >= 1");
    }
    if !t.is_finite() || t < 0.0 {
        return domain(format!("bessel_ratio needs finite t >= 0, got {t}"));
    }
    let m = n - 1;
    if series_is_stable(m, t) {
        let q = 0.25 * t * t;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = 0usize;
        loop {
            j += 1;
            term *= -q / (j as f64 * (m + j) as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs().max(1e-300) || j > 400 {
                break;
            }
        }
        return Ok(sum);
    }
    let mut scale = 1.0;
    for i in 1..=m {
        scale *= 2.0 * i as f64 / t;
    }
    Ok(scale * bessel_miller(m, t))
}

/// Normalized Hermite functions `h_0..h_{count-1}` at `x`.
pub fn hermite_functions(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if count == 1 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * h0);
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Scaled Hermite function `prod_j |lambda|^{1/4} h_{alpha_j}(sqrt|lambda| xi_j)`.
pub fn hermite_function(alpha: &[usize], lambda: f64, xi: &[f64]) -> Result<f64> {
    check_lambda(lambda)?;
    if alpha.len() != xi.len() {
        return domain("multi-index and point differ in length");
    }
    let s = lambda.abs().sqrt();
    let mut acc = 1.0;
    for (&a, &x) in alpha.iter().zip(xi) {
        let h = hermite_functions(a + 1, s * x);
        acc *= lambda.abs().powf(0.25) * h[a];
    }
    Ok(acc)
}

/// Bessel main term of the Laguerre-to-Bessel asymptotics,
/// `bessel_ratio(n, sqrt((2k+n)|lambda|) r)`.
pub fn laguerre_asymptotic_main(k: usize, n: usize, lambda: f64, r: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let s = (((2 * k + n) as f64) * lambda.abs()).sqrt();
    bessel_ratio(n, s * r)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = mf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let c = 0.5 * (b + a);
    let h = 0.5 * (b - a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|t| h * t).collect())
}

/// Gauss–Hermite rule in function form: `int g(x) dx ≈ Σ W_i g(x_i)`, exact when
/// `g = e^{-x^2} p(x)` with `deg p < 2m`. Weights are the Christoffel numbers
/// `1 / Σ_{k<m} h_k(x_i)^2`, which never overflow.
pub fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mf = m as f64;
    let pim4 = PI.powf(-0.25);
    let mut z = 0.0f64;
    for i in 0..m.div_ceil(2) {
        z = match i {
            0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * mf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        for _ in 0..200 {
            // normalized Hermite polynomials without the Gaussian factor
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            let pp = (2.0 * mf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
    }
    let half = &x[..m.div_ceil(2)];
    let mut nodes: Vec<f64> = half.iter().map(|v| -v).collect();
    nodes.extend(half.iter().rev().skip(m % 2));
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&t| {
            let h = hermite_functions(m, t);
            1.0 / h.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    (nodes, weights)
}
