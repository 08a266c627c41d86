//! Points of the Heisenberg fan, its discretization, and the measures on it.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A sample point of the fan: a ray point `(k, lambda)` or a limiting-ray point `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FanPoint {
    Ray { k: usize, lambda: f64, n: usize },
    Limit { tau: f64, n: usize },
}

impl FanPoint {
    pub fn ray(k: usize, lambda: f64, n: usize) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return domain("a ray point needs a finite nonzero lambda");
        }
        if n == 0 {
            return domain("dimension n must be >= 1");
        }
        Ok(FanPoint::Ray { k, lambda, n })
    }

    pub fn limit(tau: f64, n: usize) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return domain("a limit point needs a finite tau >= 0");
        }
        Ok(FanPoint::Limit { tau, n })
    }

    pub fn n(&self) -> usize {
        match *self {
            FanPoint::Ray { n, .. } | FanPoint::Limit { n, .. } => n,
        }
    }

    /// Coordinates `(lambda, tau)` in the plane.
    pub fn coords(&self) -> (f64, f64) {
        (self.lambda(), tau_of(self))
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            FanPoint::Ray { lambda, .. } => lambda,
            FanPoint::Limit { .. } => 0.0,
        }
    }
}

/// `(2k+n)|lambda|` on rays, `tau` on the limiting ray.
pub fn tau_of(a: &FanPoint) -> f64 {
    match *a {
        FanPoint::Ray { k, lambda, n } => (2 * k + n) as f64 * lambda.abs(),
        FanPoint::Limit { tau, .. } => tau,
    }
}

/// Euclidean distance in the `(lambda, tau)` plane.
pub fn fan_distance(a: &FanPoint, b: &FanPoint) -> f64 {
    let (l1, t1) = a.coords();
    let (l2, t2) = b.coords();
    (l1 - l2).hypot(t1 - t2)
}

/// `k!(n-1)!/(k+n-1)!`, computed as a running product.
pub fn normalization(k: usize, n: usize) -> f64 {
    let mut acc = 1.0;
    for i in 1..n {
        acc *= i as f64 / (k + i) as f64;
    }
    acc
}

/// How a lambda cell is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CellRule {
    #[default]
    Midpoint,
    Gauss2,
}

fn check_cell(cell: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b) = if cell.0 <= cell.1 { cell } else { (cell.1, cell.0) };
    if a < 0.0 && b > 0.0 {
        return domain(format!("cell [{a}, {b}] straddles lambda = 0"));
    }
    Ok((a, b))
}

fn integrate_cell(cell: (f64, f64), rule: CellRule, density: impl Fn(f64) -> f64) -> Result<f64> {
    let (a, b) = check_cell(cell)?;
    let h = b - a;
    let c = 0.5 * (a + b);
    Ok(match rule {
        CellRule::Midpoint => density(c) * h,
        CellRule::Gauss2 => {
            let d = 0.5 * h / 3f64.sqrt();
            0.5 * h * (density(c - d) + density(c + d))
        }
    })
}

fn plancherel_prefactor(n: usize) -> f64 {
    (2.0 * PI).powi(-(2 * n as i32) - 1)
}

/// Cell weight of `(2pi)^{-2n-1} |lambda|^{2n} d lambda`.
pub fn nu_weight(cell: (f64, f64), n: usize, rule: CellRule) -> Result<f64> {
    let c = plancherel_prefactor(n);
    integrate_cell(cell, rule, |l| c * l.abs().powi(2 * n as i32))
}

/// Cell weight of `(2pi)^{-2n-1} d lambda`.
pub fn nu1_weight(cell: (f64, f64), n: usize, rule: CellRule) -> Result<f64> {
    let c = plancherel_prefactor(n);
    integrate_cell(cell, rule, |_| c)
}

/// Cell weight of `(2pi)^{-2n-1} ((k+n-1)!/(k!(n-1)!))^2 |lambda|^{2n} d lambda`.
pub fn nu2_weight(cell: (f64, f64), k: usize, n: usize, rule: CellRule) -> Result<f64> {
    let m = normalization(k, n).powi(-2);
    Ok(m * nu_weight(cell, n, rule)?)
}

/// Discretization of the fan: lambda cells (symmetric about 0), a ray cutoff
/// `k_max`, and tau samples on the limiting ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanGrid {
    pub n: usize,
    pub lambda_nodes: Vec<f64>,
    /// Plain `d lambda` quadrature widths of each cell (node at the cell midpoint).
    pub lambda_weights: Vec<f64>,
    pub k_max: usize,
    pub tau_nodes: Vec<f64>,
    #[serde(default)]
    pub rule: CellRule,
}

/// Parameters that build a [`FanGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanParams {
    #[serde(default = "default_n")]
    pub n: usize,
    /// Half-width of the omitted neighbourhood of lambda = 0.
    #[serde(default)]
    pub eps0: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "default_nodes")]
    pub nodes_per_sign: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_tau")]
    pub tau_nodes: Vec<f64>,
    #[serde(default)]
    pub rule: CellRule,
}

fn default_n() -> usize {
    1
}
fn default_lambda_max() -> f64 {
    4.0
}
fn default_nodes() -> usize {
    16
}
fn default_k_max() -> usize {
    32
}
fn default_tau() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 4.0]
}

impl Default for FanParams {
    fn default() -> Self {
        FanParams {
            n: default_n(),
            eps0: 0.0,
            lambda_max: default_lambda_max(),
            nodes_per_sign: default_nodes(),
            k_max: default_k_max(),
            tau_nodes: default_tau(),
            rule: CellRule::Midpoint,
        }
    }
}

impl FanParams {
    pub fn build(&self) -> Result<FanGrid> {
        FanGrid::uniform(self.n, self.eps0, self.lambda_max, self.nodes_per_sign, self.k_max, self.tau_nodes.clone(), self.rule)
    }
}

impl FanGrid {
    /// Equal cells on `[eps0, lambda_max]` and their mirror images, ordered
    /// from the most negative lambda upwards.
    pub fn uniform(
        n: usize,
        eps0: f64,
        lambda_max: f64,
        nodes_per_sign: usize,
        k_max: usize,
        tau_nodes: Vec<f64>,
        rule: CellRule,
    ) -> Result<Self> {
        if n == 0 || nodes_per_sign == 0 || !(lambda_max > eps0) || eps0 < 0.0 {
            return Err(Error::Config(format!(
                "invalid fan: n={n} nodes={nodes_per_sign} range=[{eps0}, {lambda_max}]"
            )));
        }
        let h = (lambda_max - eps0) / nodes_per_sign as f64;
        let pos: Vec<f64> = (0..nodes_per_sign).map(|i| eps0 + (i as f64 + 0.5) * h).collect();
        let mut lambda_nodes: Vec<f64> = pos.iter().rev().map(|l| -l).collect();
        lambda_nodes.extend(pos.iter());
        let grid = FanGrid {
            n,
            lambda_weights: vec![h; lambda_nodes.len()],
            lambda_nodes,
            k_max,
            tau_nodes,
            rule,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda_nodes.len() != self.lambda_weights.len() {
            return Err(Error::Config("lambda nodes and weights differ in length".into()));
        }
        if self.lambda_nodes.iter().any(|l| *l == 0.0 || !l.is_finite()) {
            return Err(Error::Config("lambda nodes must be finite and nonzero".into()));
        }
        if self.lambda_weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Config("lambda weights must be positive".into()));
        }
        let mut pos: Vec<f64> = self.lambda_nodes.iter().filter(|l| **l > 0.0).copied().collect();
        let mut neg: Vec<f64> = self.lambda_nodes.iter().filter(|l| **l < 0.0).map(|l| -l).collect();
        pos.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        if pos.len() != neg.len() || pos.iter().zip(&neg).any(|(a, b)| (a - b).abs() > 1e-12 * a) {
            return Err(Error::Config("lambda nodes must be symmetric about 0".into()));
        }
        if self.tau_nodes.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::Config("tau nodes must be >= 0".into()));
        }
        Ok(())
    }

    /// The lambda cell around node `i`.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let l = self.lambda_nodes[i];
        let h = self.lambda_weights[i];
        (l - 0.5 * h, l + 0.5 * h)
    }

    pub fn nu(&self, i: usize) -> f64 {
        nu_weight(self.cell(i), self.n, self.rule).expect("cells never straddle zero")
    }

    pub fn nu2(&self, i: usize, k: usize) -> f64 {
        nu2_weight(self.cell(i), k, self.n, self.rule).expect("cells never straddle zero")
    }

    /// Ray points in fixed order: lambda ascending, then k ascending.
    pub fn rays(&self) -> Vec<FanPoint> {
        let mut v = Vec::with_capacity(self.lambda_nodes.len() * (self.k_max + 1));
        for &lambda in &self.lambda_nodes {
            for k in 0..=self.k_max {
                v.push(FanPoint::Ray { k, lambda, n: self.n });
            }
        }
        v
    }

    pub fn limits(&self) -> Vec<FanPoint> {
        self.tau_nodes.iter().map(|&tau| FanPoint::Limit { tau, n: self.n }).collect()
    }

    /// Total nu-mass of the truncated grid (every ray counted once per cell).
    pub fn total_nu_mass(&self) -> f64 {
        (0..self.lambda_nodes.len()).map(|i| self.nu(i)).sum::<f64>() * (self.k_max + 1) as f64
    }

    /// Same spacing, twice the lambda range and node count, and twice `k_max`.
    pub fn doubled(&self) -> Result<FanGrid> {
        let pos: Vec<(f64, f64)> = self
            .lambda_nodes
            .iter()
            .zip(&self.lambda_weights)
            .filter(|(l, _)| **l > 0.0)
            .map(|(l, w)| (*l, *w))
            .collect();
        let top = pos.iter().map(|(l, w)| l + 0.5 * w).fold(0.0, f64::max);
        let bottom = pos.iter().map(|(l, w)| l - 0.5 * w).fold(f64::INFINITY, f64::min);
        FanGrid::uniform(
            self.n,
            bottom,
            bottom + 2.0 * (top - bottom),
            2 * pos.len(),
            2 * self.k_max,
            self.tau_nodes.clone(),
            self.rule,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: FanGrid = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }
}
