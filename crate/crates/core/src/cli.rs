//! Experiment driver: configuration, one runner per suite, artifacts and manifests.

use crate::analysis::{
    continuity_sequence, hardy_profile, hausdorff_young_endpoints, ingham_admissibility, ingham_decay_check,
    limit_continuity_check, linf_bound_check, rl_scan, EscapePath, Theta, Trend, Verdict,
};
use crate::error::{Error, Result};
use crate::fan::{FanGrid, FanParams, FanPoint};
use crate::field::{central_transform, fmt, l2_norm_z, CentralProfile, GridSpec, HField, ZProfile};
use crate::gelfand::{
    gelfand_of_convolution, gelfand_sweep, gelfand_transform, heat_kernel_profile, multiplier_residual,
    radial_factorization_residual, write_gelfand_csv, RadialH,
};
use crate::hecke::{hecke_bochner_residual, write_hecke_csv, HarmonicDegree, HeckeRow};
use crate::strichartz::{
    forward, inverse, plancherel_pair, project, projector_residual_slice, projector_rows, write_dir,
    write_long_csv, ProjectorRow, Route, Slice,
};
use crate::weyl::{hs_slice_relation, projection_identity_residual, weyl_transform, HermiteTruncation};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const OUTPUT_ENV: &str = "HEISENFAN_OUTPUT";

/// Test functions selectable from a config; all carry a unit Gaussian in t
/// unless stated otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    Gaussian { sigma_z: f64, sigma_t: f64 },
    HeatKernel { b: f64 },
    HarmonicTimesRadial { p: usize, q: usize, sigma: f64 },
    Bump { radius: f64 },
}

impl Default for TestFunction {
    fn default() -> Self {
        TestFunction::Gaussian { sigma_z: 1.0, sigma_t: 1.0 }
    }
}

fn unit_t() -> CentralProfile {
    CentralProfile::Gaussian { sigma: 1.0, shift: 0.0 }
}

impl TestFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            TestFunction::Gaussian { sigma_z, sigma_t } => sigma_z > 0.0 && sigma_t > 0.0,
            TestFunction::HeatKernel { b } => b > 0.0,
            TestFunction::HarmonicTimesRadial { p, q, sigma } => sigma > 0.0 && p * q == 0,
            TestFunction::Bump { radius } => radius > 0.0,
        };
        if !ok {
            return Err(Error::Config(format!("invalid test function {self:?}")));
        }
        Ok(())
    }

    pub fn hfield(&self) -> HField {
        match *self {
            TestFunction::Gaussian { sigma_z, sigma_t } => HField::gaussian(sigma_z, sigma_t),
            TestFunction::HeatKernel { b } => HField::HeatKernel { b },
            TestFunction::HarmonicTimesRadial { p, q, sigma } => {
                HField::Separable { u: ZProfile::Harmonic { p, q, sigma }, v: unit_t() }
            }
            TestFunction::Bump { radius } => HField::Separable { u: ZProfile::Bump { radius }, v: unit_t() },
        }
    }

    /// The function as a z-radial input on H^n, when it is one.
    pub fn radial(&self, n: usize) -> Option<RadialH> {
        match *self {
            TestFunction::Gaussian { sigma_z, sigma_t } => Some(RadialH::gaussian(sigma_z, sigma_t, n)),
            TestFunction::HeatKernel { b } => Some(RadialH::HeatKernel { b, n }),
            TestFunction::HarmonicTimesRadial { p: 0, q: 0, sigma } => Some(RadialH::gaussian(sigma, 1.0, n)),
            TestFunction::HarmonicTimesRadial { .. } => None,
            TestFunction::Bump { radius } => Some(RadialH::Separable { u: ZProfile::Bump { radius }, v: unit_t(), n }),
        }
    }

    /// Radial factor `g` of `P g`.
    pub fn radial_factor(&self) -> HField {
        match *self {
            TestFunction::HarmonicTimesRadial { sigma, .. } => HField::gaussian(sigma, 1.0),
            _ => self.hfield(),
        }
    }

    /// Pointwise values exist for everything but the heat kernel.
    pub fn pointwise(&self) -> bool {
        !matches!(self, TestFunction::HeatKernel { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub half_width: f64,
    pub points: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams { half_width: 8.0, points: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeParams {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub lambda: f64,
}

impl Default for HeckeParams {
    fn default() -> Self {
        HeckeParams { p: 1, q: 0, k: 1, lambda: 1.0 }
    }
}

/// Parameters of the individual checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckParams {
    /// Evaluation point in C for pointwise scans.
    pub z: [f64; 2],
    pub rl_fraction: f64,
    pub rl_points: usize,
    pub continuity_tau: f64,
    pub continuity_k: Vec<usize>,
    pub hecke: HeckeParams,
    pub hardy_b: f64,
    pub hardy_fan: FanParams,
    pub ingham_theta: Theta,
    pub ingham_t_max: f64,
    pub weyl_lambda: f64,
    /// Randomly placed extra points for the inverse and projector checks.
    pub spot_checks: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            z: [0.5, -0.25],
            rl_fraction: 0.1,
            rl_points: 40,
            continuity_tau: 1.0,
            continuity_k: vec![4, 8, 16, 32],
            hecke: HeckeParams::default(),
            hardy_b: 0.5,
            hardy_fan: FanParams {
                eps0: 0.25,
                lambda_max: 2.0,
                nodes_per_sign: 7,
                k_max: 8,
                tau_nodes: vec![],
                ..FanParams::default()
            },
            ingham_theta: Theta::InvLog,
            ingham_t_max: 1e30,
            weyl_lambda: 1.0,
            spot_checks: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Transform,
    Invert,
    Plancherel,
    Project,
    RlScan,
    LimitContinuity,
    Gelfand,
    Heat,
    Hecke,
    WeylCheck,
    Hardy,
    Ingham,
    HyEndpoints,
    All,
}

impl Suite {
    pub fn name(&self) -> String {
        serde_json::to_value(self).expect("unit variant").as_str().expect("string").to_string()
    }

    pub fn each() -> [Suite; 13] {
        use Suite::*;
        [Transform, Invert, Plancherel, Project, RlScan, LimitContinuity, Gelfand, Heat, Hecke, WeylCheck, Hardy, Ingham, HyEndpoints]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub fan: FanParams,
    #[serde(default)]
    pub test_function: TestFunction,
    #[serde(default)]
    pub suite: Option<Suite>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub checks: CheckParams,
}

fn one() -> usize {
    1
}

fn default_truncation() -> usize {
    32
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.half_width, self.grid.points).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn fan_grid(&self) -> Result<FanGrid> {
        FanParams { n: self.n, ..self.fan.clone() }.build().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        self.grid_spec()?;
        self.fan_grid()?;
        self.test_function.validate()?;
        HermiteTruncation::new(self.truncation).map_err(|e| Error::Config(e.to_string()))?;
        let c = &self.checks;
        let positive = c.rl_fraction > 0.0 && c.rl_points >= 2 && c.continuity_tau > 0.0 && c.hardy_b > 0.0;
        if !positive || c.weyl_lambda == 0.0 || !(c.ingham_t_max >= 16.0) || c.continuity_k.is_empty() {
            return Err(Error::Config("check parameters out of range".into()));
        }
        HarmonicDegree::new(c.hecke.p, c.hecke.q).map_err(|e| Error::Config(e.to_string()))?;
        if c.hecke.lambda == 0.0 {
            return Err(Error::Config("hecke lambda must be nonzero".into()));
        }
        FanParams { n: 1, ..c.hardy_fan.clone() }.build().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Why `suite` cannot run on this configuration, if it cannot.
    pub fn unsupported(&self, suite: Suite) -> Option<String> {
        let grid_suite = !matches!(suite, Suite::HyEndpoints | Suite::Ingham | Suite::All);
        if grid_suite && self.n != 1 {
            return Some(format!("{} runs on the n = 1 grid", suite.name()));
        }
        let tf = &self.test_function;
        match suite {
            Suite::Invert if !tf.pointwise() => Some("invert needs pointwise values of the test function".into()),
            Suite::Gelfand | Suite::HyEndpoints if tf.radial(self.n).is_none() => {
                Some(format!("{} needs a test function radial in z", suite.name()))
            }
            _ => None,
        }
    }
}

/// Command line.
#[derive(Debug, Parser)]
#[command(name = "heisenfan", version, about = "Fourier analysis on the Heisenberg fan: transforms and verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: config, then $HEISENFAN_OUTPUT, then ./heisenfan-out).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write long-format CSV for plotting.
    #[arg(long, global = true)]
    pub emit_plots_data: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub half_width: Option<f64>,
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    #[arg(long, global = true)]
    pub lambda_max: Option<f64>,
    #[arg(long, global = true)]
    pub nodes_per_sign: Option<usize>,
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Transform,
    Invert,
    Plancherel,
    Project,
    RlScan,
    LimitContinuity,
    Gelfand,
    Heat,
    Hecke {
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    WeylCheck,
    Hardy {
        #[arg(long)]
        b: Option<f64>,
    },
    Ingham {
        #[arg(long, value_parser = ["inv-log", "inv-log-sq", "zero"])]
        theta: Option<String>,
    },
    HyEndpoints,
    All,
}

impl Cli {
    pub fn suite(&self) -> Suite {
        match self.command {
            Command::Transform => Suite::Transform,
            Command::Invert => Suite::Invert,
            Command::Plancherel => Suite::Plancherel,
            Command::Project => Suite::Project,
            Command::RlScan => Suite::RlScan,
            Command::LimitContinuity => Suite::LimitContinuity,
            Command::Gelfand => Suite::Gelfand,
            Command::Heat => Suite::Heat,
            Command::Hecke { .. } => Suite::Hecke,
            Command::WeylCheck => Suite::WeylCheck,
            Command::Hardy { .. } => Suite::Hardy,
            Command::Ingham { .. } => Suite::Ingham,
            Command::HyEndpoints => Suite::HyEndpoints,
            Command::All => Suite::All,
        }
    }

    /// Config file (or defaults) with every given flag applied on top.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::from_json(
                &std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            )?,
            None => ExperimentConfig::default(),
        };
        c.suite = Some(self.suite());
        if let Some(v) = &self.output {
            c.output_dir = Some(v.clone());
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.half_width {
            c.grid.half_width = v;
        }
        if let Some(v) = self.points {
            c.grid.points = v;
        }
        if let Some(v) = self.k_max {
            c.fan.k_max = v;
        }
        if let Some(v) = self.lambda_max {
            c.fan.lambda_max = v;
        }
        if let Some(v) = self.nodes_per_sign {
            c.fan.nodes_per_sign = v;
        }
        if let Some(v) = self.truncation {
            c.truncation = v;
        }
        match &self.command {
            Command::Hecke { p, q, k, lambda } => {
                let h = &mut c.checks.hecke;
                h.p = p.unwrap_or(h.p);
                h.q = q.unwrap_or(h.q);
                h.k = k.unwrap_or(h.k);
                h.lambda = lambda.unwrap_or(h.lambda);
            }
            Command::Hardy { b: Some(b) } => c.checks.hardy_b = *b,
            Command::Ingham { theta: Some(t) } => {
                c.checks.ingham_theta = match t.as_str() {
                    "inv-log" => Theta::InvLog,
                    "inv-log-sq" => Theta::InvLogSq,
                    _ => Theta::Zero,
                }
            }
            _ => {}
        }
        Ok(c)
    }
}

/// Output directory: explicit setting, then the environment, then `./heisenfan-out`.
pub fn output_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("heisenfan-out"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub library_version: String,
    pub config: ExperimentConfig,
    pub skipped: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub verdicts: Vec<Verdict>,
    pub skipped: Vec<String>,
    pub dir: PathBuf,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    grid: GridSpec,
    fan: FanGrid,
    dir: PathBuf,
    plots: bool,
    verdicts: Vec<Verdict>,
}

impl Ctx<'_> {
    fn emit(&mut self, v: Verdict) -> Result<()> {
        v.write_json(&self.dir.join(format!("verdict_{}.json", v.test)))?;
        self.verdicts.push(v);
        Ok(())
    }

    fn f(&self) -> HField {
        self.cfg.test_function.hfield()
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn z(&self) -> (f64, f64) {
        (self.cfg.checks.z[0], self.cfg.checks.z[1])
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<FileEntry>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_files(root, &p, out)?;
        } else if p != root.join("manifest.json") {
            let rel = p.strip_prefix(root).expect("inside root").to_string_lossy().replace('\\', "/");
            out.push(FileEntry { sha256: sha256_hex(&std::fs::read(&p)?), file: rel });
        }
    }
    Ok(())
}

/// Runs `suite` (or every suite for `All`) with at most `threads` workers and writes
/// `manifest.json` into the output directory.
pub fn run(config: &ExperimentConfig, threads: Option<usize>, emit_plots: bool) -> Result<RunReport> {
    config.validate()?;
    let suite = config.suite.unwrap_or(Suite::All);
    if let Some(why) = config.unsupported(suite) {
        return Err(Error::Config(why));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let dir = output_dir(config);
    std::fs::create_dir_all(&dir)?;
    let (verdicts, skipped) = pool.install(|| -> Result<(Vec<Verdict>, Vec<String>)> {
        let mut verdicts = vec![];
        let mut skipped = vec![];
        let suites: Vec<Suite> = if suite == Suite::All { Suite::each().to_vec() } else { vec![suite] };
        for s in suites {
            if let Some(why) = config.unsupported(s) {
                skipped.push(format!("{}: {why}", s.name()));
                continue;
            }
            let sub = if suite == Suite::All { dir.join(s.name()) } else { dir.clone() };
            std::fs::create_dir_all(&sub)?;
            let mut ctx = Ctx {
                cfg: config,
                grid: config.grid_spec()?,
                fan: config.fan_grid()?,
                dir: sub,
                plots: emit_plots,
                verdicts: vec![],
            };
            run_suite(s, &mut ctx)?;
            verdicts.extend(ctx.verdicts);
        }
        Ok((verdicts, skipped))
    })?;
    let mut files = vec![];
    collect_files(&dir, &dir, &mut files)?;
    let manifest = RunManifest {
        command: suite.name(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        skipped: skipped.clone(),
        verdicts: verdicts.clone(),
        files,
    };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(RunReport { verdicts, skipped, dir })
}

fn run_suite(suite: Suite, ctx: &mut Ctx) -> Result<()> {
    match suite {
        Suite::Transform => transform(ctx),
        Suite::Invert => invert(ctx),
        Suite::Plancherel => plancherel(ctx),
        Suite::Project => projector(ctx),
        Suite::RlScan => rl(ctx),
        Suite::LimitContinuity => continuity(ctx),
        Suite::Gelfand => gelfand(ctx),
        Suite::Heat => heat(ctx),
        Suite::Hecke => hecke(ctx),
        Suite::WeylCheck => weyl_check(ctx),
        Suite::Hardy => hardy(ctx),
        Suite::Ingham => ingham(ctx),
        Suite::HyEndpoints => hy(ctx),
        Suite::All => unreachable!("expanded by run"),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn transform(ctx: &mut Ctx) -> Result<()> {
    let c = forward(&ctx.f(), &ctx.fan, ctx.grid, Route::Auto)?;
    write_dir(&c, &ctx.dir.join("coefficients"))?;
    if ctx.plots {
        write_long_csv(&c, &ctx.dir.join("coefficients_long.csv"), 4.0)?;
    }
    let sup = linf_bound_check(&ctx.f(), &ctx.fan, ctx.grid)?;
    ctx.emit(sup.verdict())
}

/// 5 x 5 x 3 lattice plus seeded spot checks.
pub fn evaluation_points(spot: usize, seed_rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    let mut pts = vec![];
    for &x in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
        for &y in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
            for &t in &[-1.0, 0.0, 1.0] {
                pts.push((x, y, t));
            }
        }
    }
    for _ in 0..spot {
        pts.push((seed_rng.gen_range(-2.0..2.0), seed_rng.gen_range(-2.0..2.0), seed_rng.gen_range(-1.0..1.0)));
    }
    pts
}

fn invert(ctx: &mut Ctx) -> Result<()> {
    let f = ctx.f();
    let c = forward(&f, &ctx.fan, ctx.grid, Route::Auto)?;
    let pts = evaluation_points(ctx.cfg.checks.spot_checks, &mut ctx.rng(1));
    let got = inverse(&c, &pts)?;
    let sup = match &f {
        HField::Separable { u, v } => u.sample(ctx.grid).max_abs() * (0..=2000).map(|i| v.eval(-10.0 + 0.01 * i as f64).abs()).fold(0.0, f64::max),
        _ => return Err(Error::Config("invert needs pointwise values".into())),
    };
    let mut w = csv::Writer::from_path(ctx.dir.join("inverse.csv"))?;
    w.write_record(["x", "y", "t", "re", "im", "truth_re", "truth_im", "abs_err"])?;
    let mut worst: f64 = 0.0;
    for (&(x, y, t), v) in pts.iter().zip(&got) {
        let truth = f.eval(x, y, t)?;
        let e = (v - truth).norm();
        worst = worst.max(e);
        w.write_record([fmt(x), fmt(y), fmt(t), fmt(v.re), fmt(v.im), fmt(truth.re), fmt(truth.im), fmt(e)])?;
    }
    w.flush()?;
    ctx.emit(Verdict::at_most(
        "inversion",
        serde_json::json!({ "points": pts.len(), "sup_norm": sup, "max_abs_err": worst }),
        worst / sup,
        1e-2,
    ))
}

fn plancherel(ctx: &mut Ctx) -> Result<()> {
    let f = ctx.f();
    let c = forward(&f, &ctx.fan, ctx.grid, Route::Auto)?;
    let p = plancherel_pair(&f, &c);
    let mut w = csv::Writer::from_path(ctx.dir.join("plancherel.csv"))?;
    w.write_record(["lambda", "k", "weighted_norm_sq"])?;
    for (li, l) in ctx.fan.lambda_nodes.iter().enumerate() {
        for k in 0..=ctx.fan.k_max {
            w.write_record([fmt(*l), k.to_string(), fmt(ctx.fan.nu(li) * c.ray(li, k).norm_sq())])?;
        }
    }
    w.flush()?;
    let err = rel(p.rhs, p.lhs);
    ctx.emit(Verdict::at_most(
        "plancherel",
        serde_json::json!({ "lhs": p.lhs, "rhs": p.rhs, "rel_err": err, "tail": p.tail }),
        err,
        1e-2,
    ))
}

fn projector(ctx: &mut Ctx) -> Result<()> {
    let c = forward(&ctx.f(), &ctx.fan, ctx.grid, Route::Grid)?;
    let rows = projector_rows(&c)?;
    let mut w = csv::Writer::from_path(ctx.dir.join("projector.csv"))?;
    w.write_record(["k", "lambda", "residual", "resolved"])?;
    for r in &rows {
        w.write_record([r.k.to_string(), fmt(r.lambda), fmt(r.residual), r.resolved.to_string()])?;
    }
    w.flush()?;
    let resolved: Vec<&ProjectorRow> = rows.iter().filter(|r| r.resolved).collect();
    let worst = resolved.iter().map(|r| r.residual).fold(0.0, f64::max);
    let params = serde_json::json!({
        "slices": rows.len(),
        "resolved": resolved.len(),
        "worst_unresolved": rows.iter().filter(|r| !r.resolved).map(|r| r.residual).fold(0.0, f64::max),
    });
    ctx.emit(Verdict::new("projector", params, worst, 5e-3, !resolved.is_empty() && worst <= 5e-3))?;
    let mut rng = ctx.rng(2);
    let mut idem: f64 = 0.0;
    for _ in 0..ctx.cfg.checks.spot_checks.min(resolved.len()) {
        let r = resolved[rng.gen_range(0..resolved.len())];
        if let Slice::Grid(s) = &c.slices[r.index] {
            idem = idem.max(projector_residual_slice(&project(s, r.k, r.lambda)?, r.k, r.lambda)?);
        }
    }
    ctx.emit(Verdict::at_most("projector_idempotence", serde_json::json!({ "samples": ctx.cfg.checks.spot_checks }), idem, 1e-6))
}

fn rl(ctx: &mut Ctx) -> Result<()> {
    let f = ctx.f();
    let names = ["ray", "limit", "fixed_lambda"];
    for (name, path) in names.iter().zip(EscapePath::defaults()) {
        let pts = path.points(ctx.cfg.checks.rl_points, 1)?;
        let s = rl_scan(&f, ctx.z(), &pts, ctx.grid)?;
        s.write_csv(&ctx.dir.join(format!("rl_{name}.csv")))?;
        ctx.emit(s.verdict(&format!("rl_{name}"), ctx.cfg.checks.rl_fraction))?;
    }
    Ok(())
}

fn continuity(ctx: &mut Ctx) -> Result<()> {
    let ch = &ctx.cfg.checks;
    let seq = continuity_sequence(ch.continuity_tau, &ch.continuity_k, 1, 1.0)?;
    let c = limit_continuity_check(&ctx.f(), ch.continuity_tau, ctx.z(), &seq, ctx.grid)?;
    c.write_csv(&ctx.dir.join("continuity.csv"))?;
    ctx.emit(c.verdict())
}

fn radial_input(ctx: &Ctx) -> Result<RadialH> {
    ctx.cfg
        .test_function
        .radial(1)
        .ok_or_else(|| Error::Config("the test function is not radial in z".into()))
}

fn gelfand(ctx: &mut Ctx) -> Result<()> {
    let f = radial_input(ctx)?;
    let hf = f.to_hfield()?;
    let mut pts = ctx.fan.rays();
    pts.extend(ctx.fan.limits());
    let vals = gelfand_sweep(&f, &pts)?;
    write_gelfand_csv(&ctx.dir.join("gelfand.csv"), &pts, &vals)?;
    let probes = [FanPoint::ray(0, 1.0, 1)?, FanPoint::ray(2, -0.75, 1)?, FanPoint::ray(3, 1.5, 1)?];
    let mut fact: f64 = 0.0;
    let mut mult: f64 = 0.0;
    let mut homo: f64 = 0.0;
    let heat = RadialH::HeatKernel { b: 0.5, n: 1 };
    let heat_h = heat.to_hfield()?;
    for a in &probes {
        fact = fact.max(radial_factorization_residual(&hf, a, ctx.grid)?);
        mult = mult.max(multiplier_residual(&hf, &heat, a, ctx.grid)?.residual);
        let conv = gelfand_of_convolution(&hf, &heat_h, a, ctx.grid)?;
        let prod = gelfand_transform(&f, a)? * gelfand_transform(&heat, a)?;
        homo = homo.max(if prod.norm() > 0.0 { (conv - prod).norm() / prod.norm() } else { conv.norm() });
    }
    let params = serde_json::json!({ "probes": probes.iter().map(|a| a.coords()).collect::<Vec<_>>() });
    ctx.emit(Verdict::at_most("radial_factorization", params.clone(), fact, 1e-4))?;
    ctx.emit(Verdict::at_most("convolution_multiplier", params.clone(), mult, 1e-3))?;
    ctx.emit(Verdict::at_most("gelfand_homomorphism", params, homo, 1e-3))
}

fn heat(ctx: &mut Ctx) -> Result<()> {
    let b = match ctx.cfg.test_function {
        TestFunction::HeatKernel { b } => b,
        _ => ctx.cfg.checks.hardy_b,
    };
    let mut w = csv::Writer::from_path(ctx.dir.join("heat_profiles.csv"))?;
    w.write_record(["lambda", "r", "value"])?;
    let mut worst: f64 = 0.0;
    let mut warnings = 0;
    let reach = RadialH::HeatKernel { b, n: 1 }.reach();
    for &l in ctx.fan.lambda_nodes.iter().filter(|l| **l > 0.0) {
        let terms = crate::field::heat_terms(b, l);
        let hp = heat_kernel_profile(b, l, terms, 1, reach, 1e-12)?;
        warnings += hp.warning.is_some() as usize;
        for (r, v) in hp.profile.r_nodes.iter().zip(&hp.profile.values) {
            w.write_record([fmt(l), fmt(*r), fmt(v.re)])?;
        }
        worst = worst.max(rel(hp.profile.integrate().re, (b * l).cosh().recip()));
    }
    w.flush()?;
    ctx.emit(Verdict::at_most("heat_mass", serde_json::json!({ "b": b, "warnings": warnings }), worst, 1e-6))?;
    let (b1, b2) = (0.4 * b, 0.6 * b);
    let sum = RadialH::HeatKernel { b: b1 + b2, n: 1 };
    let mut semi: f64 = 0.0;
    for a in [FanPoint::ray(0, 1.0, 1)?, FanPoint::ray(2, -0.75, 1)?] {
        let conv = gelfand_of_convolution(&HField::HeatKernel { b: b1 }, &HField::HeatKernel { b: b2 }, &a, ctx.grid)?;
        let direct = gelfand_transform(&sum, &a)?;
        semi = semi.max((conv - direct).norm() / direct.norm());
    }
    ctx.emit(Verdict::at_most("heat_semigroup", serde_json::json!({ "b1": b1, "b2": b2 }), semi, 1e-3))
}

fn hecke(ctx: &mut Ctx) -> Result<()> {
    let h = ctx.cfg.checks.hecke;
    let degree = HarmonicDegree::new(h.p, h.q)?;
    let g = ctx.cfg.test_function.radial_factor();
    if !g.is_radial() {
        return Err(Error::Config("hecke needs a radial factor".into()));
    }
    let c = hecke_bochner_residual(&g, degree, h.k, h.lambda, ctx.grid)?;
    write_hecke_csv(
        &ctx.dir.join("hecke.csv"),
        &[HeckeRow { p: h.p, q: h.q, k: h.k, lambda: h.lambda, residual: c.residual }],
    )?;
    let params = serde_json::json!({ "p": h.p, "q": h.q, "k": h.k, "lambda": h.lambda, "lhs_norm": c.lhs_norm, "rhs_norm": c.rhs_norm });
    if c.rhs_norm == 0.0 {
        ctx.emit(Verdict::at_most("hecke_annihilation", params, c.lhs_norm / c.f_norm.max(f64::MIN_POSITIVE), 1e-3))
    } else {
        ctx.emit(Verdict::at_most("hecke", params, c.residual, 1e-2))
    }
}

fn weyl_check(ctx: &mut Ctx) -> Result<()> {
    let lambda = ctx.cfg.checks.weyl_lambda;
    let trunc = HermiteTruncation::new(ctx.cfg.truncation)?;
    let f = ctx.f();
    let fl = central_transform(&f, lambda, ctx.grid)?;
    let w = weyl_transform(&fl, lambda, trunc)?;
    w.write_csv(&ctx.dir.join("group_fourier.csv"))?;
    let norm2 = l2_norm_z(&fl).powi(2);
    let wplan = rel(w.hs_norm().powi(2) * lambda.abs(), 2.0 * std::f64::consts::PI * norm2);
    ctx.emit(Verdict::at_most("weyl_plancherel", serde_json::json!({ "lambda": lambda, "m": trunc.m(), "tail_mass": w.tail_mass() }), wplan, 1e-3))?;
    let top = 4.min(trunc.m() - 1);
    let mut proj: f64 = 0.0;
    for k in 0..=top {
        proj = proj.max(projection_identity_residual(&fl, lambda, k, trunc)?);
    }
    ctx.emit(Verdict::at_most("projection_identity", serde_json::json!({ "lambda": lambda, "k_max": top }), proj, 1e-3))?;
    let a = FanPoint::ray(1.min(trunc.m() - 1), lambda, 1)?;
    let s = hs_slice_relation(&f, &a, trunc, ctx.grid)?;
    ctx.emit(Verdict::at_most(
        "hs_slice",
        serde_json::json!({ "lhs": s.lhs, "rhs": s.rhs, "rhs_mirror": s.rhs_mirror, "k": 1, "lambda": lambda }),
        rel(s.rhs, s.lhs),
        1e-2,
    ))
}

fn hardy(ctx: &mut Ctx) -> Result<()> {
    let fan = FanParams { n: 1, ..ctx.cfg.checks.hardy_fan.clone() }.build()?;
    let (b, own) = match ctx.cfg.test_function {
        TestFunction::HeatKernel { b } => (b, true),
        _ => (ctx.cfg.checks.hardy_b, false),
    };
    let h = hardy_profile(&ctx.f(), b, &fan, ctx.grid)?;
    h.write_csv(&ctx.dir.join("hardy.csv"))?;
    if own {
        ctx.emit(h.verdict())
    } else {
        let v = h.verdict();
        ctx.emit(Verdict::new("hardy_bound", v.parameters, h.constant, f64::MAX, h.holds))
    }
}

fn ingham(ctx: &mut Ctx) -> Result<()> {
    let t_max = ctx.cfg.checks.ingham_t_max;
    let mut w = csv::Writer::from_path(ctx.dir.join("ingham_admissibility.csv"))?;
    w.write_record(["theta", "integral", "exponent", "trend"])?;
    let mut correct = 0;
    for (th, want) in [(Theta::InvLog, Trend::Diverging), (Theta::InvLogSq, Trend::Converging)] {
        let a = ingham_admissibility(&|t| th.eval(t), t_max)?;
        correct += (a.trend == want) as usize;
        w.write_record([format!("{th:?}"), fmt(a.integral), fmt(a.exponent), format!("{:?}", a.trend)])?;
    }
    let theta = ctx.cfg.checks.ingham_theta;
    let chosen = ingham_admissibility(&|t| theta.eval(t), t_max);
    if let Ok(a) = &chosen {
        w.write_record([format!("{theta:?} (configured)"), fmt(a.integral), fmt(a.exponent), format!("{:?}", a.trend)])?;
    }
    w.flush()?;
    ctx.emit(Verdict::new(
        "ingham_classifier",
        serde_json::json!({ "t_max": t_max }),
        correct as f64,
        2.0,
        correct == 2,
    ))?;
    if ctx.cfg.n == 1 {
        let fan = FanParams { n: 1, ..ctx.cfg.checks.hardy_fan.clone() }.build()?;
        let r = ingham_decay_check(&ctx.f(), &theta, &fan, ctx.grid)?;
        r.write_csv(&ctx.dir.join("ingham_decay.csv"))?;
        ctx.emit(r.verdict(&theta))?;
    }
    Ok(())
}

fn hy(ctx: &mut Ctx) -> Result<()> {
    let f = ctx
        .cfg
        .test_function
        .radial(ctx.cfg.n)
        .ok_or_else(|| Error::Config("hy-endpoints needs a radial test function".into()))?;
    let hy = hausdorff_young_endpoints(&f, &ctx.fan)?;
    for v in hy.verdicts() {
        ctx.emit(v)?;
    }
    Ok(())
}

/// Exit status of a finished run: 0 when every verdict passes, 1 otherwise.
pub fn exit_code(result: &Result<RunReport>) -> i32 {
    match result {
        Ok(r) if r.passed() => 0,
        Ok(_) => 1,
        Err(Error::Config(_)) | Err(Error::Domain(_)) => 2,
        Err(_) => 1,
    }
}
