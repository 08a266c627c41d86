use heisenfan::cli::{ExperimentConfig, RunManifest, Suite};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_heisenfan"));
    c.env_remove("HEISENFAN_OUTPUT");
    c
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn plancherel_run_writes_verdict_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().args(["plancherel", "--output"]).arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS plancherel"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("verdict_plancherel.json")).unwrap()).unwrap();
    assert_eq!(v["test"], "plancherel");
    assert_eq!(v["pass"], true);
    assert!(v["statistic"].as_f64().unwrap() <= 1e-2);
    let m = manifest(tmp.path());
    assert_eq!(m.command, "plancherel");
    assert_eq!(m.library_version, env!("CARGO_PKG_VERSION"));
    assert_eq!(m.config.suite, Some(Suite::Plancherel));
    assert!(m.files.iter().any(|f| f.file == "plancherel.csv"));
    for f in &m.files {
        let digest: String = Sha256::digest(std::fs::read(tmp.path().join(&f.file)).unwrap()).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(digest, f.sha256, "{}", f.file);
    }
    let csv = std::fs::read_to_string(tmp.path().join("plancherel.csv")).unwrap();
    assert!(csv.starts_with("lambda,k,weighted_norm_sq\n"));
}

#[test]
fn failed_verdict_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    // one lambda node per sign and k = 0 only: most of the Plancherel mass is missing
    let out = bin()
        .args(["plancherel", "--k-max", "0", "--nodes-per-sign", "1", "--lambda-max", "0.5", "--output"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL plancherel"));
    assert!(!manifest(tmp.path()).verdicts[0].pass);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(bin().arg("no-such-suite").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["plancherel", "--points", "many"]).output().unwrap().status.code(), Some(2));

    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 1, "gird": {"half_width": 8, "points": 64}}"#).unwrap();
    let out = bin().args(["plancherel", "--config"]).arg(&bad).arg("--output").arg(tmp.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gird"));

    let odd = tmp.path().join("odd.json");
    std::fs::write(&odd, r#"{"grid": {"half_width": 8, "points": 63}}"#).unwrap();
    let out = bin().args(["plancherel", "--config"]).arg(&odd).arg("--output").arg(tmp.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // grid suites are n = 1 only
    let out = bin().args(["plancherel", "--n", "2", "--output"]).arg(tmp.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(bin().args(["hecke", "--p", "1", "--q", "1"]).arg("--output").arg(tmp.path().join("o")).output().unwrap().status.code(), Some(2));
}

#[test]
fn output_directory_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("from-env");
    let out = bin().arg("ingham").env("HEISENFAN_OUTPUT", &env_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.join("manifest.json").exists());

    let cfg_dir = tmp.path().join("from-config");
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, serde_json::json!({ "output_dir": cfg_dir }).to_string()).unwrap();
    let out = bin().args(["ingham", "--config"]).arg(&cfg).env("HEISENFAN_OUTPUT", &env_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(cfg_dir.join("manifest.json").exists());

    let flag_dir = tmp.path().join("from-flag");
    let out = bin().args(["ingham", "--config"]).arg(&cfg).arg("--output").arg(&flag_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.join("manifest.json").exists());
}

#[test]
fn hecke_flags_reach_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().args(["hecke", "--p", "0", "--q", "1", "--k", "2", "--lambda", "-0.5", "--output"]).arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let h = manifest(tmp.path()).config.checks.hecke;
    assert_eq!((h.p, h.q, h.k, h.lambda), (0, 1, 2, -0.5));
    let csv = std::fs::read_to_string(tmp.path().join("hecke.csv")).unwrap();
    assert!(csv.starts_with("p,q,k,lambda,residual\n"));
}

#[test]
fn all_on_higher_dimension_skips_grid_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { n: 2, suite: Some(Suite::All), output_dir: Some(tmp.path().to_path_buf()), ..ExperimentConfig::default() };
    let report = heisenfan::cli::run(&cfg, Some(1), false).unwrap();
    assert_eq!(report.skipped.len(), 11, "{:?}", report.skipped);
    assert!(report.passed(), "{:?}", report.verdicts);
    assert!(tmp.path().join("hy-endpoints/verdict_hy_endpoint_p2.json").exists());
    assert!(tmp.path().join("ingham/ingham_admissibility.csv").exists());
}

#[test]
fn config_defaults_and_round_trip() {
    let c = ExperimentConfig::default();
    assert_eq!((c.n, c.grid.half_width, c.grid.points, c.truncation), (1, 8.0, 64, 32));
    assert_eq!((c.fan.k_max, c.fan.nodes_per_sign), (32, 16));
    let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
    let tf = ExperimentConfig::from_json(r#"{"test_function": {"kind": "heat_kernel", "b": 0.5}}"#).unwrap();
    assert_eq!(tf.test_function, heisenfan::cli::TestFunction::HeatKernel { b: 0.5 });
    assert!(tf.unsupported(Suite::Invert).is_some());
}

#[test]
fn documented_example_config_parses() {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/config.md")).unwrap();
    let start = doc.find("```json").expect("example block") + "```json".len();
    let end = start + doc[start..].find("```").unwrap();
    let c = ExperimentConfig::from_json(&doc[start..end]).unwrap();
    c.validate().unwrap();
}
