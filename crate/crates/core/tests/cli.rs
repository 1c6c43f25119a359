use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use raftguard::experiment::ExperimentError;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_raftguard"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn shipped_configs_validate() {
    let mut n = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let out = run(&["--config", path.to_str().unwrap(), "--validate-only"]);
            assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
            n += 1;
        }
    }
    assert!(n >= 10);
}

#[test]
fn inverted_annulus_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{
  "scenario": "coverage_vs_beta",
  "params": {
    "z1": 300,
    "z2": 100
  },
  "sweep": { "variable": "beta_db", "start": -30, "stop": 0, "step": 2 },
  "output_path": "x.csv"
}
"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "--validate-only"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:4:") && err.contains("annulus"), "{err}");
}

#[test]
fn alpha_two_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        r#"{"scenario": "coverage_vs_beta", "params": {"alpha": 2},
"sweep": {"variable": "beta_db", "start": -30, "stop": 0, "step": 2}, "output_path": "x.csv"}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha must be > 2"));
}

#[test]
fn bad_flag_values_are_usage_errors() {
    let cfg = configs_dir().join("baseline.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "--format", "xml"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--config", cfg.to_str().unwrap(), "--scenario", "roc", "--validate-only"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_map_to_exit_three() {
    assert_eq!(ExperimentError::Numeric("x".into()).exit_code(), 3);
    assert_eq!(ExperimentError::Config(vec![]).exit_code(), 2);
}

#[test]
fn coverage_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.csv");
    let cfg = configs_dir().join("baseline.json");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "2000",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("16 rows"));

    let mut rdr = csv::Reader::from_path(&out_path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "sweep_var",
            "sweep_value",
            "p_dl_analytic",
            "p_ul_analytic",
            "p_joint_analytic",
            "p_dl_mc",
            "p_ul_mc",
            "p_joint_mc",
            "ci_halfwidth",
            "abs_gap"
        ]
    );
    let joint: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[4].parse().unwrap())
        .collect();
    assert_eq!(joint.len(), 16);
    assert!(joint.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn no_jammers_gives_unit_analytic_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("o.json");
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(
            r#"{{"scenario": "coverage_vs_jam_distance", "params": {{"rho_j": 0}},
"sweep": {{"variable": "z1", "start": 0, "stop": 300, "step": 100}}, "n_trials": 500,
"output_path": "{}", "output_format": "json"}}"#,
            out_path.display()
        ),
    );
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&fs::read(&out_path).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        for key in ["p_dl_analytic", "p_ul_analytic", "p_joint_analytic"] {
            assert!((r[key].as_f64().unwrap() - 1.0).abs() < 1e-8);
        }
        assert_eq!(r["p_joint_mc"].as_f64().unwrap(), 1.0);
    }
}

#[test]
fn auth_and_roc_headers() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, header) in [
        ("auth_errors_pfa_0.1.json", "lq_db,epsilon,p_fa_cf,p_fa_mc,p_md_cf,p_md_mc,p_mc_cf,p_mc_mc"),
        ("roc_lq10.json", "p_fa,epsilon,p_d_cf,p_d_mc"),
    ] {
        let out_path = dir.path().join(cfg).with_extension("csv");
        let out = run(&[
            "--config",
            configs_dir().join(cfg).to_str().unwrap(),
            "--trials",
            "1000",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = fs::read_to_string(&out_path).unwrap();
        assert_eq!(text.lines().next().unwrap(), header);
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("coverage_vs_jam_distance_beta_m20db.json");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let out_path = dir.path().join(format!("r{i}.csv"));
        let out = bin()
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "--config",
                cfg.to_str().unwrap(),
                "--trials",
                "3000",
                "--seed",
                "7",
                "--out",
                out_path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(fs::read(&out_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}
