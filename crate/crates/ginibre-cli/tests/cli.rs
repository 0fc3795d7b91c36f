//! End-to-end tests of the `ginibre` binary: CSV/JSON schema, determinism,
//! exit codes, config overlay, checkpoints, and the verify gate.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ginibre"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn csv_cells(line: &str) -> Vec<String> {
    line.split(',').map(str::to_string).collect()
}

#[test]
fn mean_origin_table_is_r_squared() {
    let out = run(&["mean", "--ensemble", "ginue", "--scale", "origin", "--grid", "0:2:5"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "quantity,ensemble,scale,x,analytic,mc_value,mc_se");
    let mut count = 0;
    for line in lines {
        let cells = csv_cells(line);
        let x: f64 = cells[3].parse().unwrap();
        let analytic: f64 = cells[4].parse().unwrap();
        assert_eq!(analytic, x * x, "row {line}");
        count += 1;
    }
    assert_eq!(count, 5);
}

#[test]
fn variance_origin_ginoe_has_four_columns() {
    let out = run(&["variance", "--ensemble", "ginoe", "--scale", "origin", "--grid", "0:3:7"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "quantity,ensemble,scale,x,analytic,mc_value,mc_se,cov_rc,var_complex,var_real"
    );
    // total = real + 2 cov + complex on every row
    for line in text.lines().skip(1) {
        let cells = csv_cells(line);
        let total: f64 = cells[4].parse().unwrap();
        let cov: f64 = cells[7].parse().unwrap();
        let vc: f64 = cells[8].parse().unwrap();
        let vr: f64 = cells[9].parse().unwrap();
        assert!((total - (vr + 2.0 * cov + vc)).abs() < 1e-12);
    }
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn cumulants_fig7c_series() {
    let out = run(&[
        "cumulants",
        "--potential",
        "truncated_unitary(0.2)",
        "--n",
        "50",
        "--p",
        "3",
        "--grid",
        "0:1.2:25",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_str(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 25);
    // kappa_3 starts at 0, rises, and collapses again as the disc swallows
    // the droplet
    let val = |row: &str| csv_cells(row)[4].parse::<f64>().unwrap();
    assert_eq!(val(rows[0]), 0.0);
    let peak = rows.iter().map(|r| val(r)).fold(f64::MIN, f64::max);
    assert!(peak > 0.1, "peak={peak}");
}

#[test]
fn json_output_mirrors_rows() {
    let out = run(&[
        "mean", "--ensemble", "ginse", "--scale", "origin", "--grid", "0:1:3", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    for row in arr {
        for key in ["quantity", "ensemble", "scale", "x", "analytic", "mc_value", "mc_se"] {
            assert!(row.get(key).is_some());
        }
    }
    assert!((arr[2]["analytic"].as_f64().unwrap() - (1.0f64 - 0.25 + 0.25 * (-4.0f64).exp())).abs() < 1e-12);
}

#[test]
fn simulate_is_deterministic_bytes() {
    let args = [
        "simulate", "--ensemble", "ginoe", "--n", "12", "--samples", "200", "--seed", "7",
        "--radii", "0.25,0.5,0.75",
    ];
    let a = run(&args);
    assert!(a.status.success(), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout, "same seed must reproduce identical bytes");
    // different thread count, same bytes (merge contract)
    let c = bin().args(args).env("GINIBRE_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, c.stdout, "thread count must not change results");
    // different seed, different bytes
    let d = run(&[
        "simulate", "--ensemble", "ginoe", "--n", "12", "--samples", "200", "--seed", "8",
        "--radii", "0.25,0.5,0.75",
    ]);
    assert_ne!(a.stdout, d.stdout);
}

#[test]
fn simulate_fast_mean_matches_formula() {
    let out = run(&[
        "simulate", "--ensemble", "ginse", "--fast", "--n", "50", "--samples", "1000000",
        "--seed", "2", "--radii", "0.6",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let header = csv_cells(text.lines().next().unwrap());
    let mean_row = text.lines().find(|l| l.starts_with("mean,")).unwrap();
    let cells = csv_cells(mean_row);
    let idx = |name: &str| header.iter().position(|h| h == name).unwrap();
    let analytic: f64 = cells[idx("analytic")].parse().unwrap();
    let mc: f64 = cells[idx("mc_value")].parse().unwrap();
    let se: f64 = cells[idx("mc_se")].parse().unwrap();
    assert!((mc - analytic).abs() <= 4.0 * se, "mc={mc} analytic={analytic} se={se}");
}

#[test]
fn simulate_ginue_deficit() {
    // N - mean(a=1) approximates the outside deficit
    let out = run(&[
        "simulate", "--ensemble", "ginue", "--n", "30", "--samples", "2000", "--seed", "3",
        "--radii", "1.0",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let header = csv_cells(text.lines().next().unwrap());
    let idx = |name: &str| header.iter().position(|h| h == name).unwrap();
    let mean_row = text.lines().find(|l| l.starts_with("mean,")).unwrap();
    let cells = csv_cells(mean_row);
    let mc: f64 = cells[idx("mc_value")].parse().unwrap();
    let se: f64 = cells[idx("mc_se")].parse().unwrap();
    let analytic: f64 = cells[idx("analytic")].parse().unwrap();
    assert!((mc - analytic).abs() <= 4.0 * se);
    let deficit_mc = 30.0 - mc;
    let deficit_exact = 30.0 - analytic;
    assert!((deficit_mc - deficit_exact).abs() <= 4.0 * se);
}

#[test]
fn checkpoint_blob_roundtrips() {
    let dir = std::env::temp_dir().join(format!("ginibre-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("acc.bin");
    let out = run(&[
        "simulate", "--ensemble", "ginse", "--fast", "--n", "10", "--samples", "500",
        "--seed", "5", "--radii", "0.4,0.9", "--checkpoint", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let bytes = std::fs::read(&path).unwrap();
    let acc = ginibre::stats::MomentAccumulator::from_bytes(&bytes).unwrap();
    assert_eq!(acc.len_samples(), 500);
    assert_eq!(acc.radii(), &[0.4, 0.9]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes() {
    // flag errors: 2
    let out = run(&["mean", "--ensemble", "nonsense", "--scale", "origin", "--grid", "0:1:2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["mean", "--ensemble", "ginue", "--scale", "origin"]);
    assert_eq!(out.status.code(), Some(2), "missing --grid");
    let out = run(&["simulate", "--ensemble", "ginoe", "--fast", "--n", "5", "--samples", "10", "--radii", "0.5"]);
    assert_eq!(out.status.code(), Some(2), "fast path forbidden for GinOE");
    // unknown subcommand / bad flag: clap exits 2
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_fault_injection_fails() {
    let out = run(&["verify"]);
    assert!(out.status.success(), "verify failed: {}", stdout_str(&out));
    let text = stdout_str(&out);
    let named = text.lines().filter(|l| l.contains("PASS")).count();
    assert!(named >= 12, "only {named} identities reported");

    let out = run(&["verify", "--inject-i1", "1e-6"]);
    assert_eq!(out.status.code(), Some(5));
    let text = stdout_str(&out);
    let ginue_line = text
        .lines()
        .find(|l| l.starts_with("ginue_var_series_vs_closed"))
        .unwrap();
    assert!(ginue_line.contains("FAIL"));
}

#[test]
fn config_file_defaults_and_flag_priority() {
    let dir = std::env::temp_dir().join(format!("ginibre-cli-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(
        &cfg,
        "ensemble=ginue\nscale=origin\ngrid=0:2:5\n# comment line\n",
    )
    .unwrap();
    let from_config = run(&["mean", "--config", cfg.to_str().unwrap()]);
    assert!(from_config.status.success());
    let baseline = run(&["mean", "--ensemble", "ginue", "--scale", "origin", "--grid", "0:2:5"]);
    assert_eq!(from_config.stdout, baseline.stdout);
    // flags win over config
    let overridden = run(&[
        "mean", "--config", cfg.to_str().unwrap(), "--ensemble", "ginse",
    ]);
    assert!(stdout_str(&overridden).contains("ginse"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn custom_potential_from_config() {
    let dir = std::env::temp_dir().join(format!("ginibre-cli-custom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("pot.conf");
    std::fs::write(&cfg, "custom_g=2*r^2\ncustom_g1=4*r\ncustom_g2=4\n").unwrap();
    let custom = run(&[
        "cumulants", "--config", cfg.to_str().unwrap(), "--potential", "custom",
        "--n", "10", "--p", "2", "--grid", "0.2:0.8:3",
    ]);
    assert!(custom.status.success(), "stderr: {}", String::from_utf8_lossy(&custom.stderr));
    let gaussian = run(&[
        "cumulants", "--potential", "ginse_gaussian", "--n", "10", "--p", "2", "--grid", "0.2:0.8:3",
    ]);
    // identical cumulant values (ignore the potential-label meta column)
    let vals = |s: &str| -> Vec<f64> {
        s.lines()
            .skip(1)
            .map(|l| csv_cells(l)[4].parse().unwrap())
            .collect()
    };
    assert_eq!(vals(&stdout_str(&custom)), vals(&stdout_str(&gaussian)));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_file_and_presets() {
    let dir = std::env::temp_dir().join(format!("ginibre-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let out = run(&["mean", "--preset", "fig2b", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    // 3 ensembles x 4 sizes
    assert_eq!(text.lines().count(), 13);
    assert!(text.contains("deficit,ginse"));
    let out = run(&["variance", "--preset", "fig5"]);
    assert!(out.status.success());
    assert_eq!(stdout_str(&out).lines().count(), 1 + 3 * 51);
    std::fs::remove_dir_all(&dir).ok();
}
