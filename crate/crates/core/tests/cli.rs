use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gauss-squeeze"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn fig2_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig2.toml")
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(text.lines().count(), 1, "stderr: {text}");
    text
}

#[test]
fn steady_from_config_emits_report() {
    let cfg = fig2_config();
    let out = run(&[
        "steady",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "theta=0",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in [
        "s_q_db",
        "s_p_db",
        "lambda_min",
        "s_total_paper_db",
        "s_total_norm_db",
        "xi",
        "g_eff",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert!((json["s_q_db"].as_f64().unwrap() - 10.44).abs() < 0.05);
}

#[test]
fn unstable_point_exits_2() {
    let out = run(&["steady", "--set", "g_plus=0.02", "--set", "g_minus=0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error: unstable: "));
}

#[test]
fn config_errors_exit_3() {
    let out = run(&["steady", "--set", "kapa=0.1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).starts_with("error: unknown-key: "));

    let out = run(&["steady", "--set", "kappa=-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).starts_with("error: invalid-parameter: "));

    let out = run(&["steady", "--config", "/nonexistent/point.toml"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["preset", "fig9"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).starts_with("error: config: "));

    let out = run(&["nonsense"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn numerical_failure_exits_4() {
    let out = run(&[
        "evolve",
        "--set",
        "g_plus=0.05",
        "--set",
        "g_minus=0.01",
        "--t-end",
        "1e5",
        "--dt",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr_line(&out).starts_with("error: divergence: "));
}

#[test]
fn preset_piped_into_sweep_matches_builtin() {
    let args = ["--r-set", "1"];
    let scenario = run(&["preset", "fig6", args[0], args[1]]);
    assert_eq!(scenario.status.code(), Some(0));
    let piped = run_with_stdin(&["sweep", "--jobs", "3"], &scenario.stdout);
    let builtin = run(&["sweep", "--preset", "fig6", "--jobs", "2"]);
    assert_eq!(
        piped.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&piped.stderr)
    );
    assert_eq!(builtin.status.code(), Some(0));
    assert_eq!(piped.stdout, builtin.stdout);
    let text = String::from_utf8(builtin.stdout).unwrap();
    assert!(text.starts_with("kappa,n_th,S_total_paper,status\n"));
    assert_eq!(text.lines().count(), 1 + 100 * 101);
}

#[test]
fn sweep_overrides_and_json() {
    let scenario = run(&["preset", "fig2", "--r-set", "0,1"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.toml");
    std::fs::write(&path, &scenario.stdout).unwrap();
    let out = run(&[
        "sweep",
        "--config",
        path.to_str().unwrap(),
        "--set",
        "axes=[{name=\"theta\", values=[0.0, 3.141592653589793]}]",
        "--set",
        "base.r=1",
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[1]["S_Q"].as_f64().unwrap() + 6.92).abs() < 0.05);
    assert_eq!(rows[0]["status"], "ok");
}

#[test]
fn stability_json_fields() {
    let out = run(&["stability", "--set", "g_plus=0.002"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&str> = json
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        keys,
        [
            "rh1",
            "rh2",
            "rh3",
            "spectral_abscissa",
            "stable_rh",
            "stable_eig"
        ]
    );
    assert_eq!(json["stable_rh"], true);
}

#[test]
fn theta_pi_flag_scales_by_pi() {
    let by_flag = run(&["steady", "--set", "r=1", "--theta-pi", "1"]);
    let by_value = run(&["steady", "--set", "r=1", "--set", "theta=3.141592653589793"]);
    assert_eq!(by_flag.status.code(), Some(0));
    assert_eq!(by_flag.stdout, by_value.stdout);
}

#[test]
fn wigner_and_spectrum_csv() {
    let out = run(&["wigner", "--set", "r=1", "--points", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("q,p,W\n"));
    assert_eq!(text.lines().count(), 1 + 121);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let out = run(&[
        "spectrum",
        "--set",
        "g_minus=0",
        "--set",
        "g_plus=0",
        "--phi",
        "0.7",
        "--points",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["omega", "S", "phi"]);
    for rec in reader.records() {
        let s: f64 = rec.unwrap()[1].parse().unwrap();
        assert!((s - 0.5).abs() < 1e-12);
    }

    let printed = run(&[
        "spectrum",
        "--set",
        "g_minus=0",
        "--set",
        "g_plus=0",
        "--as-printed",
        "--points",
        "3",
    ]);
    assert_eq!(printed.status.code(), Some(0));
    assert_ne!(
        printed.stdout,
        run(&[
            "spectrum",
            "--set",
            "g_minus=0",
            "--set",
            "g_plus=0",
            "--points",
            "3"
        ])
        .stdout
    );
}

#[test]
fn evolve_csv_has_covariance_columns() {
    let out = run(&[
        "evolve",
        "--set",
        "kappa=0.5",
        "--set",
        "g_minus=0.1",
        "--t-end",
        "10",
        "--dt",
        "0.1",
        "--stride",
        "10",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,V11,V12,V13,V14,V22,V23,V24,V33,V34,V44\n"));
    assert_eq!(text.lines().count(), 1 + 11);
}

#[test]
fn full_mode_steady_state() {
    let out = run(&[
        "steady",
        "--set",
        "kappa=0.5",
        "--set",
        "g_minus=0.1",
        "--set",
        "g_plus=0.03",
        "--mode",
        "full",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
