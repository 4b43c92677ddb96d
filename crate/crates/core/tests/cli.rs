use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lipfourier"));
    for var in ["LIPFOURIER_GRID_J", "LIPFOURIER_TOL", "LIPFOURIER_T_MAX", "LIPFOURIER_OUT"] {
        cmd.env_remove(var);
    }
    cmd
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("cfg.json");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn matched_recipe_exits_zero_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let (code, _, _) = run(bin().args(["equivalence", "--recipe", "titchmarsh-n1", "--out"]).arg(&out));
    assert_eq!(code, 0);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(
        lines.next().unwrap(),
        "verdict,forward_ratio_sup,forward_stable,backward_ratio_sup,backward_stable,L_slope,T_slope"
    );
    assert!(lines.next().unwrap().starts_with("EquivalentWithinConstants,"));
}

#[test]
fn mismatched_modulus_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema":1,"recipe":"titchmarsh-n1","modulus":{"family":"power","gamma":1.5,"k":2}}"#,
    );
    let (code, _, _) = run(bin().arg("equivalence").arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o")));
    assert_eq!(code, 1);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/equivalence.json")).unwrap()).unwrap();
    // t^{1/2} smoothness against ω = t^{3/2}: neither ratio stays bounded
    assert_eq!(report["verdict"], "Inconclusive");
    assert_eq!(report["direction_forward"]["stable"], false);
    assert_eq!(report["direction_backward"]["stable"], false);
}

#[test]
fn missing_gamma_is_one_line_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"schema":1,"recipe":"titchmarsh-n1","modulus":{"family":"power","k":2}}"#);
    let (code, stdout, stderr) = run(bin().arg("equivalence").arg("--config").arg(&cfg));
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.starts_with("E_CONFIG:"), "{stderr}");
    assert!(stderr.contains("modulus.gamma"), "{stderr}");
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, stderr) = run(bin().arg("bogus"));
    assert_eq!(code, 2);
    assert!(stderr.starts_with("E_USAGE:"));
    let (code, _, stderr) = run(bin().args(["equivalence", "--recipe", "no-such-recipe"]));
    assert_eq!(code, 2);
    assert_eq!(stderr.lines().count(), 1);
}

#[test]
fn out_of_range_grid_names_the_field() {
    let (code, _, stderr) = run(bin().args(["equivalence", "--recipe", "titchmarsh-n1", "--grid-J", "3"]));
    assert_eq!(code, 2);
    assert!(stderr.contains("grid.J"), "{stderr}");
}

#[test]
fn environment_sits_between_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let grid_j = |sub: &str| -> u64 {
        let text = fs::read_to_string(dir.path().join(sub).join("equivalence.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["grid_j"].as_u64().unwrap()
    };
    let (code, _, _) = run(bin()
        .args(["equivalence", "--recipe", "titchmarsh-n1"])
        .env("LIPFOURIER_GRID_J", "9")
        .env("LIPFOURIER_OUT", dir.path().join("env")));
    assert_eq!(code, 0);
    assert_eq!(grid_j("env"), 9);
    let (code, _, _) = run(bin()
        .args(["equivalence", "--recipe", "titchmarsh-n1", "--grid-J", "10", "--out"])
        .arg(dir.path().join("flag"))
        .env("LIPFOURIER_GRID_J", "9"));
    assert_eq!(code, 0);
    assert_eq!(grid_j("flag"), 10);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let (code, _, _) = run(bin().args(["functionals", "--recipe", "titchmarsh-n1", "--out"]).arg(dir.path().join(sub)));
        assert_eq!(code, 0);
    }
    for file in ["lipschitz.csv", "tail.csv", "weighted_tail.csv", "diagnostics.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
}

#[test]
fn help_lists_csv_columns() {
    let (code, stdout, _) = run(bin().arg("--help"));
    assert_eq!(code, 0);
    for needle in [
        "j,t,value,est_error,kind",
        "t,omega,z0_ratio,zk_ratio",
        "lambda,value,est_error",
        "LIPFOURIER_GRID_J",
    ] {
        assert!(stdout.contains(needle), "help lacks {needle}");
    }
}
