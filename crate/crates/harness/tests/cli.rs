use std::process::Command;

fn rsgda(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rsgda"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn estimate_prints_folds_and_instances() {
    let (code, out, _) = rsgda(&[
        "estimate",
        "--dv",
        "100",
        "--dh",
        "20",
        "--set",
        "bias=false",
        "--r",
        "4",
        "--delta",
        "0.05",
        "--epsilon",
        "0.05",
        "--t",
        "1000",
        "--tau",
        "0.5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "meta=5 instances=50597");
}

#[test]
fn domain_errors_exit_nonzero_with_category() {
    let (code, _, err) = rsgda(&["train", "--zeta", "1.5", "--N", "10"]);
    assert_ne!(code, 0);
    assert!(err.starts_with("error: domain:"), "{err}");
    let (code, _, err) = rsgda(&[
        "dda", "--dv", "8", "--dh", "2", "--zeta", "0.1", "--tau", "0.5",
    ]);
    assert_ne!(code, 0);
    assert!(err.starts_with("error: infeasible:"), "{err}");
}

#[test]
fn usage_errors_are_reported() {
    let (code, _, err) = rsgda(&["train", "--no-such-flag"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: usage:"), "{err}");
    let (code, _, err) = rsgda(&["experiment", "grad_vs_Q"]);
    assert_ne!(code, 0);
    assert!(err.starts_with("error: config:"), "{err}");
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("rsgda-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "n=100\ndv=6\ndh=3\nN_values=50,100\nwindow=10\ndraws=100\nzeta=0.9\ntiming=false\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let (code, out, err) = rsgda(&[
        "experiment",
        "grad_vs_N",
        "--config",
        cfg.to_str().unwrap(),
        "--zeta",
        "0.2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("2 rows"), "{out}");
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("\nzeta=0.2\n"));
    assert!(manifest.contains("\nn=100\n"));
    let csv = std::fs::read_to_string(out_dir.join("grad_vs_N.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn train_and_check_run() {
    let (code, out, err) = rsgda(&[
        "train", "--dv", "6", "--dh", "3", "--N", "200", "--set", "n=100", "--set", "folds=2",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("selected fold"));
    let (code, out, _) = rsgda(&["check"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}
