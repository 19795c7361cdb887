use std::fs;
use std::process::Command;

fn wasep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wasep"))
}

#[test]
fn invariance_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = wasep()
        .args(["--exp", "invariance", "--seed", "7", "--set", "n=4", "--set", "rho=0.5"])
        .args(["--set", "E=1", "--set", "gamma=0.5", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let table = fs::read_to_string(out.join("table.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "sweep,estimate,stderr,replicas");
    assert_eq!(lines.len(), 2);
    let verdict = fs::read_to_string(out.join("verdict.txt")).unwrap();
    assert!(verdict.starts_with("PASS\n"));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "invariance");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["params"]["n"], "4");
    assert_eq!(manifest["params"]["tol"], "1e-12");
}

#[test]
fn forced_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small martingale run\nexp=martingale seed=3\nn=32 replicas=6 times=0.1\ntol=0.5\n").unwrap();
    let status = wasep()
        .arg("--config")
        .arg(&cfg)
        .args(["--set", "tol=0", "--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let verdict = fs::read_to_string(dir.path().join("out/verdict.txt")).unwrap();
    assert!(verdict.starts_with("FAIL\n"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let cases: [&[&str]; 5] = [
        &["--exp", "martingale", "--set", "gamma=0.5", "--set", "rho=0.3", "--set", "E=1", "--seed", "1"],
        &["--exp", "theta"],
        &["--exp", "theta", "--seed", "1", "--set", "colour=red"],
        &["--exp", "nothing", "--seed", "1"],
        &["--exp", "theta", "--seed", "1", "--replicas", "4"],
    ];
    for args in cases {
        let o = wasep().args(args).arg("--out").arg(&out).output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = wasep()
        .args(["--exp", "martingale", "--set", "rho=0.3", "--seed", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&o.stderr).contains("transport-term rule"));
    let o = wasep().args(["--exp", "theta", "--out"]).arg(&out).output().unwrap();
    assert!(String::from_utf8_lossy(&o.stderr).contains("no seed"));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = wasep()
        .args(["--exp", "invariance", "--seed", "1", "--set", "n=3", "--out"])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn identical_runs_give_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = wasep()
            .args(["--exp", "martingale", "--seed", "5", "--set", "n=24", "--replicas", "6"])
            .args(["--set", "times=0.05,0.1", "--threads", threads, "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.code().is_some());
        fs::read(out.join("table.csv")).unwrap()
    };
    assert_eq!(run("a", "1"), run("b", "2"));
}

#[test]
fn list_prints_catalog() {
    let o = wasep().arg("--list").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for id in ["invariance", "martingale", "sbe_match", "heat_kernel"] {
        assert!(text.contains(id));
    }
}
