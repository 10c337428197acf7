use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nsga-approx"))
}

#[test]
fn table1_on_a_small_grid_writes_results_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.conf");
    fs::write(
        &config,
        "# small grid\nn = 30\npop_sizes = 8,12\nruns = 2\nwindows = 1..5, 20..25\nworkers = 2\n",
    )
    .unwrap();
    let mut tables = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = bin()
            .args(["table1", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        assert!(out.join("runs.json").exists());
        assert!(out.join("blocks_steady-state_8.csv").exists());
        assert!(out.join("trace_current-cd_12_1.csv").exists());
        tables.push(fs::read_to_string(out.join("table1.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    // header plus 3 variants x 2 sizes x 2 windows
    assert_eq!(tables[0].lines().count(), 13);
}

#[test]
fn configuration_errors_exit_with_status_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "n = 30\npop_sizes = 8\nfrobnicate = 3\n").unwrap();
    let out = bin()
        .args(["table1", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = bin()
        .args(["run", "--n", "30", "--pop-size", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn metrics_prints_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("front.txt");
    fs::write(&file, "n=6\n0\n3\n6\n").unwrap();
    let out = bin()
        .arg("metrics")
        .arg(&file)
        .args(["--r1", "-1", "--r2", "-1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["mei"], 3);
    assert_eq!(report["extremes"], true);
}

#[test]
fn scenario_writes_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "scenario",
            "--kind",
            "adversarial",
            "--n",
            "30",
            "--trials",
            "5",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("scenario_adversarial_classic.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",12")));
}
