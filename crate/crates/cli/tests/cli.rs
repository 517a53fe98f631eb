use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn edgesched(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgesched"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"
corpus_size = 3
jobs = 2
label_budget = 300

[scenario]
request_count = 6
bandwidth_mhz = 12
capacity_mhz = 500.0
seed = 11

[train]
epochs = 2
hidden = 8
batch_size = 2

[[settings]]
name = "ga-200"
solver = "ga"
budget = 200

[[settings]]
name = "evo-200"
solver = "evo"
budget = 200
seed = 5
"#;

#[test]
fn gen_writes_requested_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = edgesched(&["gen", "--seed", "42", "--count", "100", "--out", "corpus"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let files = fs::read_dir(dir.path().join("corpus")).unwrap().count();
    assert_eq!(files, 100);
    let first = fs::read_to_string(dir.path().join("corpus/scenario-00000.json")).unwrap();
    assert!(first.contains("\"seed\": 42"));
}

#[test]
fn bench_writes_csv_and_charts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    for out in ["a", "b"] {
        let o = edgesched(&["bench", "--config", "small.toml", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        for f in ["report.csv", "delay.svg", "time.svg", "wins.svg"] {
            assert!(dir.path().join(out).join(f).exists(), "{f}");
        }
    }
    let strip = |p: &str| -> Vec<String> {
        let text = fs::read_to_string(dir.path().join(p)).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        let t = header.iter().position(|h| *h == "wall_time_s").unwrap();
        text.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f[t] = "";
                f.join(",")
            })
            .collect()
    };
    assert_eq!(strip("a/report.csv"), strip("b/report.csv"));
    assert_eq!(strip("a/report.csv").len(), 1 + 3 * 2 + 2);
    assert_eq!(
        fs::read(dir.path().join("a/wins.svg")).unwrap(),
        fs::read(dir.path().join("b/wins.svg")).unwrap()
    );

    let o = edgesched(&["plot", "a/report.csv", "--out", "plots"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read(dir.path().join("plots/wins.svg")).unwrap(),
        fs::read(dir.path().join("a/wins.svg")).unwrap()
    );
}

#[test]
fn solve_prints_a_feasible_report() {
    let dir = tempfile::tempdir().unwrap();
    edgesched(&["gen", "--count", "1", "--out", "c"], dir.path());
    let o = edgesched(
        &["solve", "c/scenario-00000.json", "--solver", "evo", "--budget", "400"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("\"assignments\""));
    assert!(out.contains("\"evaluations\": 400"));
}

#[test]
fn solve_reports_infeasible_instance_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = r#"{
  "version": "edgesched-scenario/1 prng=chacha8 seed=base+index",
  "seed": 0,
  "wireless": {"freq_ghz": 5.9, "tx_power_dbm": 21.0, "noise_mw_per_mhz": 3.9810717055349695e-12},
  "nodes": [{"id": 0, "bandwidth_mhz": 10, "capacity_mhz": 100.0},
            {"id": 1, "bandwidth_mhz": 10, "capacity_mhz": 100.0}],
  "requests": [
    {"id": 0, "size_mbit": 10.0, "demand_mhz": 150.0, "distances_m": [50.0, 60.0]},
    {"id": 1, "size_mbit": 10.0, "demand_mhz": 80.0, "distances_m": [50.0, 60.0]}
  ]
}"#;
    fs::write(dir.path().join("bad.json"), scenario).unwrap();
    for solver in ["ga", "evo", "exact"] {
        let o = edgesched(&["solve", "bad.json", "--solver", solver, "--budget", "200"], dir.path());
        assert_eq!(o.status.code(), Some(2), "{solver}");
        let err = stderr(&o);
        assert!(err.contains("violation:") && err.to_lowercase().contains("compute"), "{solver}: {err}");
    }
}

#[test]
fn train_then_bench_with_surrogate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{SMALL}\n[[settings]]\nname = \"surrogate\"\nsolver = \"surrogate\"\n"
    );
    fs::write(dir.path().join("small.toml"), cfg).unwrap();
    let o = edgesched(
        &["train", "--config", "small.toml", "--count", "6", "--dataset", "data", "--out", "m.bin"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("data/label-00005.json").exists());
    // Second run reuses the saved dataset.
    let o = edgesched(
        &["train", "--config", "small.toml", "--dataset", "data", "--out", "m2.bin"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read(dir.path().join("m.bin")).unwrap(),
        fs::read(dir.path().join("m2.bin")).unwrap()
    );

    let o = edgesched(&["bench", "--config", "small.toml", "--out", "r"], dir.path());
    assert_eq!(o.status.code(), Some(2), "surrogate without a model must fail");
    let o = edgesched(
        &["bench", "--config", "small.toml", "--model", "m.bin", "--jobs", "1", "--out", "r"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("r/report.csv")).unwrap();
    assert!(csv.contains("summary,,surrogate,"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(edgesched(&["gen", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(edgesched(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(edgesched(&[], dir.path()).status.code(), Some(1));
    assert_eq!(edgesched(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "corpus_size = 0\n").unwrap();
    let o = edgesched(&["gen", "--config", "bad.toml", "--out", "c"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = edgesched(&["plot", "missing.csv", "--out", "p"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = edgesched(&["solve", "missing.json", "--solver", "tabu"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn experiment_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/experiment.toml");
    let dir = tempfile::tempdir().unwrap();
    let o = edgesched(
        &["gen", "--config", path.to_str().unwrap(), "--count", "2", "--out", "c"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
