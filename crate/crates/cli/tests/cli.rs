use std::path::Path;
use std::process::{Command, Output};

fn qsinn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsinn"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn toy_phase_density_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsinn(dir.path(), &["train-quantum", "--dataset", "toy", "--phase-bits", "2", "--dump-density", "phase"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dump = read_json(&dir.path().join("density_phase.json"));
    let expected = [0.75, 0.0, 0.25, 0.0];
    for r in 0..4 {
        for c in 0..4 {
            let re = dump["data"][r][c][0].as_f64().unwrap();
            let im = dump["data"][r][c][1].as_f64().unwrap();
            let want = if r == c { expected[r] } else { 0.0 };
            assert!((re - want).abs() < 1e-9 && im.abs() < 1e-9, "({r}, {c})");
        }
    }
    let result = read_json(&dir.path().join("quantum_result.json"));
    assert_eq!(result["bitstring"], "00");
}

#[test]
fn manifest_lists_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsinn(dir.path(), &["brute-force", "--hidden", "2", "--with-quantum"]);
    assert!(out.status.success());
    let m = read_json(&dir.path().join("brute-force.manifest.json"));
    let mut listed: Vec<String> = m["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| Path::new(p.as_str().unwrap()).file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    listed.push("brute-force.manifest.json".into());
    listed.sort();
    let mut present: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    present.sort();
    assert_eq!(listed, present);
    assert_eq!(m["config"]["hidden"], "2");
    let csv = std::fs::read_to_string(dir.path().join("bruteforce.csv")).unwrap();
    assert!(csv.starts_with("bits,correct_count,mse\n00,4,"));
}

#[test]
fn sweep_outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let args = ["sweep", "--widths", "3,4", "--layers", "1,2", "--seeds", "3", "--epochs", "15", "--seed", "9"];
    assert!(qsinn(a.path(), &args).status.success());
    let mut single = args.to_vec();
    single.extend(["--threads", "1"]);
    assert!(qsinn(b.path(), &single).status.success());
    // replay from the written config; the flag overrides its output directory
    let cfg = a.path().join("sweep.config");
    assert!(qsinn(c.path(), &["--config", cfg.to_str().unwrap(), "sweep"]).status.success());
    for file in ["sweep.csv", "heatmap.csv"] {
        let first = std::fs::read(a.path().join(file)).unwrap();
        assert_eq!(first, std::fs::read(b.path().join(file)).unwrap(), "{file}");
        assert_eq!(first, std::fs::read(c.path().join(file)).unwrap(), "{file}");
    }
    let text = std::fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 3);
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qsinn(dir.path(), &["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(qsinn(dir.path(), &["sweep", "--model", "toy"]).status.code(), Some(1));
    assert_eq!(qsinn(dir.path(), &["sweep", "--seeds", "0"]).status.code(), Some(1));
    assert_eq!(qsinn(dir.path(), &["train-quantum", "--dataset", "missing.txt"]).status.code(), Some(1));
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "epochs = 3\ntypo = 1\n").unwrap();
    let out = qsinn(dir.path(), &["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("typo"));
    assert_eq!(
        Command::new(env!("CARGO_BIN_EXE_qsinn")).arg("--help").output().unwrap().status.code(),
        Some(0)
    );
}

#[test]
fn verify_circuits_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsinn(dir.path(), &["verify-circuits", "--max-n", "2", "--max-m", "3", "--max-fan-in", "2"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS sine") && stdout.contains("PASS plus"), "{stdout}");
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["sine"]["failures"], 0);
}

#[test]
fn file_datasets_and_classical_training() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pairs.txt");
    std::fs::write(&data, "# k, n, y\n-3, 1, 2\n-1, 1, -2\n1, 1, 2\n3, 1, -2\n").unwrap();
    let out = qsinn(dir.path(), &["train-quantum", "--dataset", data.to_str().unwrap(), "--phase-bits", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("weights 00; correct 4/4"));
    let out = qsinn(dir.path(), &["train-classical", "--model", "toy", "--seeds", "4", "--epochs", "50"]);
    assert!(out.status.success());
    let hist = std::fs::read_to_string(dir.path().join("history.csv")).unwrap();
    assert_eq!(hist.lines().count(), 1 + 4 * 50);
}
