use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spinsat() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spinsat"));
    c.env_remove("SPINSAT_OUT_DIR");
    c
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/uf20-91")
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    if !out.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn run_then_report_then_rerun_from_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let out = run(spinsat()
        .args(["run", "--steps", "400", "--seed", "3", "--jobs", "2", "--out-dir"])
        .arg(&first)
        .arg(fixtures()));
    assert!(out.status.success());

    let summary = fs::read_to_string(first.join("paper_quickpub_summary.csv")).unwrap();
    let names: Vec<&str> = summary.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names.len(), 10);
    assert_eq!(names, sorted);
    for f in [
        "binned_curves.csv",
        "manifest.json",
        "ising_nodes_uf20-01.csv",
        "ising_edges_uf20-10.csv",
    ] {
        assert!(first.join(f).exists(), "{f}");
    }

    let report = run(spinsat()
        .arg("report")
        .arg(first.join("paper_quickpub_summary.csv"))
        .arg("--out-dir")
        .arg(&first));
    assert!(report.status.success());
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.contains("Residual clause tension"));
    assert!(text.contains("Backbone"));
    assert!(first.join("table2_correlation.csv").exists());

    // The manifest alone reproduces the run, including the out dir; point
    // it elsewhere with the environment override.
    let second = tmp.path().join("second");
    let rerun = run(spinsat()
        .env("SPINSAT_OUT_DIR", &second)
        .arg("--config")
        .arg(first.join("manifest.json"))
        .arg("run"));
    assert!(rerun.status.success());
    let mut a = listing(&first);
    a.retain(|(n, _)| !n.starts_with("table"));
    assert_eq!(a, listing(&second));
}

#[test]
fn failures_give_nonzero_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.cnf");
    fs::write(&bad, "p cnf 2 1\n1 7 0\n").unwrap();
    let out = run(spinsat()
        .args(["compile", "--out-dir"])
        .arg(tmp.path().join("o"))
        .arg(fixtures().join("uf20-01.cnf"))
        .arg(&bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad"));
    assert!(tmp.path().join("o/ising_nodes_uf20-01.csv").exists());

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = run(spinsat().arg("compile").arg(&empty).arg("--out-dir").arg(&empty));
    assert_ne!(out.status.code(), Some(0));

    let out = run(spinsat().arg("report").arg(tmp.path().join("missing.csv")));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_solve_and_backbone() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(spinsat()
        .args([
            "gen",
            "-n",
            "12",
            "-m",
            "50",
            "--seed",
            "5",
            "--count",
            "3",
            "--satisfiable",
            "--out-dir",
        ])
        .arg(tmp.path()));
    assert!(out.status.success());
    let files: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(files.len(), 3);

    let out = run(spinsat().arg("solve").args(&files));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("s SATISFIABLE").count(), 3);

    let out = run(spinsat().arg("backbone").arg(&files[0]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "true");
    assert_eq!(row[4], row[6], "capped and exact backbone sizes differ: {text}");

    let out = run(spinsat()
        .args([
            "anneal",
            "--steps",
            "50",
            "--sweeps",
            "--paper-literal-gadget",
            "--out-dir",
        ])
        .arg(tmp.path().join("a"))
        .arg(&files[1]));
    assert!(out.status.success());
    assert_eq!(fs::read_dir(tmp.path().join("a")).unwrap().count(), 1);
}
