use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use anneal_svm::datagen::load_dataset;
use anneal_svm::harness::RECORDS_HEADER;
use anneal_svm::qubo::{load_qubo, save_qubo, QuboProblem};
use anneal_svm::svm::{load_model, SvmModel};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anneal-svm"))
        .args(args)
        .output()
        .expect("spawn anneal-svm")
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_train_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let qmodel = dir.path().join("q.json");
    let cmodel = dir.path().join("c.json");

    ok(&["gen", "--problem", "nonlinear2", "--n", "40", "--noise", "0.05", "--seed", "3", "--out", p(&train)]);
    ok(&["gen", "--problem", "nonlinear2", "--n", "200", "--seed", "4", "--out", p(&test)]);
    assert_eq!(load_dataset(&train).unwrap().len(), 40);

    ok(&[
        "train-qubo", "--train", p(&train), "--gamma", "10", "--base", "2", "--bits", "2", "--xi", "0",
        "--seed", "1", "--sweeps", "200", "--model-out", p(&qmodel),
    ]);
    ok(&["train-classical", "--train", p(&train), "--model-out", p(&cmodel)]);
    assert!(matches!(load_model(&qmodel).unwrap(), SvmModel::Qubo(_)));
    assert!(matches!(load_model(&cmodel).unwrap(), SvmModel::Classical(_)));

    for model in [&qmodel, &cmodel] {
        let report = ok(&["eval", "--model", p(model), "--test", p(&test)]);
        assert!(report.contains("accuracy"), "{report}");
        assert!(report.contains("/200)"), "{report}");
    }
}

#[test]
fn solve_qubo_exact_and_annealed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.txt");
    let mut q = QuboProblem::new(3);
    q.add_term(0, 0, -1.0).unwrap();
    q.add_term(1, 1, -1.0).unwrap();
    q.add_term(0, 1, 3.0).unwrap();
    q.add_term(2, 2, 0.5).unwrap();
    save_qubo(&q, &path).unwrap();
    assert_eq!(load_qubo(&path).unwrap(), q);

    let exact = ok(&["solve-qubo", "--in", p(&path), "--exact"]);
    assert_eq!(exact, "energy -1\nbits 100\n");
    let annealed = ok(&["solve-qubo", "--in", p(&path), "--seed", "5"]);
    assert!(annealed.starts_with("energy -1\n"), "{annealed}");
}

#[test]
fn sweep_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.csv");
    let summary = dir.path().join("summary.csv");
    let table = ok(&[
        "sweep", "--problem", "linear", "--sweeps", "20", "--restarts", "2", "--out", p(&records),
        "--summary-out", p(&summary),
    ]);
    assert!(table.contains("linear"));
    let text = fs::read_to_string(&records).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(RECORDS_HEADER));
    assert_eq!(lines.count(), 96);
    assert_eq!(fs::read_to_string(&summary).unwrap().lines().count(), 2);
}

#[test]
fn bad_input_exit_codes() {
    // unknown problem name is a usage error
    assert_eq!(cli(&["gen", "--problem", "spiral", "--n", "5", "--out", "x.csv"]).status.code(), Some(1));
    // invalid encoding is rejected before any work
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    ok(&["gen", "--problem", "linear", "--n", "10", "--out", p(&train)]);
    let out = cli(&[
        "train-qubo", "--train", p(&train), "--gamma", "1", "--base", "1", "--bits", "2", "--xi", "0",
        "--model-out", p(&dir.path().join("m.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    // missing file is a runtime failure
    let out = cli(&["eval", "--model", p(&dir.path().join("none.json")), "--test", p(&train)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
