use std::path::Path;
use std::process::{Command, Output};

fn tiso(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiso"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn tiso")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, name) in [("1", "x.t3b"), ("1", "y.t3b"), ("2", "z.t3b")] {
        assert_eq!(code(&tiso(dir.path(), &["--seed", seed, "gen", "--dims", "3", "4", "5", "--out", name])), 0);
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("x.t3b"), read("y.t3b"));
    assert_ne!(read("x.t3b"), read("z.t3b"));
}

#[test]
fn haar_image_is_accepted_and_witness_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    tiso(d, &["gen", "--dims", "5", "5", "5", "--kind", "complex", "--out", "a.t3b"]);
    tiso(d, &["--seed", "3", "gen", "--from", "a.t3b", "--haar", "--out", "b.t3b"]);
    let out = tiso(d, &["--json", "iso", "--a", "a.t3b", "--b", "b.t3b", "--witness-out", "w.json"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["command"], "iso");
    assert_eq!(doc["verdict"], "yes");
    let out = tiso(d, &["--json", "verify", "--a", "a.t3b", "--b", "b.t3b", "--witness", "w.json", "--tol", "1e-8"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn scaled_tensor_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    tiso(d, &["gen", "--dims", "4", "4", "4", "--out", "a.t3b"]);
    tiso(d, &["gen", "--from", "a.t3b", "--scale", "1.5", "--out", "b.t3b"]);
    let out = tiso(d, &["--json", "iso", "--a", "a.t3b", "--b", "b.t3b"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["diagnostics"]["rejected_at"], "spectrum_match");
}

#[test]
fn degenerate_tensor_cannot_be_decided() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("ones.json"),
        format!(r#"{{"kind":"real","dims":[3,3,3],"re":[{}]}}"#, vec!["1"; 27].join(",")),
    )
    .unwrap();
    let out = tiso(d, &["iso", "--a", "ones.json", "--b", "ones.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&tiso(dir.path(), &["iso", "--bogus"])), 3);
    assert_eq!(code(&tiso(dir.path(), &["gen", "--out", "a.t3b"])), 3);
    assert_eq!(code(&tiso(dir.path(), &["gaps", "--n", "100", "--zeta", "2"])), 3);
    assert_eq!(code(&tiso(dir.path(), &["--help"])), 0);
}

#[test]
fn missing_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&tiso(dir.path(), &["iso", "--a", "nope.t3b", "--b", "nope.t3b"])), 4);
}

#[test]
fn relabelled_hypergraphs_report_permutations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    tiso(d, &["--seed", "1", "gen", "--hyper", "--dims", "6", "6", "6", "--out", "g.txt"]);
    tiso(d, &["--seed", "2", "gen", "--hyper", "--from", "g.txt", "--out", "h.txt"]);
    tiso(d, &["--seed", "2", "gen", "--hyper", "--from", "g.txt", "--toggle", "1", "2", "3", "--out", "t.txt"]);
    let out = tiso(d, &["--json", "hyper", "--g", "g.txt", "--h", "h.txt"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["permutations"].as_array().unwrap().len(), 3);
    assert_eq!(code(&tiso(d, &["hyper", "--g", "g.txt", "--h", "t.txt"])), 1);
}

#[test]
fn gaps_writes_csv_with_footer() {
    let dir = tempfile::tempdir().unwrap();
    let out = tiso(dir.path(), &["--json", "gaps", "--n", "64", "--zeta", "0.5", "--trials", "7", "--csv", "g.csv"]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().last().unwrap().starts_with("#aggregate"));
    assert_eq!(json(&out)["aggregate"]["trials"], 7);
}
