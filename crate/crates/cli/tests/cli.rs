use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn maxvolkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxvolkit")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const I3: &str = "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n";
const TALL: &str = "%%MatrixMarket matrix array real general\n3 2\n1\n0\n1\n0\n1\n1\n";

#[test]
fn maxvol_on_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "i3.mtx", I3);
    let report = json(&maxvolkit(&["maxvol", "--input", s(&input), "--eps", "0"]));
    assert_eq!(report["command"], "maxvol");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["flags"]["eps"], 0.0);
    assert_eq!(report["result"]["row_indices"], serde_json::json!([0, 1, 2]));
    assert_eq!(report["result"]["max_abs_coefficient"], 1.0);
}

#[test]
fn rectmaxvol_grows_the_three_by_two_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tall.mtx", TALL);
    let report = json(&maxvolkit(&["rectmaxvol", "--input", s(&input), "--tau", "1.0"]));
    assert_eq!(report["result"]["k"], 3);
    let report = json(&maxvolkit(&["rectmaxvol", "--input", s(&input), "--tau", "1.5"]));
    assert_eq!(report["result"]["k"], 2);
}

#[test]
fn maxelem_rank_one_is_exact() {
    let out = maxvolkit(&[
        "maxelem", "--rank", "1", "--n", "2", "--m", "2", "--trials", "1", "--seed", "7", "--method", "square",
    ]);
    let report = json(&out);
    assert_eq!(report["result"]["square"]["min"], 1.0);
    assert!(report["result"].get("rect").is_none());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "i3.mtx", I3);
    let target = dir.path().join("sel.json");
    let out = maxvolkit(&["maxvol", "--input", s(&input), "--out", s(&target)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(report["result"]["k"], 3);
}

#[test]
fn cur_precond_and_recsys_reports() {
    let dir = tempfile::tempdir().unwrap();
    let lowrank = write(
        dir.path(),
        "lr.mtx",
        "%%MatrixMarket matrix array real general\n4 3\n1\n2\n3\n4\n2\n4\n6\n8\n1\n0\n1\n0\n",
    );
    let report = json(&maxvolkit(&["cur", "--input", s(&lowrank), "--rank", "2", "--method", "square"]));
    assert!(report["result"]["error"]["relative_frobenius"].as_f64().unwrap() < 1e-12);

    let two = write(dir.path(), "two.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\n1\n");
    let rhs = write(dir.path(), "b.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\n3\n");
    let report = json(&maxvolkit(&["precond", "--input", s(&two), "--method", "square", "--rhs", s(&rhs)]));
    let square = &report["result"]["square"];
    assert!((square["cond_z"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-14);
    assert!((square["solve"]["x"][0].as_f64().unwrap() - 2.0).abs() < 1e-14);
    assert!(square.get("seconds").is_none());
    let timed = json(&maxvolkit(&["precond", "--input", s(&two), "--timings"]));
    assert!(timed["result"]["rect"]["seconds"].is_f64());

    let ratings =
        write(dir.path(), "r.dat", "1::1::5::0\n1::2::3::0\n2::1::4::0\n2::3::1::0\n3::2::2::0\n3::3::5::0\n");
    let report =
        json(&maxvolkit(&["recsys", "--ratings", s(&ratings), "--k", "2", "--side", "users", "--method", "square"]));
    assert_eq!(report["result"]["count"], 2);
    assert_eq!(report["result"]["n_users"], 3);
    let cov = report["result"]["coverage"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&cov));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(maxvolkit(&["maxvol"]).status.code(), Some(1));
    assert_eq!(maxvolkit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(maxvolkit(&["--help"]).status.code(), Some(0));

    let missing = dir.path().join("missing.mtx");
    let out = maxvolkit(&["maxvol", "--input", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);

    let garbage = write(dir.path(), "bad.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\nx\n");
    assert_eq!(maxvolkit(&["maxvol", "--input", s(&garbage)]).status.code(), Some(2));

    let singular = write(dir.path(), "sing.mtx", "%%MatrixMarket matrix array real general\n3 2\n1\n2\n-1\n2\n4\n-2\n");
    let out = maxvolkit(&["maxvol", "--input", s(&singular)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank deficient"));

    let tall = write(dir.path(), "tall.mtx", TALL);
    let out = maxvolkit(&["rectmaxvol", "--input", s(&tall), "--min-k", "3", "--max-k", "2"]);
    assert_eq!(out.status.code(), Some(1));

    let ratings = write(dir.path(), "r.csv", "1,1,5\n2,2,3\n");
    let out = maxvolkit(&["recsys", "--ratings", s(&ratings), "--k", "1", "--side", "users", "--precision-at", "5"]);
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(env!("CARGO_BIN_EXE_maxvolkit"))
        .args(["maxelem", "--rank", "1", "--n", "3", "--m", "3", "--trials", "2"])
        .env("MAXVOLKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
