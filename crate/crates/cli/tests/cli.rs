//! End-to-end runs of the `poqg` binary: outputs, exit codes and the
//! no-partial-output rule.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/keel").join(format!("{name}.dat"))
}

fn poqg(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poqg"))
        .args(args)
        .env_remove("POQG_SEED")
        .output()
        .expect("spawn poqg")
}

macro_rules! run {
    ($($a:expr),* $(,)?) => {
        poqg(&[$(std::ffi::OsStr::new(&$a)),*])
    };
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn demo_writes_one_file_set_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demo");
    let o = run!("demo", out, "--seed", "0");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for m in ["poqg", "smote", "smote_tomek", "adasyn", "smote_enn", "borderline_smote"] {
        let rows = csv_rows(&out.join(format!("{m}_synthetic.csv")));
        assert_eq!(rows.len(), 179, "{m}");
        assert!(out.join(format!("{m}_points.csv")).is_file(), "{m}");
    }
    let summary = csv_rows(&out.join("demo_summary.csv"));
    let poqg_row = summary.iter().find(|r| r[0] == "poqg").expect("poqg row");
    assert_eq!(poqg_row[1], "179");
    assert_eq!(poqg_row[3], "179", "every PO-QG synthetic lies in the minority hull");
    assert_eq!(poqg_row[4], poqg_row[5]);
    assert_eq!(csv_rows(&out.join("case_study.csv")).len(), 225);
    assert!(out.join("run.json").is_file());
}

#[test]
fn resample_balances_and_records_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = run!("resample", fixture("glass4"), out, "--seed", "4");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("resampled.csv"));
    let label_col = 9;
    let minority = rows.iter().filter(|r| r[label_col] == "1").count();
    assert_eq!(minority, 201);
    assert_eq!(rows.len(), 402);
    assert_eq!(rows.iter().filter(|r| r[label_col + 1] == "1").count(), 188);
    assert_eq!(csv_rows(&out.join("provenance.csv")).len(), 188);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary.is_object());
}

#[test]
fn baseline_method_flag_selects_the_resampler() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = run!("resample", fixture("ecoli4"), out, "--method", "smote-tl");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["method"], "smote_tomek");
}

#[test]
fn data_errors_exit_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = run!("resample", fixture("no-such-file"), out);
    assert_eq!(code(&o), 3);
    assert!(!out.exists());

    let o = run!("resample", fixture("abalone19"), out);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nominal"));
    assert!(!out.exists());
}

#[test]
fn config_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = run!("resample", fixture("glass4"), out, "--k", "1");
    assert_eq!(code(&o), 2);
    let o = run!("resample", fixture("glass4"), out, "--no-such-flag");
    assert_eq!(code(&o), 2);

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "seed = 1\nnot_a_field = true\n").unwrap();
    let o = run!("resample", fixture("glass4"), out, "--config", cfg);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 9\n[poqg]\nk = 7\nq = 1.5\n").unwrap();
    let out = dir.path().join("r");
    let o = run!("resample", fixture("glass4"), out, "--config", cfg, "--q", "1.7");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["seed"], 9);
    assert_eq!(run["poqg"]["k"], 7);
    assert_eq!(run["poqg"]["q"], 1.7);
}

#[test]
fn compare_writes_cells_summary_and_tests() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = run!("compare", fixture("glass4"), fixture("ecoli4"), "--methods", "smote,poqg", "--out", out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = csv_rows(&out.join("summary.csv"));
    assert_eq!(summary.len(), 4);
    for ds in ["glass4", "ecoli4"] {
        for m in ["smote", "poqg"] {
            assert!(out.join(format!("cells/{ds}__{m}.csv")).is_file());
            assert!(out.join(format!("cells/{ds}__{m}.json")).is_file());
        }
    }
    for f in ["winning_times.csv", "wilcoxon.csv", "wilcoxon.md", "failures.csv", "timings.csv", "report.md"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let report = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(report.contains("PO-QG") && report.contains("SMOTE"));
    assert!(csv_rows(&out.join("failures.csv")).is_empty());
}

#[test]
fn compare_keeps_going_past_a_bad_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = run!("compare", fixture("glass4"), fixture("abalone19"), "--methods", "none,smote", "--out", out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let failures = csv_rows(&out.join("failures.csv"));
    assert_eq!(failures.len(), 2);
    assert!(failures.iter().all(|f| f[0] == "abalone19"));
    assert_eq!(csv_rows(&out.join("summary.csv")).len(), 2);
}

#[test]
fn grid_sweeps_the_requested_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = run!(
        "grid",
        fixture("glass4"),
        "--out",
        out,
        "--k",
        "5",
        "--alpha",
        "0.3,0.5",
        "--beta",
        "0.1",
        "--q",
        "1.3,1.7"
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&out.join("sweep.csv")).len(), 4);
    assert_eq!(csv_rows(&out.join("best.csv")).len(), 1);
    assert!(out.join("best.json").is_file());
}

#[test]
fn replay_requires_out_and_a_readable_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = run!("--replay", dir.path().join("run.json"));
    assert_eq!(code(&o), 2);
    let o = run!("--replay", dir.path().join("run.json"), "--out", dir.path().join("x"));
    assert_ne!(code(&o), 0);
    assert!(!dir.path().join("x").exists());
}
