//! Loading the bundled KEEL fixtures and round-tripping them through CSV.

use std::path::{Path, PathBuf};

use poqg_core::data::{load_csv, load_keel, load_keel_with, save_csv, CsvOptions, KeelOptions, LabelColumn};
use poqg_core::{Error, ParseErrorKind, MAJORITY, MINORITY};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/keel").join(format!("{name}.dat"))
}

/// (name, minority, majority, features)
const EXPECTED: [(&str, usize, usize, usize); 9] = [
    ("ecoli-0_vs_1", 77, 143, 7),
    ("ecoli3", 35, 301, 7),
    ("ecoli4", 20, 316, 7),
    ("glass1", 76, 138, 9),
    ("glass2", 17, 197, 9),
    ("glass4", 13, 201, 9),
    ("haberman", 81, 225, 3),
    ("yeast4", 51, 1433, 8),
    ("yeast6", 35, 1449, 8),
];

#[test]
fn numeric_fixtures_have_expected_shapes() {
    for (name, n_min, n_maj, n_feat) in EXPECTED {
        let d = load_keel(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(d.count(MINORITY), n_min, "{name}");
        assert_eq!(d.count(MAJORITY), n_maj, "{name}");
        assert_eq!(d.n_features(), n_feat, "{name}");
    }
}

#[test]
fn imbalance_ratios_span_the_benchmark_range() {
    let ecoli = load_keel(fixture("ecoli-0_vs_1")).unwrap();
    let ir = ecoli.count(MAJORITY) as f64 / ecoli.count(MINORITY) as f64;
    assert!((ir - 1.857).abs() < 1e-3, "{ir}");

    let abalone = load_keel_with(fixture("abalone19"), &KeelOptions { drop_nominal: true }).unwrap();
    let ir = abalone.count(MAJORITY) as f64 / abalone.count(MINORITY) as f64;
    assert!((ir - 129.44).abs() < 1e-2, "{ir}");
    assert_eq!(abalone.n_features(), 7);
    assert!(!abalone.feature_names().iter().any(|n| n == "Sex"));
}

#[test]
fn nominal_feature_needs_explicit_drop() {
    match load_keel(fixture("abalone19")) {
        Err(Error::Parse {
            kind: ParseErrorKind::NominalFeature(name),
            ..
        }) => assert_eq!(name, "Sex"),
        other => panic!("expected a nominal-feature error, got {other:?}"),
    }
}

#[test]
fn csv_round_trip_preserves_rows_and_labels() {
    let d = load_keel(fixture("glass4")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("glass4.csv");
    save_csv(&d, &path, None).unwrap();
    let back = load_csv(&path, &CsvOptions::new(LabelColumn::Name("label".into()), "1")).unwrap();
    assert_eq!(back.len(), d.len());
    assert_eq!(back.labels(), d.labels());
    assert_eq!(back.as_flat(), d.as_flat());
    assert_eq!(back.feature_names(), d.feature_names());
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_keel(fixture("no-such-dataset")), Err(Error::Io(_))));
}
