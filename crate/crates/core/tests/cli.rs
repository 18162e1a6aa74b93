use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use marstrand::io::read_squares_csv;
use marstrand::validate_disjoint;
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_marstrand"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_writes_one_row_per_square() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["gen", "--depths", "2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(rows(&tmp.path().join("set_2.csv")), 81);
    let summary = json(&tmp.path().join("set_2.json"));
    assert_eq!(summary["count"], 81);
    assert!((summary["hausdorff_sum"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-9);

    let cfg = write_config(tmp.path(), r#"{"spec": "full", "depths": [3, 3]}"#);
    let out = run(tmp.path(), &["gen", "--config", &cfg]);
    assert!(out.status.success());
    assert_eq!(rows(&tmp.path().join("set_3.csv")), 64);
}

#[test]
fn invalid_base_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"spec": {"name": "bad", "base": 3, "digits": [[0, 0]]}}"#,
    );
    let out = run(tmp.path(), &["gen", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("base must be a power of two"));
}

#[test]
fn cover_tie_and_collapse() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"spec": "full", "s": 2.0, "depths": [3, 3]}"#,
    );
    let out = run(tmp.path(), &["cover", "--config", &cfg]);
    assert!(out.status.success());
    let summary = json(&tmp.path().join("cover_3.json"));
    assert_eq!(summary["count"], 64);
    assert_eq!(summary["goodness_constant"], 1.0);

    let squares =
        read_squares_csv(fs::File::open(tmp.path().join("cover_3.csv")).unwrap()).unwrap();
    assert_eq!(squares.len(), 64);
    assert!(validate_disjoint(&squares).is_none());

    let out = run(tmp.path(), &["cover", "--config", &cfg, "--tau", "0.9"]);
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(tmp.path().join("cover_3.csv")).unwrap(),
        "level,ix,iy\n0,0,0\n"
    );
}

#[test]
fn pair_cap_is_a_resource_error() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &[
            "marstrand",
            "--depths",
            "3",
            "--merge",
            "fine",
            "--pair-cap",
            "100",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("729"));
}

#[test]
fn marstrand_outputs_and_chain() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["marstrand", "--depths", "1..2", "--grid", "64"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for d in 1..=2 {
        assert_eq!(rows(&tmp.path().join(format!("sweep_{d}.csv"))), 64);
        let svg = fs::read_to_string(tmp.path().join(format!("plot_{d}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"));
    }
    let summary = json(&tmp.path().join("summary.json"));
    for d in summary["depths"].as_array().unwrap() {
        assert_eq!(d["chain_holds"], true);
        let (a, b, c) = (
            d["I_numeric"].as_f64().unwrap(),
            d["I_pair_bound"].as_f64().unwrap(),
            d["I_transversal_capped"].as_f64().unwrap(),
        );
        assert!(a <= b && b <= c);
    }
}

#[test]
fn diagonal_projection_shrinks_with_fine_covers() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"spec": "diagonal", "depths": [1, 4], "grid": 16, "merge": "fine"}"#,
    );
    let out = run(tmp.path(), &["marstrand", "--config", &cfg]);
    assert!(out.status.success());
    let summary = json(&tmp.path().join("summary.json"));
    let m: Vec<f64> = summary["depths"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["m_proj_at_minus_quarter_pi"].as_f64().unwrap())
        .collect();
    assert!(m.windows(2).all(|w| w[1] < w[0]), "{m:?}");
}

#[test]
fn density_defaults_and_single_square() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"spec": {"name": "one", "base": 2, "digits": [[0, 0]]}, "depths": [1, 1], "grid": 16}"#,
    );
    let out = run(tmp.path(), &["density", "--config", &cfg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = json(&tmp.path().join("domination.json"));
    let records = summary["records"].as_array().unwrap();
    // Two default windows per direction.
    assert_eq!(records.len(), 32);
    let diam = 2f64.sqrt() / 2.0;
    for r in records {
        assert!(r["ratio"].as_f64().unwrap() <= 4.0);
        let eps = r["eps"].as_f64().unwrap();
        assert!((eps - 2.0 * diam).abs() < 1e-15 || (eps - 4.0 * diam).abs() < 1e-15);
        assert!((r["mass"].as_f64().unwrap() - r["hausdorff_sum"].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn density_skips_small_windows() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"spec": "carpet", "depths": [1, 1], "grid": 16, "eps": [0.01, 2.0]}"#,
    );
    let out = run(tmp.path(), &["density", "--config", &cfg]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let summary = json(&tmp.path().join("domination.json"));
    assert_eq!(summary["skipped"].as_array().unwrap().len(), 1);
    assert_eq!(summary["records"].as_array().unwrap().len(), 16);
}

#[test]
fn reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        for verb in ["gen", "cover", "marstrand", "density"] {
            let out = run(
                dir,
                &[verb, "--depths", "1..2", "--grid", "32", "--seed", "7"],
            );
            assert!(
                out.status.success(),
                "{verb}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 14);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
    }
}

#[test]
fn unknown_config_field_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"spec": "carpet", "depth": 3}"#);
    let out = run(tmp.path(), &["gen", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}
