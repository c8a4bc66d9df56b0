use std::process::{Command, Output};

use quantum_bertrand::cli::{Cell, Table};
use serde_json::Value;

fn qbertrand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbertrand")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn num(cell: &Cell) -> f64 {
    match cell {
        Cell::Num(x) => *x,
        Cell::Int(i) => *i as f64,
        other => panic!("not a number: {other:?}"),
    }
}

#[test]
fn oscillator_potential_table() {
    let out = qbertrand(&["potential", "family=first", "alpha=2", "omega=1", "grid=[0.1,5,50]"]);
    assert_eq!(out.status.code(), Some(0));
    let t = Table::parse_csv(&stdout(&out)).unwrap();
    assert_eq!(t.columns, ["r", "V"]);
    assert_eq!(t.rows.len(), 50);
    let rs: Vec<f64> = t.rows.iter().map(|r| num(&r[0])).collect();
    assert!(rs.windows(2).all(|w| w[0] < w[1]));
    let at_one = t.rows.iter().find(|r| (num(&r[0]) - 1.0).abs() < 1e-12).unwrap();
    assert!((num(&at_one[1]) - 0.5).abs() < 1e-12);
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let out = qbertrand(&["potential", "alpha=2", "grid=[0.5,1,2]"]);
    let text = stdout(&out);
    let line = text.lines().nth(1).unwrap();
    assert_eq!(line, "5.0000000000000000e-1,1.2500000000000000e-1");
    assert!(!text.contains('\r'));
}

#[test]
fn morse_table_decays_like_two_exponentials() {
    let out = qbertrand(&["potential", "family=pct", "alpha=-1", "a=-0.5", "--format", "json", "grid=[1,12,12]"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    // Far out the e^(-rho) term dominates.
    let v = |i: usize| rows[i]["V"].as_f64().unwrap();
    let ratio = v(11) / v(10);
    assert!((ratio - (-1.0f64).exp()).abs() < 1e-4, "{ratio}");
}

#[test]
fn config_errors_exit_2_naming_the_key() {
    let out = qbertrand(&["potential", "alpha=abc"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    let out = qbertrand(&["spectrum", "flavour=up"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flavour"));

    assert_eq!(qbertrand(&["potential", "a=0", "alpha=1.5"]).status.code(), Some(2));
    assert_eq!(qbertrand(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# oscillator\nalpha = 2\ngrid = [0.5, 2, 4]\nomega = 3\n").unwrap();
    let out = qbertrand(&["potential", "--config", path.to_str().unwrap(), "omega=1"]);
    assert_eq!(out.status.code(), Some(0));
    let t = Table::parse_csv(&stdout(&out)).unwrap();
    assert_eq!(t.rows.len(), 4);
    assert!((num(&t.rows[0][1]) - 0.125).abs() < 1e-12);
}

#[test]
fn coulomb_spectrum_rows() {
    let out = qbertrand(&["spectrum", "case=coulomb", "n_max=2", "l_max=1"]);
    assert_eq!(out.status.code(), Some(0));
    let t = Table::parse_csv(&stdout(&out)).unwrap();
    assert_eq!(t.columns, ["n", "l", "E_analytic", "E_numeric", "abs_diff"]);
    assert_eq!(t.rows.len(), 6);
    assert_eq!(t.rows[0][..3], [Cell::Int(0), Cell::Int(0), Cell::Num(-0.5)]);
    assert!(t.rows.iter().all(|r| r[3] == Cell::Empty && r[4] == Cell::Empty));
}

#[test]
fn oscillator_spectrum_verifies() {
    let out = qbertrand(&["spectrum", "case=oscillator", "omega=1", "n_max=1", "l_max=1", "verify=true"]);
    assert_eq!(out.status.code(), Some(0));
    let t = Table::parse_csv(&stdout(&out)).unwrap();
    assert_eq!(t.rows[0][2], Cell::Num(1.5));
    let worst = t.rows.iter().map(|r| num(&r[4])).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn scaled_constants_reach_the_oracle() {
    let out = qbertrand(&["spectrum", "case=oscillator", "omega=2", "hbar=1.5", "mass=0.8", "n_max=0", "l_max=0", "verify=true", "grid=[0.001,10,4000]"]);
    assert_eq!(out.status.code(), Some(0));
    let t = Table::parse_csv(&stdout(&out)).unwrap();
    assert!((num(&t.rows[0][2]) - 1.5 * 2.0 * 1.5).abs() < 1e-12);
    assert!(num(&t.rows[0][4]) < 1e-3);
}

#[test]
fn coarse_grid_exits_3() {
    let out = qbertrand(&["spectrum", "case=coulomb", "verify=true", "grid=[0.001,60,40]"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_filter_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qbertrand(&["verify", "--only=bertrand", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let obj = report.as_object().unwrap();
    assert_eq!(obj.len(), 1);
    assert_eq!(obj["bertrand.classifier"]["pass"], true);
    assert_eq!(qbertrand(&["verify", "--only=nonsense"]).status.code(), Some(2));

    let out = qbertrand(&["verify", "--only=coulomb,pct"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let groups: std::collections::BTreeSet<&str> =
        report.as_object().unwrap().keys().map(|k| k.split('.').next().unwrap()).collect();
    assert_eq!(groups.into_iter().collect::<Vec<_>>(), ["coulomb", "pct"]);
    assert_eq!(qbertrand(&["verify", "--only=coulomb,nonsense"]).status.code(), Some(2));
}

#[test]
fn default_box_grows_with_the_levels() {
    let out = qbertrand(&["spectrum", "case=coulomb", "n_max=3", "l_max=2", "verify=true"]);
    assert_eq!(out.status.code(), Some(0));
    let t = Table::parse_csv(&stdout(&out)).unwrap();
    for row in &t.rows {
        assert!(num(&row[4]) < 1e-4 * num(&row[2]).abs(), "{row:?}");
    }
}

#[test]
fn full_verify_covers_every_group() {
    let out = qbertrand(&["verify", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let names: Vec<&String> = report.as_object().unwrap().keys().collect();
    for group in ["coulomb", "oscillator", "couplings", "bertrand", "duality", "residuals", "pct", "second_class"] {
        assert!(names.iter().any(|n| n.starts_with(&format!("{group}."))), "{group}");
    }
}

#[test]
fn pct_levels_share_one_energy() {
    let out = qbertrand(&["pct", "alpha=-1", "a=0.25", "b=0.5", "c=-0.4", "l=2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let e0 = rows[0]["E"].as_f64().unwrap();
    for row in rows {
        assert_eq!(row["E"].as_f64().unwrap(), e0);
        assert!(row["residual"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn second_class_worked_example() {
    let out = qbertrand(&["second-class", "alpha=2", "beta=0", "delta=0", "gamma=1", "a=1", "b=1"]);
    assert_eq!(out.status.code(), Some(0));
    let t = Table::parse_csv(&stdout(&out)).unwrap();
    let get = |name: &str| t.rows.iter().find(|r| r[0] == Cell::Text(name.into())).map(|r| num(&r[1])).unwrap();
    assert_eq!(get("A2"), 1.0);
    assert_eq!(get("B1"), 4.0);
    assert_eq!(get("D3"), 6.0);
    assert_eq!(qbertrand(&["second-class", "b=0"]).status.code(), Some(2));
}

#[test]
fn classify_marks_only_one_and_two() {
    let out = qbertrand(&["classify", "--format", "json", "draws=2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for row in rows.as_array().unwrap() {
        let alpha = row["alpha"].as_f64().unwrap();
        assert_eq!(row["first_constant_independent"], alpha == 1.0 || alpha == 2.0);
        assert_ne!(row["second_constant_independent"], true);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["classify", "alphas=0.5,1.5,2.5", "--seed", "3"];
    assert_eq!(qbertrand(&args).stdout, qbertrand(&args).stdout);
}
