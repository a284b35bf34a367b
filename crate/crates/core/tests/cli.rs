use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplewell")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn gas_json_has_e1() {
    let text = stdout(&run(&["gas", "--omega", "4", "--format", "json"]));
    let v: Value = serde_json::from_str(&text).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["E1"].as_f64(), Some(3.0));
    for key in ["omega", "d", "E0", "E2", "d_pipeline", "d_ratio"] {
        assert!(row[key].is_number(), "{key}");
    }
    assert_eq!(v["meta"]["convention"], "canonical");
    assert!(v["meta"]["series_relative_cutoff"].is_number());
}

#[test]
fn determinant_is_byte_identical() {
    let a = run(&["determinant", "--omega", "1", "--half-box", "8"]);
    let b = run(&["determinant", "--omega", "1", "--half-box", "8"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn sweep_compare_table() {
    let text = stdout(&run(&["sweep", "--omega", "4,6,8", "--command", "compare", "--jobs", "2"]));
    assert!(!text.contains('\r'));
    let (header, rows) = table(&text);
    let expected =
        ["omega", "E0_semi", "E1_semi", "E2_semi", "E0_num", "E1_num", "E2_num", "splitting_ratio", "e1_parity"];
    assert_eq!(header, expected);
    assert_eq!(rows.len(), 3);
    for (row, omega) in rows.iter().zip([4.0, 6.0, 8.0]) {
        assert_eq!(row[0].parse::<f64>().unwrap(), omega);
        assert!(row[7].parse::<f64>().unwrap().is_finite());
        assert!(row[8].parse::<f64>().unwrap() < -0.99);
    }
}

#[test]
fn sweep_order_is_independent_of_jobs() {
    let one = stdout(&run(&["sweep", "--omega", "8,2,5", "--command", "gas", "--jobs", "1"]));
    let three = stdout(&run(&["sweep", "--omega", "8,2,5", "--command", "gas", "--jobs", "3"]));
    assert_eq!(one, three);
    let (_, rows) = table(&one);
    let omegas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(omegas, vec![8.0, 2.0, 5.0]);
}

#[test]
fn csv_uses_twelve_significant_digits() {
    let text = stdout(&run(&["gas", "--omega", "4"]));
    assert!(text.lines().any(|l| l == "# convention=canonical"));
    let (_, rows) = table(&text);
    for cell in &rows[0] {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 12, "{cell}");
    }
}

#[test]
fn instanton_profile_columns() {
    let text = stdout(&run(&["instanton", "--omega", "2", "--grid-n", "201"]));
    let (header, rows) = table(&text);
    assert_eq!(header, ["omega", "tau", "x_c", "dx_c", "x_o"]);
    assert_eq!(rows.len(), 201);
    let mid: f64 = rows[100][2].parse().unwrap();
    assert!((mid - 0.5f64.sqrt()).abs() < 1e-10);
}

#[test]
fn spectrum_reports_requested_levels() {
    let text = stdout(&run(&["spectrum", "--omega", "4", "--count", "4"]));
    let (header, rows) = table(&text);
    assert_eq!(header, ["omega", "L", "N", "index", "eigenvalue"]);
    assert_eq!(rows.len(), 4);
    let e: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(e.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn output_file_written() {
    let path = std::env::temp_dir().join(format!("triplewell-out-{}.json", std::process::id()));
    let out = run(&["gas", "--omega", "1", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["E1"].as_f64(), Some(0.75));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn config_file_with_flag_override() {
    let path = std::env::temp_dir().join(format!("triplewell-cfg-{}.toml", std::process::id()));
    std::fs::write(&path, "command = \"gas\"\nomega = [1, 2]\nformat = \"json\"\n").unwrap();
    let text = stdout(&run(&["--config", path.to_str().unwrap(), "--omega", "4"]));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["E1"].as_f64(), Some(3.0));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn bad_config_exits_2_with_line() {
    let path = std::env::temp_dir().join(format!("triplewell-bad-{}.toml", std::process::id()));
    std::fs::write(&path, "command = \"gas\"\n# comment\ngrid_n = 5\n").unwrap();
    let out = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:"), "{err}");
    std::fs::remove_file(&path).unwrap();

    let out = run(&["gas", "--omega", "-4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn regime_violation_exits_3() {
    let out = run(&["determinant", "--omega", "1", "--half-box", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("AsymptoticRegimeViolated"));
}

#[test]
fn literal_convention_matches_half_omega() {
    let lit = stdout(&run(&["gas", "--omega", "8", "--convention", "literal"]));
    let can = stdout(&run(&["gas", "--omega", "4"]));
    let (_, a) = table(&lit);
    let (_, b) = table(&can);
    assert_eq!(a[0][1..], b[0][1..]);
    assert!(lit.contains("# convention=literal"));
}
