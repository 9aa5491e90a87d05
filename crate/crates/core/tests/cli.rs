use std::f64::consts::PI;
use std::process::Command;

use ekt_cylinders::cli::run;
use serde_json::Value;

fn ekt(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let full: Vec<&str> = std::iter::once("ekt").chain(args.iter().copied()).collect();
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = ekt(args);
    assert_eq!(code, 0, "stderr: {err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn critical_length_examples() {
    let v = json(&["critical-length", "--kappa", "0", "--tau", "0", "--rho", "1"]);
    assert!((v["L0"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-13);
    let v = json(&["critical-length", "--kappa", "0", "--tau", "1", "--rho", "1"]);
    assert!((v["L0"].as_f64().unwrap() - 8.885765876).abs() < 1e-9);
    assert!(v["agreement_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["berger_period"].is_null());
    let v = json(&["critical-length", "--kappa", "4", "--tau", "1", "--rho", "0.5"]);
    assert!((v["berger_period"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-13);
}

#[test]
fn domain_errors_exit_two_with_code() {
    let (code, out, err) = ekt(&["critical-length", "--kappa", "-1", "--r", "2.5"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.starts_with("error: InvalidRadius: "), "{err}");
    assert_eq!(err.lines().count(), 1);

    let (code, _, err) = ekt(&["classify", "--kappa", "4", "--tau", "1", "--rho", "0.5", "--length", "7"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: BergerPeriodExceeded: "), "{err}");

    let (code, _, err) = ekt(&["critical-length", "--rho", "1", "--r", "1"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: InvalidInput: "), "{err}");

    let (code, _, err) = ekt(&["classify", "--rho", "1", "--length", "3", "--bc", "robin"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: InvalidInput: "), "{err}");

    let (code, _, _) = ekt(&["sweep", "--rho-range", "1:2"]);
    assert_eq!(code, 2);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = ekt(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("critical-length"));
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "--rho", "1", "--length", "7"]);
    assert_eq!(v["general_verdict"], "Unstable");
    assert_eq!(v["axisym_verdict"], "Unstable");
    for key in ["L0", "axisym_verdict", "general_verdict", "lambda1", "lambda2", "morse_index", "weak_index_axisym"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let v = json(&["classify", "--rho", "1", "--length", "2"]);
    assert_eq!(v["axisym_verdict"], "StronglyStable");
    let v = json(&["classify", "--rho", "1", "--length", "3"]);
    assert_eq!(v["axisym_verdict"], "StronglyStable");
    let v = json(&["classify", "--rho", "1", "--length", "4"]);
    assert_eq!(v["axisym_verdict"], "StableNotStronglyStable");
    assert_eq!(v["general_verdict"], "CriterionInconclusive");
}

#[test]
fn verify_default_cylinder_passes() {
    let v = json(&["verify"]);
    assert!((v["L"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-12);
    assert_eq!(v["pass"], true);
    assert!(v["modes"][0]["rel_err"].as_f64().unwrap() < 0.01);
}

#[test]
fn verify_neumann_includes_constant_mode() {
    let l0 = json(&["critical-length", "--kappa", "-1", "--tau", "0.5", "--rho", "1"])["L0"].as_f64().unwrap();
    let length = format!("{}", 1.5 * l0);
    let v = json(&["verify", "--kappa", "-1", "--tau", "0.5", "--rho", "1", "--length", &length, "--bc", "neumann"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["modes"][0]["n"], 0);
    assert!(v["modes"][0]["rel_err"].as_f64().unwrap() < 1e-10);
}

#[test]
fn under_resolved_verify_exits_three() {
    let (code, out, err) = ekt(&["verify", "--grid", "8x8", "--n-max", "4", "--format", "csv"]);
    assert_eq!(code, 3);
    assert!(err.contains("verification failed"));
    let (header, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    assert!(header.contains(&"order".to_string()));
    assert_eq!(rows[3].last().unwrap(), "false");
}

#[test]
fn sweep_rho_reproduces_classical_column() {
    let (code, out, _) = ekt(&["sweep", "--rho-range", "0.1:1.1:11"]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header.len(), 14);
    assert_eq!(rows.len(), 11);
    let rho = column(&header, &rows, "rho");
    let l0 = column(&header, &rows, "L0");
    for (r, l) in rho.iter().zip(&l0) {
        assert!((l - 2.0 * PI * r).abs() <= 1e-14 * l.max(1.0), "{r} {l}");
    }
}

#[test]
fn sweep_tau_is_monotone_and_kappa_continuous() {
    let (_, out, _) = ekt(&["sweep", "--tau-range", "0:2:9"]);
    let (header, rows) = csv_rows(&out);
    let l0 = column(&header, &rows, "L0");
    assert!(l0.windows(2).all(|w| w[1] > w[0]));

    let (_, out, _) = ekt(&["sweep", "--tau", "0.5", "--kappa-range", "-1e-6:1e-6:5"]);
    let (header, rows) = csv_rows(&out);
    let l0 = column(&header, &rows, "L0");
    for w in l0.windows(2) {
        assert!((w[1] - w[0]).abs() / w[0] < 1e-6);
    }
}

#[test]
fn sweep_reports_bad_cells_in_band_and_is_deterministic() {
    let args = ["sweep", "--kappa", "4", "--tau", "1", "--rho-range", "0.5:2:4", "--length-range", "1:9:5", "--jobs", "3"];
    let (code, first, _) = ekt(&args);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&first);
    assert_eq!(rows.len(), 20);
    let err = header.iter().position(|h| h == "error").unwrap();
    assert!(rows.iter().any(|r| r[err].starts_with("BergerPeriodExceeded")));
    assert!(rows.iter().any(|r| r[err].starts_with("InvalidRadius")));
    assert!(rows.iter().any(|r| r[err].is_empty()));
    // row-major order: the last axis (length) varies fastest
    assert_eq!(rows[0][6], "1");
    assert_eq!(rows[1][6], "3");
    let (_, single, _) = ekt(&args.map(|a| if a == "3" { "1" } else { a }));
    assert_eq!(first, single);
}

#[test]
fn capillary_examples() {
    let v = json(&["capillary", "--kappa", "-1", "--tau", "0.7", "--rho", "1.3"]);
    assert!(v["q"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(v["orthogonal"], true);

    let (code, out, _) = ekt(&["capillary", "--curve", "geodesic", "--kappa", "-1", "--tau", "0"]);
    assert_eq!(code, 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["s", "cos_gamma"]);
    assert!(column(&header, &rows, "cos_gamma").iter().all(|&c| c == 0.0));

    let v = json(&[
        "capillary", "--curve", "equidistant", "--kappa", "-1", "--tau", "0.5", "--y0", "1", "--r", "1.5", "--format",
        "json",
    ]);
    assert!(v["oscillation"].as_f64().unwrap() > 1e-3);
    assert_eq!(v["curve"], "Equidistant");

    let (code, _, err) = ekt(&["capillary", "--curve", "equidistant", "--kappa", "1", "--y0", "1", "--r", "1"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: InvalidExhaustionParams"), "{err}");
}

#[test]
fn geometry_check_examples() {
    let v = json(&["geometry-check", "--kappa", "0", "--tau", "0"]);
    for (k, r) in v["residuals"].as_object().unwrap() {
        if let Some(x) = r.as_f64() {
            if k != "richardson_order" {
                assert!(x < 1e-12, "{k} = {x}");
            }
        }
    }
    let v = json(&["geometry-check", "--kappa", "-1", "--tau", "0.7", "--seed", "42"]);
    assert_eq!(v["pass"], true);
    let v = json(&["geometry-check", "--kappa", "4", "--tau", "1"]);
    assert!(v["residuals"]["berger_periodicity"].as_f64().unwrap() < 1e-12);
}

#[test]
fn identical_config_gives_identical_output() {
    let a = ekt(&["geometry-check", "--kappa", "-0.5", "--tau", "1.2", "--seed", "7", "--samples", "8"]);
    let b = ekt(&["geometry-check", "--kappa", "-0.5", "--tau", "1.2", "--seed", "7", "--samples", "8"]);
    assert_eq!(a, b);
}

#[test]
fn numbers_carry_fifteen_significant_digits() {
    let (_, out, _) = ekt(&["critical-length", "--kappa", "-1", "--tau", "0.3", "--rho", "0.7"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let l0 = v["L0"].as_f64().unwrap();
    assert_eq!(format!("{l0:.14e}").parse::<f64>().unwrap(), l0);
    let text = out.lines().find(|l| l.contains("\"L0\"")).unwrap();
    let digits = text.chars().filter(|c| c.is_ascii_digit()).count() - 1;
    assert!(digits <= 15, "{text}");
}

#[test]
fn numeric_spectrum_reports_indices() {
    let v = json(&["numeric-spectrum", "--grid", "16x24", "--n-max", "4"]);
    let morse = v["morse_index"].as_u64().unwrap();
    let weak = v["weak_index"].as_u64().unwrap();
    assert!(weak <= morse && morse <= weak + 1);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 4);
    assert_eq!(v["certificate"]["certified"], true);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("ekt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("l0.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = ekt(&["critical-length", "--rho", "2", "--output", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["L0"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-13);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_uses_the_exit_code_contract() {
    let bin = env!("CARGO_BIN_EXE_ekt");
    let ok = Command::new(bin).args(["critical-length", "--rho", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["critical-length", "--kappa", "-1", "--r", "2.5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error: InvalidRadius:"));
    let fail = Command::new(bin).args(["verify", "--grid", "8x8", "--n-max", "3"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(3));
}
