//! Black-box tests of the `digitweyl` binary: output schemas, exit codes,
//! determinism, and config handling.

use std::path::PathBuf;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_digitweyl");

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, &[])
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn digitweyl");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("stdout utf-8"),
        String::from_utf8(out.stderr).expect("stderr utf-8"),
    )
}

fn data_rows(stdout: &str) -> Vec<Vec<String>> {
    stdout
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn temp_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("digitweyl-test-{}-{stem}", std::process::id()))
}

// ------------------------------------------------------------------ sums

#[test]
fn full_range_sum_respects_the_trivial_bound() {
    let (code, out, err) =
        run(&["sum", "--poly", "root:3:2", "--set", "full", "--r", "10", "--ell", "1"]);
    assert_eq!(code, 0, "stderr: {err}");
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "formula_id,d,r,s,k,m,ell,q,a,sum_re,sum_im,magnitude,terms,envelope,ratio,elapsed_ms"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "full");
    assert_eq!(row[1], "1", "single coefficient means a linear polynomial");
    let magnitude: f64 = row[11].parse().unwrap();
    assert!(magnitude <= 1024.0, "|T| = {magnitude} exceeds the term count");
    let terms: u64 = row[12].parse().unwrap();
    assert_eq!(terms, 1024);
    assert_eq!(row[15], "0", "elapsed is masked without --timing");
}

#[test]
fn classical_sums_take_h_and_n() {
    let (code, out, _) = run(&[
        "sum", "--poly", "rat:1/7", "--set", "classical", "--h", "-2", "--n", "100",
    ]);
    assert_eq!(code, 0);
    let row = &data_rows(&out)[0];
    assert_eq!(row[0], "classical");
    assert_eq!(row[6], "-2", "h travels in the ell column");
    let magnitude: f64 = row[11].parse().unwrap();
    assert!(magnitude <= 100.0);

    // h = 0 is a domain error, not a usage error of the parser.
    let (code, _, err) = run(&[
        "sum", "--poly", "rat:1/7", "--set", "classical", "--h", "0", "--n", "100",
    ]);
    assert_eq!(code, 2, "stderr: {err}");

    // classical sums have no r.
    let (code, _, _) = run(&[
        "sum", "--poly", "rat:1/7", "--set", "classical", "--h", "1", "--n", "10", "--r", "5",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn json_format_emits_parsable_objects() {
    let (code, out, _) = run(&[
        "sum", "--poly", "0,0,root:3:2", "--set", "cong", "--r", "10", "--k", "0", "--m", "2",
        "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    let row = &v["rows"][0];
    assert_eq!(row["formula_id"], "cong-class");
    assert_eq!(row["r"], 10);
    assert!(row["magnitude"].is_f64());
    assert!(row["envelope"].is_null(), "no envelope requested");
}

#[test]
fn envelope_column_reports_formula_and_ratio() {
    let (code, out, _) = run(&[
        "sum", "--poly", "0,0,root:3:2", "--set", "cong", "--r", "12", "--k", "1", "--m", "3",
        "--ell", "2", "--formula", "cong", "--alpha-q", "auto",
    ]);
    assert_eq!(code, 0);
    let row = &data_rows(&out)[0];
    assert_eq!(row[0], "cong", "formula id replaces the family tag");
    assert!(!row[7].is_empty(), "q chosen automatically");
    assert!(!row[8].is_empty(), "numerator a recorded");
    let envelope: f64 = row[13].parse().unwrap();
    let ratio: f64 = row[14].parse().unwrap();
    assert!(envelope > 0.0 && ratio > 0.0);
}

// ------------------------------------------------------------ determinism

#[test]
fn output_is_identical_across_thread_counts() {
    let args = [
        "sum", "--poly", "0,0,root:3:2", "--set", "cong", "--r", "16", "--k", "1", "--m", "3",
        "--ell", "2", "--formula", "cong", "--alpha-q", "auto",
    ];
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut two = args.to_vec();
    two.extend(["--threads", "2"]);
    let (c1, o1, _) = run(&one);
    let (c2, o2, _) = run(&two);
    let (c3, o3, _) = run_env(&args, &[("DIGITWEYL_THREADS", "3")]);
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(o1, o2, "1 vs 2 threads");
    assert_eq!(o1, o3, "flag vs environment thread count");
}

// ------------------------------------------------------------- exit codes

#[test]
fn usage_errors_exit_two() {
    // unknown flag (clap)
    assert_eq!(run(&["table1", "--bogus"]).0, 2);
    // missing class parameter
    assert_eq!(run(&["sum", "--poly", "1", "--set", "fixed", "--r", "8"]).0, 2);
    // stray class parameter
    assert_eq!(run(&["sum", "--poly", "1", "--set", "full", "--r", "8", "--k", "1"]).0, 2);
    // --q and --alpha-q are mutually exclusive
    assert_eq!(
        run(&[
            "sum", "--poly", "0,0,root:3:2", "--set", "cong", "--r", "8", "--k", "0", "--m", "2",
            "--formula", "cong", "--q", "7", "--alpha-q", "auto",
        ])
        .0,
        2
    );
    // unsupported working precision
    assert_eq!(run(&["table1", "--B", "100"]).0, 2);
    // malformed coefficient names the polynomial
    let (code, _, err) = run(&["sum", "--poly", "0,xyz", "--set", "full", "--r", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("polynomial"), "stderr: {err}");
}

#[test]
fn resource_errors_exit_three() {
    // full range above the streaming cap
    let (code, _, err) = run(&["sum", "--poly", "root:3:2", "--set", "full", "--r", "40"]);
    assert_eq!(code, 3, "stderr: {err}");
    // mean-value tuple guard
    let (code, _, err) = run(&["mvt", "--d", "4", "--s", "3", "--N-list", "1000"]);
    assert_eq!(code, 3, "stderr: {err}");
}

// ----------------------------------------------------------------- config

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let path = temp_path("config");
    std::fs::write(&path, "B=192\nthreads=2\n# comment line\nformat=json\n").unwrap();
    let cfg = path.to_str().unwrap();

    let (code, out, _) = run(&["table1", "--config", cfg]);
    assert_eq!(code, 0);
    assert!(serde_json::from_str::<serde_json::Value>(&out).is_ok(), "file sets JSON format");

    let (code, out, _) = run(&["table1", "--config", cfg, "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("d,xi,one_minus_xi,rho0"), "flag overrides file");

    std::fs::remove_file(&path).ok();
}

#[test]
fn unknown_config_key_exits_two() {
    let path = temp_path("bad-config");
    std::fs::write(&path, "bogus=1\n").unwrap();
    let (code, _, err) = run(&["table1", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"), "stderr: {err}");
    std::fs::remove_file(&path).ok();
}

// ------------------------------------------------------------ subcommands

#[test]
fn table1_lists_the_eight_degrees() {
    let (code, out, _) = run(&["table1"]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 8);
    let degrees: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(degrees, ["3", "4", "5", "6", "7", "8", "9", "10"]);
}

#[test]
fn golden_convergent_denominators_are_fibonacci() {
    let (code, out, _) = run(&["convergents", "--alpha", "golden", "--count", "10"]);
    assert_eq!(code, 0);
    let qs: Vec<u64> = data_rows(&out).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(qs, [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]);
}

#[test]
fn scan_emits_one_row_per_step() {
    let (code, out, _) = run(&[
        "scan", "--poly", "0,0,root:3:2", "--set", "fixed", "--s-frac", "0.5",
        "--r-range", "8..12", "--r-step", "2",
    ]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 3);
    let rs: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(rs, ["8", "10", "12"]);
    let ss: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(ss, ["4", "5", "6"], "s = floor(0.5 r) tracks the sweep");
    // classical sums have no r to sweep
    let (code, _, _) = run(&[
        "scan", "--poly", "1", "--set", "classical", "--r-range", "8..12",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn verify_bounds_reports_a_fitted_constant() {
    let (code, out, _) = run(&[
        "verify-bounds", "--formula", "cong-simple", "--poly", "0,0,root:3:2",
        "--r-range", "8..12", "--r-step", "2",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("r,q,measured,envelope,ratio,trivial_ratio"));
    let fitted: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("# fitted_constant="))
        .expect("trailer present")
        .parse()
        .unwrap();
    assert!(fitted.is_finite() && fitted > 0.0);
    assert_eq!(data_rows(&out).len(), 3);
}

#[test]
fn discrepancy_reports_majorant_and_envelope() {
    let (code, out, _) = run(&[
        "discrepancy", "--poly", "0,0,root:3:2", "--set", "cong", "--r", "10",
        "--k", "0", "--m", "2", "--L", "32", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    assert_eq!(v["N"], 512);
    assert!(v["D"].as_f64().unwrap() > 0.0);
    assert!(v["etk"].as_f64().unwrap() >= v["D"].as_f64().unwrap());
    assert!(v["envelope"].is_f64(), "congruence class under a cubic has an envelope");
    assert!(v["ratios"]["measured_over_etk"].is_f64());
}

#[test]
fn discrepancy_sweep_writes_an_svg_plot() {
    let path = temp_path("plot.svg");
    let (code, out, _) = run(&[
        "discrepancy", "--poly", "0,0,root:3:2", "--set", "full",
        "--r-range", "6..10", "--r-step", "2", "--L", "16",
        "--svg", path.to_str().unwrap(), "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    assert_eq!(v.as_array().map(Vec::len), Some(3), "one entry per r");
    let svg = std::fs::read_to_string(&path).expect("plot written");
    assert!(svg.starts_with("<svg"), "self-contained SVG root element");
    assert!(svg.contains("</svg>"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn mvt_table_carries_its_trailers() {
    let (code, out, _) = run(&["mvt", "--d", "2", "--s", "2", "--N-list", "4,8,16"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("d,s,n,j,envelope,ratio"));
    assert!(out.contains("# critical_exponent=3"));
    assert!(out.contains("# max_ratio="));
    assert!(out.contains("# ratio_flat="));
}

#[test]
fn shallow_selftest_passes() {
    let (code, out, _) = run(&["selftest"]);
    assert_eq!(code, 0);
    assert!(out.contains("selftest: PASS"), "stdout: {out}");
}
