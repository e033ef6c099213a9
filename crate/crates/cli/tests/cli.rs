//! End-to-end tests of the `finite-hgf` binary: output schemas, exit codes,
//! error reporting, and agreement with the library computing the same values.

use std::process::{Command, Output};
use std::sync::Arc;

use finite_hgf_core::chars::parse_mult_char;
use finite_hgf_core::gf::FieldDescriptor;
use finite_hgf_core::hgf::HgfEvaluator;
use finite_hgf_core::{AddChar, CycloNum, FiniteField, HgfSpec, SumTables};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_finite-hgf"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn field_info_reports_descriptor() {
    let out = run(&["field-info", "--q", "9"]);
    assert_eq!(code(&out), 0);
    let d: FieldDescriptor = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!((d.p, d.f, d.q), (3, 2, 9));
    assert_eq!(d.modulus.len(), 3);
    assert_eq!(*d.modulus.last().unwrap(), 1);

    let out = run(&["field-info", "--p", "5", "--f", "1"]);
    let d: FieldDescriptor = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(d.generator, 2);
}

#[test]
fn field_info_rejects_non_prime_power() {
    let out = run(&["field-info", "--q", "12"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("prime power"));
}

#[test]
fn missing_field_selection_is_usage_error() {
    let out = run(&["field-info"]);
    assert_eq!(code(&out), 2);
    let out = run(&["field-info", "--p", "5"]);
    assert_eq!(code(&out), 2, "--p without --f must be rejected");
}

#[test]
fn explicit_modulus_is_accepted() {
    // x^2 + 2x + 2 over GF(3): irreducible but not the default choice.
    let out = run(&["field-info", "--p", "3", "--f", "2", "--modulus", "2,2,1"]);
    assert_eq!(code(&out), 0);
    let d: FieldDescriptor = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(d.modulus, vec![2, 2, 1]);

    let out = run(&["field-info", "--p", "3", "--f", "2", "--modulus", "1,0,1,0"]);
    assert_eq!(code(&out), 2, "wrong-length modulus must be rejected");
}

#[test]
fn gauss_of_trivial_character_is_one() {
    let out = run(&["gauss", "--q", "7", "--chi", "0"]);
    assert_eq!(code(&out), 0);
    let v: CycloNum = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v, CycloNum::one());
}

#[test]
fn gauss_matches_library_including_psi_shift() {
    let out = run(&["gauss", "--q", "7", "--chi", "2", "--psi-shift", "3"]);
    assert_eq!(code(&out), 0);
    let got: CycloNum = serde_json::from_str(&stdout_str(&out)).unwrap();

    let field = Arc::new(FiniteField::from_order(7).unwrap());
    let psi = AddChar::new(&field, field.elem(3).unwrap()).unwrap();
    let tables = SumTables::with_psi(field.clone(), psi);
    assert_eq!(got, *tables.gauss(tables.chi(2)));
}

#[test]
fn jacobi_matches_library() {
    let out = run(&["jacobi", "--q", "9", "--chi", "1", "--chi2", "3"]);
    assert_eq!(code(&out), 0);
    let got: CycloNum = serde_json::from_str(&stdout_str(&out)).unwrap();

    let field = Arc::new(FiniteField::from_order(9).unwrap());
    let tables = SumTables::new(field);
    assert_eq!(got, tables.jacobi(tables.chi(1), tables.chi(3)));
}

#[test]
fn eval_of_0f0_at_one_is_psi_of_minus_one() {
    let out = run(&["eval", "--q", "3", "--num", "none", "--den", "eps", "--lambda", "1"]);
    assert_eq!(code(&out), 0);
    let parsed: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let value: CycloNum = serde_json::from_value(parsed["value"].clone()).unwrap();
    // Tr(−1) = 2 in GF(3), so ψ(−1) = ζ₃².
    assert_eq!(value, CycloNum::root_of_unity(3, 2));
}

#[test]
fn eval_output_roundtrips_through_json() {
    let out = run(&[
        "eval", "--q", "7", "--num", "chi:1,chi:2", "--den", "eps,chi:3", "--lambda", "4",
    ]);
    assert_eq!(code(&out), 0);
    let parsed: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let value: CycloNum = serde_json::from_value(parsed["value"].clone()).unwrap();
    let spec: HgfSpec = serde_json::from_value(parsed["spec"].clone()).unwrap();
    let lambda = parsed["lambda"].as_u64().unwrap();

    let field = Arc::new(FiniteField::from_order(7).unwrap());
    let tables = SumTables::new(field.clone());
    let ev = HgfEvaluator::new(&tables, &spec);
    assert_eq!(value, ev.eval(field.elem(lambda).unwrap()));
}

#[test]
fn negative_lambda_embeds_through_prime_field() {
    let a = run(&["eval", "--q", "7", "--num", "phi", "--den", "eps", "--lambda", "-1"]);
    let b = run(&["eval", "--q", "7", "--num", "phi", "--den", "eps", "--lambda", "6"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout_str(&a), stdout_str(&b));
}

#[test]
fn malformed_character_is_usage_error() {
    let out = run(&["eval", "--q", "7", "--num", "chi:x", "--den", "eps", "--lambda", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("chi:x"));
}

#[test]
fn f4_matches_library() {
    let out = run(&[
        "f4", "--q", "5", "--alpha", "1", "--beta", "2", "--gamma", "1", "--gamma2", "3",
        "--x", "2", "--y", "3",
    ]);
    assert_eq!(code(&out), 0);
    let parsed: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let value: CycloNum = serde_json::from_value(parsed["value"].clone()).unwrap();

    let field = Arc::new(FiniteField::from_order(5).unwrap());
    let tables = SumTables::new(field.clone());
    let expected = finite_hgf_core::hgf::appell_f4(
        &tables,
        tables.chi(1),
        tables.chi(2),
        tables.chi(1),
        tables.chi(3),
        field.elem(2).unwrap(),
        field.elem(3).unwrap(),
    );
    assert_eq!(value, expected);
}

#[test]
fn table_matches_conjugate_character_of_one_minus_lambda() {
    // ₁F₀(φ; λ) = φ̄(1−λ) for λ ≠ 0; the λ = 0 row vanishes by χ(0) = 0.
    let out = run(&["table", "--q", "5", "--num", "phi", "--den", "eps"]);
    assert_eq!(code(&out), 0);
    let parsed: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rows = parsed["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);

    let field = Arc::new(FiniteField::from_order(5).unwrap());
    let phi_bar = parse_mult_char("phi", &field).unwrap().conj();
    for row in rows {
        let lambda = row["lambda"].as_u64().unwrap();
        let value: CycloNum = serde_json::from_value(row["value"].clone()).unwrap();
        let expected = if lambda == 0 {
            CycloNum::zero()
        } else {
            let x = field.sub(field.one(), field.elem(lambda).unwrap());
            phi_bar.eval(&field, x)
        };
        assert_eq!(value, expected, "row lambda = {lambda}");
    }
    let l0: CycloNum = serde_json::from_value(rows[0]["value"].clone()).unwrap();
    let l1: CycloNum = serde_json::from_value(rows[1]["value"].clone()).unwrap();
    assert!(l0.is_zero() && l1.is_zero());
}

#[test]
fn csv_cells_hold_requoted_json() {
    let out = run(&["table", "--q", "5", "--num", "phi", "--den", "eps", "--format", "csv"]);
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,value"));
    let row = lines.next().unwrap();
    let (lambda, cell) = row.split_once(',').unwrap();
    assert_eq!(lambda, "0");
    assert!(cell.starts_with('"') && cell.ends_with('"'));
    let inner = cell[1..cell.len() - 1].replace("\"\"", "\"");
    let v: CycloNum = serde_json::from_str(&inner).unwrap();
    assert!(v.is_zero());
}

#[test]
fn text_format_prints_marked_approximation() {
    let out = run(&["gauss", "--q", "5", "--chi", "1", "--format", "text"]);
    let text = stdout_str(&out);
    assert!(text.contains("(approximate)"));
    // 12 significant digits: scientific mantissa with 11 decimal places.
    assert!(text.contains("e0") || text.contains("e-") || text.contains("e1"));
}

#[test]
fn verify_skipped_field_warns_and_exits_zero() {
    let out = run(&["verify", "--q", "4", "--ids", "THM-B4"]);
    assert_eq!(code(&out), 0);
    assert!(stderr_str(&out).contains("p = 2"));
    let reports: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let r = &reports.as_array().unwrap()[0];
    assert_eq!(r["skip_reason"], "p = 2");
    assert_eq!(r["tuples_enumerated"], 0);
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_passes_and_reports_counts() {
    let out = run(&["verify", "--q", "5", "--ids", "P6-EULER,CLOSED-G11", "--mode", "exhaustive"]);
    assert_eq!(code(&out), 0);
    let reports: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let arr = reports.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["identity"], "P6-EULER");
    assert_eq!(arr[0]["tuples_checked"], arr[0]["tuples_enumerated"]);
    assert_eq!(arr[0]["elapsed_ms"], 0, "timings are zeroed without --timings");
    assert!(arr[0].get("seed").is_none(), "no seed on exhaustive runs");
}

#[test]
fn verify_unknown_identity_is_usage_error() {
    let out = run(&["verify", "--q", "5", "--ids", "NOT-AN-ID"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("unknown identity"));
}

#[test]
fn verify_sampled_runs_are_reproducible() {
    let args = [
        "verify", "--q", "7", "--ids", "P6-EULER,THM-B3a,CLOSED-G11,PFAFF",
        "--mode", "sample", "--n", "50", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let reports: Value = serde_json::from_str(&stdout_str(&a)).unwrap();
    for r in reports.as_array().unwrap() {
        assert_eq!(r["seed"], 7);
    }
}

#[test]
fn verify_writes_report_file_matching_stdout() {
    let path = std::env::temp_dir().join(format!("finite-hgf-report-{}.json", std::process::id()));
    let out = run(&[
        "verify", "--q", "5", "--ids", "P2-SQUARE", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let file = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(file, stdout_str(&out));
}

#[test]
fn thread_overrides_are_validated() {
    let ok = run_env(&["verify", "--q", "5", "--ids", "P2-SQUARE"], &[("FINITE_HGF_THREADS", "1")]);
    assert_eq!(code(&ok), 0);
    let bad = run_env(&["verify", "--q", "5", "--ids", "P2-SQUARE"], &[("FINITE_HGF_THREADS", "abc")]);
    assert_eq!(code(&bad), 2);
    let flag = run(&["verify", "--q", "5", "--ids", "P2-SQUARE", "--threads", "2"]);
    assert_eq!(code(&flag), 0);
}
