//! End-to-end tests spawning the real binary: output shapes, frozen example
//! values, and the exit-code contract (0 holds, 1 fails, 2 input error,
//! 3 precision exhausted).

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use padic_dynamics::json as enc;
use padic_dynamics::series::Series;
use padic_dynamics::zq::Ring;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-dynamics"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("padic-cli-{}-{}", std::process::id(), name));
    path
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
}

#[test]
fn missing_command_is_input_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fg_build_multiplicative_law() {
    let out = run(&[
        "fg-build", "--p", "3", "--f", "1", "--precN", "12", "--precT", "10", "--frob",
        "(1+T)^3-1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let triangle = v["law"]["triangle"].as_array().unwrap();
    // X + Y + XY and nothing else
    assert_eq!(triangle[1][0], serde_json::json!([1]));
    assert_eq!(triangle[1][1], serde_json::json!([1]));
    assert_eq!(triangle[2][1], serde_json::json!([1]));
    for (d, row) in triangle.iter().enumerate() {
        for (i, c) in row.as_array().unwrap().iter().enumerate() {
            if (d, i) != (1, 0) && (d, i) != (1, 1) && (d, i) != (2, 1) {
                assert_eq!(c, &serde_json::json!([0]), "coefficient ({d},{i})");
            }
        }
    }
    assert_eq!(v["law"]["ring"]["precN"], serde_json::json!(12));
    assert_eq!(v["axioms"]["associative"], serde_json::json!(true));
}

#[test]
fn fg_build_with_endos_and_alpha() {
    let out = run(&[
        "fg-build", "--p", "3", "--precN", "6", "--precT", "8", "--frob", "(1+T)^3-1",
        "--endos", "2;3", "--alpha", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["alpha"], serde_json::json!("3"));
    let two = v["endos"]["2"]["coeffs"].as_array().unwrap();
    assert_eq!(two[1], serde_json::json!([2]));
    assert_eq!(two[2], serde_json::json!([1]));
    // [3] = f itself for the multiplicative series
    let three = v["endos"]["3"]["coeffs"].as_array().unwrap();
    assert_eq!(three[1], serde_json::json!([3]));
    assert_eq!(three[3], serde_json::json!([1]));
}

#[test]
fn frob_json_file_reaches_extension_ring_coefficients() {
    // f = 3w T + T^3 with w a Teichmuller generator: not spellable as a
    // literal, so it arrives as a series file at generous precision
    let m = 8;
    let wide = Ring::new(3, 2, &[1, 0, 1], 30).unwrap();
    let omega = wide.teichmuller(&(wide.generator() + wide.one()));
    let pi = wide.integer(3) * omega;
    let f = Series::monomial(&pi, 1, m).add(&Series::monomial(&wide.one(), 3, m));
    let path = fixture_path("twisted-frob.json");
    std::fs::write(
        &path,
        serde_json::to_string(&enc::series_to_value(&f)).unwrap(),
    )
    .unwrap();
    let out = run(&[
        "fg-build", "--p", "3", "--f", "2", "--modulus", "1,0,1", "--precN", "4", "--precT",
        "8", "--twist", "2", "--frob-json", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["frob"]["q"], serde_json::json!(3));
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("residual 0"), "summary: {summary}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn explicit_modulus_flag_is_honored() {
    let out = run(&[
        "fg-endo", "--p", "3", "--f", "2", "--modulus", "1,0,1", "--precN", "4", "--precT",
        "10", "--twist", "2", "--frob", "3*T+T^3", "--a", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["endo"]["ring"]["modulus"], serde_json::json!([1, 0, 1]));
    assert_eq!(v["endo"]["coeffs"][1], serde_json::json!([2, 0]));
}

#[test]
fn fg_endo_doubling_is_binomial() {
    let out = run(&[
        "fg-endo", "--p", "5", "--precN", "8", "--precT", "9", "--frob", "(1+T)^5-1", "--a", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let coeffs = v["endo"]["coeffs"].as_array().unwrap();
    assert_eq!(coeffs[1], serde_json::json!([2]));
    assert_eq!(coeffs[2], serde_json::json!([1]));
    assert_eq!(coeffs[3], serde_json::json!([0]));
}

#[test]
fn commutant_of_cube() {
    let out = run(&[
        "commutant", "--p", "3", "--precN", "6", "--precT", "10", "--series", "(1+T)^3-1", "--c",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let coeffs = v["commutant"]["coeffs"].as_array().unwrap();
    assert_eq!(coeffs[1], serde_json::json!([2]));
    assert_eq!(coeffs[2], serde_json::json!([1]));
    assert_eq!(coeffs[3], serde_json::json!([0]));
    assert_eq!(v["commutant"]["ring"]["precN"], serde_json::json!(6));
}

#[test]
fn log_of_multiplicative_series() {
    let out = run(&[
        "log", "--p", "3", "--precN", "6", "--precT", "8", "--series", "(1+T)^3-1",
        "--eff-prec", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let coeffs = v["log"]["coeffs"].as_array().unwrap();
    // T - T^2/2 + T^3/3 - ...: unit at T^1 is 1, at T^3 the denominator is 3
    assert_eq!(coeffs[1]["denomExp"], serde_json::json!(0));
    assert_eq!(coeffs[1]["unit"], serde_json::json!([1]));
    assert_eq!(coeffs[3]["denomExp"], serde_json::json!(1));
}

#[test]
fn root_profile_cyclotomic() {
    let out = run(&[
        "root-profile", "--p", "3", "--precN", "6", "--precT", "12", "--series", "(1+T)^3-1",
        "--n", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(
        v["profile"],
        serde_json::json!([{"multiplicity": 2, "slope": [-1, 2]}])
    );
}

#[test]
fn condense_with_samples() {
    let out = run(&[
        "condense", "--p", "3", "--precN", "8", "--precT", "16", "--frob", "(1+T)^3-1", "--w",
        "1;-1", "--samples", "2;3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    // R = -T^2 + T^3 - ... : leading coefficient -1 mod 3^8
    let r_coeffs = v["R"]["coeffs"].as_array().unwrap();
    assert_eq!(r_coeffs[2], serde_json::json!([6560]));
    assert_eq!(r_coeffs[3], serde_json::json!([1]));
    // Gamma_2 = 4T - T^2
    let gamma2 = v["gamma"]["2"]["coeffs"].as_array().unwrap();
    assert_eq!(gamma2[1], serde_json::json!([4]));
    assert_eq!(gamma2[2], serde_json::json!([6560]));
    let laws = v["laws"].as_array().unwrap();
    assert!(laws.iter().all(|c| c["ok"] == serde_json::json!(true)));
}

#[test]
fn verify_lift_cyclotomic_datum_and_perturbation() {
    let ring = Ring::unramified(3, 1, 8).unwrap();
    let m = 10;
    let binomial = |e: u64| {
        let one = Series::monomial(&ring.one(), 0, m);
        let base = one.add(&Series::identity(&ring, m));
        let mut acc = one.clone();
        for _ in 0..e {
            acc = acc.mul(&base);
        }
        acc.sub(&one)
    };
    let datum = serde_json::json!({
        "P": enc::series_to_value(&binomial(3)),
        "members": {
            "2": enc::series_to_value(&binomial(2)),
            "4": enc::series_to_value(&binomial(4)),
            "5": enc::series_to_value(&binomial(5)),
        },
        "table": { "2,2": "4" },
    });
    let path = fixture_path("cyclo.json");
    std::fs::write(&path, serde_json::to_string(&datum).unwrap()).unwrap();
    let out = run(&["verify-lift", "--datum", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["allOk"], serde_json::json!(true));
    assert_eq!(v["etaValues"]["2"], serde_json::json!([2]));
    assert_eq!(v["etaValues"]["5"], serde_json::json!([5]));

    // perturb one member by T^2
    let perturbed = binomial(4).add(&Series::monomial(&ring.one(), 2, m));
    let datum = serde_json::json!({
        "P": enc::series_to_value(&binomial(3)),
        "members": {
            "2": enc::series_to_value(&binomial(2)),
            "4": enc::series_to_value(&perturbed),
        },
        "table": {},
    });
    std::fs::write(&path, serde_json::to_string(&datum).unwrap()).unwrap();
    let out = run(&["verify-lift", "--datum", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["allOk"], serde_json::json!(false));
    assert!(v["commutesWithP"]["4"]["firstFailingDegree"].is_number());
    std::fs::remove_file(&path).ok();
}

#[test]
fn semiconj_verify_and_perturbation() {
    let ring = Ring::unramified(3, 1, 8).unwrap();
    let m = 12;
    // Gamma_2 o R = R o [2] from the condensation identities
    let gamma2 = Series::from_integers(&ring, &[0, 4, -1], m);
    let mut r_series = Series::zero(&ring, m);
    for k in 2..m {
        let sign = if k % 2 == 0 { -1 } else { 1 };
        r_series = r_series.add(&Series::monomial(&ring.integer(sign), k, m));
    }
    let endo2 = Series::from_integers(&ring, &[0, 2, 1], m);
    let triple = serde_json::json!({
        "F": enc::series_to_value(&gamma2),
        "G": enc::series_to_value(&endo2),
        "h": enc::series_to_value(&r_series),
        "twist": 0,
    });
    let path = fixture_path("semiconj.json");
    std::fs::write(&path, serde_json::to_string(&triple).unwrap()).unwrap();
    let out = run(&["semiconj-verify", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["holds"], serde_json::json!(true));

    let broken = r_series.add(&Series::monomial(&ring.one(), 4, m));
    let triple = serde_json::json!({
        "F": enc::series_to_value(&gamma2),
        "G": enc::series_to_value(&endo2),
        "h": enc::series_to_value(&broken),
        "twist": 0,
    });
    std::fs::write(&path, serde_json::to_string(&triple).unwrap()).unwrap();
    let out = run(&["semiconj-verify", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["holds"], serde_json::json!(false));
    assert!(v["firstFailingDegree"].is_number());
    std::fs::remove_file(&path).ok();
}

#[test]
fn semiconj_solve_recovers_conjugator() {
    let ring = Ring::unramified(3, 1, 24).unwrap();
    let m = 10;
    let mut g = Series::monomial(&ring.integer(3), 1, m);
    g = g.add(&Series::monomial(&ring.one(), 3, m));
    let v_series = Series::from_integers(&ring, &[0, 1, 1], m);
    let v_inv = v_series.comp_inverse().unwrap();
    let f = v_inv.compose(&g.compose(&v_series).unwrap()).unwrap();
    let payload = serde_json::json!({
        "F": enc::series_to_value(&f),
        "G": enc::series_to_value(&g),
        "twist": 0,
    });
    let path = fixture_path("solve.json");
    std::fs::write(&path, serde_json::to_string(&payload).unwrap()).unwrap();
    let out = run(&["semiconj-solve", "--json", path.to_str().unwrap(), "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let stamped = v["meta"]["stampedPrecN"].as_u64().unwrap() as u32;
    let narrowed = v_inv.restamp(&ring.with_precision(stamped));
    let expected = enc::series_to_value(&narrowed);
    assert_eq!(v["h"], expected);
    std::fs::remove_file(&path).ok();
}

#[test]
fn seed_check_exit_codes() {
    let out = run(&[
        "seed-check", "--p", "3", "--precN", "4", "--precT", "12", "--series", "(1+T)^3-1",
        "--d", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["ok"], serde_json::json!(true));

    let out = run(&[
        "seed-check", "--p", "3", "--precN", "4", "--precT", "12", "--series", "T+T^3", "--d",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["ok"], serde_json::json!(false));
}

#[test]
fn malformed_json_reports_line_and_column() {
    let path = fixture_path("broken.json");
    std::fs::write(&path, "{\"P\": [1, 2,]}").unwrap();
    let out = run(&["verify-lift", "--datum", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line"), "diagnostic mentions the line: {stderr}");
    assert!(stderr.contains("column"), "diagnostic mentions the column: {stderr}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn unknown_flags_and_bad_series_are_input_errors() {
    let out = run(&["fg-build", "--p", "3", "--precN", "4"]);
    assert_eq!(out.status.code(), Some(2), "missing --precT/--frob");
    let out = run(&[
        "newton", "--p", "3", "--precN", "4", "--precT", "4", "--series", "(1+T",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("byte"), "parse error carries a position: {stderr}");
}

#[test]
fn exhausted_guard_budget_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-dynamics"))
        .args([
            "fg-build", "--p", "3", "--precN", "4", "--precT", "10", "--frob", "(1+T)^3-1",
        ])
        .env("PADIC_DYNAMICS_GUARD", "0")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn no_commutant_exits_one() {
    // (1+T)^3 - 1 + T^2 commutes with nothing of derivative 2 at this depth
    let out = run(&[
        "commutant", "--p", "3", "--precN", "8", "--precT", "8", "--series",
        "(1+T)^3-1+T^4", "--c", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("obstruction"), "stderr: {stderr}");
}

#[test]
fn output_file_roundtrip() {
    let path = fixture_path("out.json");
    let out = run(&[
        "newton", "--p", "3", "--precN", "5", "--precT", "4", "--series", "3+2*T+T^3", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["segments"][0]["slope"], serde_json::json!([-1, 1]));
    std::fs::remove_file(&path).ok();
}
