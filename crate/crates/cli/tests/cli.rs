use std::path::PathBuf;
use std::process::{Command, Output};

use ves_core::families::ves_from_loglinear;
use ves_core::oracles::{verify_family, DERIVATIVE_TOL};
use ves_core::{FamilySpec, LogLinearParams};

const B: &str = "0.934369";
const C: &str = "1.191951";

fn a_fit() -> String {
    format!("{}", 0.773454f64.exp())
}

fn ves(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ves")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn fixture(name: &str, body: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn us_fit(extra: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = ["--a", &a_fit(), "--b", B, "--c", C].iter().map(|s| s.to_string()).collect();
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run(cmd: &str, args: Vec<String>) -> Output {
    let mut all = vec![cmd.to_string()];
    all.extend(args);
    ves(&all.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn eval_prints_twelve_significant_digits() {
    let o = ves(&["eval", "--family", "ves", "--psi", "1", "--lambda", "0", "--theta", "2", "--mu", "1", "--k", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0.500000000000\n");

    let o = ves(&["eval", "--family", "cd", "--A", "2", "--beta", "0.4", "--K", "8", "--L", "8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "16.0000000000\n");
}

#[test]
fn eval_usage_errors() {
    let o = ves(&["eval", "--family", "ves", "--psi", "1", "--lambda", "0", "--theta", "2", "--k", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--mu"));

    let o = ves(&[
        "eval", "--family", "ves", "--psi", "1", "--lambda", "0", "--theta", "2", "--mu", "1", "--b", "0.5", "--k", "1",
    ]);
    assert_eq!(code(&o), 2);

    let o = ves(&["eval", "--family", "cd", "--A", "2", "--beta", "0.4", "--k", "1", "--K", "1", "--L", "1"]);
    assert_eq!(code(&o), 2);

    let o = ves(&["eval", "--family", "cd", "--A", "2", "--beta", "0,4", "--k", "1"]);
    assert_eq!(code(&o), 2);

    let o = ves(&["eval", "--family", "ves", "--psi", "1", "--lambda", "0", "--theta", "2", "--mu", "1", "--k", "-1"]);
    assert_eq!(code(&o), 2);
}

fn synthetic_csv(price: &str, ln_a: f64, b: f64, c: f64, n: usize) -> String {
    let mut s = format!("period,y,k,{price}\n");
    for i in 0..n {
        let k = 1.5 + 0.4 * i as f64 + 0.1 * (i as f64).cos();
        let p = 0.3 + 0.05 * ((i * 5) % 11) as f64;
        let y = (ln_a + b * p.ln() + c * k.ln()).exp();
        s += &format!("{},{y},{k},{p}\n", 1930 + i);
    }
    s
}

fn estimates(out: &str) -> Vec<f64> {
    let line = out.lines().find(|l| l.starts_with("estimate")).unwrap();
    line.split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect()
}

#[test]
fn fit_recovers_noiseless_rental_relation() {
    let p = fixture("rental.csv", &synthetic_csv("r", 0.773454, 0.934369, 1.191951, 30));
    let o = ves(&["fit", p.to_str().unwrap(), "--relation", "rental"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e = estimates(&stdout(&o));
    for (got, want) in e.iter().zip([0.773454, 0.934369, 1.191951]) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    assert!(stdout(&o).contains("std error"));
}

#[test]
fn fit_flags_unit_sum_in_wage_relation() {
    let p = fixture("wage_unit.csv", &synthetic_csv("w", 0.3, 0.6, 0.4, 30));
    let o = ves(&["fit", p.to_str().unwrap(), "--relation", "wage", "--diagnose"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("b+c within 1e-6 of unity: marginal rate of substitution degenerates"));

    let p = fixture("wage_ok.csv", &synthetic_csv("w", 0.3, 0.6, 0.2, 30));
    let o = ves(&["fit", p.to_str().unwrap(), "--relation", "wage", "--diagnose"]);
    assert!(!stdout(&o).contains("degenerates"));
}

#[test]
fn fit_input_errors() {
    let p = fixture("three.csv", &synthetic_csv("r", 0.1, 0.5, 0.5, 3));
    let o = ves(&["fit", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("insufficient observations"));

    let p = fixture("bad.csv", "period,y,k,r\n1950,1.0,2.0,x\n");
    assert_eq!(code(&ves(&["fit", p.to_str().unwrap()])), 2);

    assert_eq!(code(&ves(&["fit", "/nonexistent/data.csv"])), 2);
}

fn parse_rows(out: &str) -> Vec<Vec<f64>> {
    out.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn trajectory_of_us_fit() {
    let o = run("trajectory", us_fit(&["--xi", "-3.79", "--k-from", "2.0799", "--k-to", "50", "--points", "200"]));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "k,y,R,R_prime,sigma,sigma_prime");
    let rows = parse_rows(&out);
    assert_eq!(rows.len(), 200);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][4] > w[0][4]));
    let last = rows.last().unwrap()[4];
    assert!(last < 0.934369 / 1.191951 && last > 0.6, "sigma(50) = {last}");

    // The emitted points pass the finite-difference check.
    let p = LogLinearParams::new(0.773454f64.exp(), 0.934369, 1.191951, -3.79).unwrap();
    let spec = FamilySpec::Ves(ves_from_loglinear(&p).unwrap());
    let ks: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert!(verify_family(&spec, &ks, DERIVATIVE_TOL).unwrap().passed);
}

#[test]
fn trajectory_clips_and_rejects() {
    let o = run("trajectory", us_fit(&["--xi", "-3.79", "--k-from", "1", "--k-to", "10", "--points", "20"]));
    assert_eq!(code(&o), 0);
    let rows = parse_rows(&stdout(&o));
    assert!(rows[0][0] > 2.077 && rows[0][2] > 0.0);

    let o = run("trajectory", us_fit(&["--xi", "-3.79", "--k-from", "1", "--k-to", "2.07"]));
    assert_eq!(code(&o), 2);

    let o = ves(&[
        "trajectory",
        "--family",
        "ces",
        "--gamma",
        "1",
        "--delta",
        "0.3",
        "--sigma",
        "1.7",
        "--k-from",
        "0.1",
        "--k-to",
        "10",
    ]);
    assert_eq!(code(&o), 0);
    assert!(parse_rows(&stdout(&o)).iter().all(|r| r[4] == 1.7));
}

#[test]
fn regime_reports() {
    let o = run("regime", us_fit(&["--xi", "-3.79"]));
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("case iii, limit 0.78"), "{out}");
    assert!(out.trim_end().ends_with("increasing"));

    let o = ves(&["regime", "--a", "1", "--b", "0.9", "--c", "0.5", "--xi", "-1"]);
    assert_eq!(stdout(&o), "case ii, limit 1.00000000000, increasing\n");

    let o = ves(&["regime", "--a", "1", "--b", "0.6", "--c", "1", "--xi", "-1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("use reduce: CES with sigma=b"));
}

#[test]
fn calibrate_xi_at_reference_k0() {
    let o = run("calibrate-xi", us_fit(&["--k0", "2.0799"]));
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let xi: f64 = out.lines().next().unwrap().parse().unwrap();
    assert!((xi + 3.79).abs() <= 0.01, "{xi}");
    assert!(out.contains("criterion: R(k0) = 0"));

    let o = run("calibrate-xi", us_fit(&["--k0", "1"]));
    let other: f64 = stdout(&o).lines().next().unwrap().parse().unwrap();
    assert!((other - xi).abs() > 0.1);
    assert!(stdout(&o).contains("criterion"));

    let o = ves(&["calibrate-xi", "--a", "2", "--b", "0.5", "--c", "1", "--k0", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reduce_special_cases() {
    let o = ves(&["reduce", "--a", "2", "--b", "0", "--c", "0.4"]);
    assert_eq!(stdout(&o), "cobb-douglas: A = 2.00000000000, beta = 0.400000000000\n");

    let o = ves(&["reduce", "--a", "2", "--b", "0.6", "--c", "1", "--xi", "-1"]);
    assert!(stdout(&o).starts_with("ces: "));
    assert!(stdout(&o).contains("sigma = 0.600000000000"));

    let o = run("reduce", us_fit(&["--xi", "-3.79"]));
    assert!(stdout(&o).starts_with("ves: lambda = -0.745203"));
}

#[test]
fn verify_suites_and_exit_codes() {
    let o = ves(&["verify", "--suite", "ode"]);
    assert_eq!(code(&o), 0);
    let rel: f64 =
        stdout(&o).split("max rel error ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(rel < 1e-9);

    let o = ves(&["verify", "--suite", "equivalence", "--a", "1", "--b", "0.5", "--c", "0.2", "--xi", "-1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let fam = us_fit(&["--xi", "-3.79"]);
    let mut args = vec!["--suite".to_string(), "family".to_string()];
    args.extend(fam.clone());
    assert_eq!(code(&run("verify", args.clone())), 0);
    args.extend(["--corrupt-sigma".to_string(), "1.001".to_string()]);
    let o = run("verify", args);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));

    let o = ves(&[
        "verify",
        "--suite",
        "sato-hoffman",
        "--gamma",
        "1",
        "--delta",
        "0.5",
        "--rho",
        "0.5",
        "--k-from",
        "0.01",
        "--k-to",
        "1.49",
    ]);
    assert_eq!(code(&o), 0);
    let o = ves(&[
        "verify",
        "--suite",
        "sato-hoffman",
        "--gamma",
        "1",
        "--delta",
        "0.5",
        "--rho",
        "0.5",
        "--k-from",
        "0.1",
        "--k-to",
        "1.6",
    ]);
    assert_eq!(code(&o), 2);

    assert_eq!(
        code(&ves(&["verify", "--suite", "reduction", "--a", "1.5", "--b", "0.6", "--c", "1", "--xi", "-1"])),
        0
    );
    assert_eq!(code(&ves(&["verify", "--suite", "bogus"])), 2);
}

#[test]
fn output_is_deterministic() {
    let args = us_fit(&["--xi", "-3.79", "--k-from", "2.1", "--k-to", "100", "--points", "64"]);
    let (a, b) = (run("trajectory", args.clone()), run("trajectory", args));
    assert_eq!(a.stdout, b.stdout);
}
