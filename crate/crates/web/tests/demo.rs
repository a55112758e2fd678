use heun_web::{monodromy, profile, qnm_scan};
use serde_json::Value;

const BINOMIAL: &str = r#"{"a": [2, 0], "q": [12, 0], "alpha": [2, 0], "beta": [3, 0], "gamma": [3, 0], "epsilon": [0, 0]}"#;

fn ok(s: String) -> Value {
    let v: Value = serde_json::from_str(&s).unwrap();
    assert!(v.get("error").is_none(), "{s}");
    v["ok"].clone()
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn profile_tracks_closed_form_past_the_disc() {
    let req = format!(r#"{{"params": {BINOMIAL}, "to": [1.5, -0.5], "samples": 20, "tol": 1e-12}}"#);
    let v = ok(profile(&req));
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 20);
    assert!(samples[0]["series"].as_bool().unwrap());
    assert!(!samples[19]["series"].as_bool().unwrap());
    for s in samples {
        let (x, y) = c(&s["z"]);
        let one_minus = num_complex::Complex64::new(1.0 - x, -y);
        let want = one_minus.powi(-2);
        let (re, im) = c(&s["value"]);
        assert!((re - want.re).abs() < 1e-8 && (im - want.im).abs() < 1e-8, "{s}");
    }
}

#[test]
fn monodromy_eigenvalues_match_exponents() {
    let req = r#"{"params": {"a": [3, 0], "q": [0.4, 0.1], "alpha": [0.3, 0], "beta": [1.1, 0], "gamma": [0.45, 0], "epsilon": [0.7, 0]}, "around": "0", "tol": 1e-12}"#;
    let v = ok(monodromy(req));
    let mut got: Vec<(f64, f64)> = v["eigenvalues"].as_array().unwrap().iter().map(c).collect();
    let mut want: Vec<(f64, f64)> = v["exponents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let (re, im) = c(e);
            let w = (num_complex::Complex64::new(re, im) * num_complex::Complex64::new(0.0, std::f64::consts::TAU)).exp();
            (w.re, w.im)
        })
        .collect();
    let key = |p: &(f64, f64)| (p.1.atan2(p.0) * 1e6) as i64;
    got.sort_by_key(key);
    want.sort_by_key(key);
    for (g, w) in got.iter().zip(&want) {
        assert!((g.0 - w.0).abs() < 1e-8 && (g.1 - w.1).abs() < 1e-8, "{g:?} {w:?}");
    }
    assert!(v["abel_mismatch"].as_f64().unwrap() < 1e-8);
}

#[test]
fn scan_finds_fundamental_mode_and_reference() {
    let req = r#"{"ell": 2, "s": 2, "region": [0.3, 0.45, -0.15, -0.03], "grid": [12, 12], "tol": 1e-9}"#;
    let v = ok(qnm_scan(req));
    let modes = v["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 1);
    let reference = v["reference"].as_array().unwrap();
    assert_eq!(reference.len(), 1);
    let (a, b) = (c(&modes[0]["omega"]), c(&reference[0]));
    assert!((a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6);
    assert_eq!(v["grid"]["abs_d"].as_array().unwrap().len(), 12);
}

#[test]
fn errors_are_reported_as_json() {
    let bad_json: Value = serde_json::from_str(&profile("{")).unwrap();
    assert_eq!(bad_json["error"]["module"], "input");
    let singular = format!(r#"{{"params": {BINOMIAL}, "to": [2, 0], "samples": 10}}"#);
    let v: Value = serde_json::from_str(&profile(&singular)).unwrap();
    assert_eq!(v["error"]["module"], "continuation");
    let big = r#"{"ell": 2, "s": 2, "region": [0.3, 0.45, -0.15, -0.03], "grid": [200, 200]}"#;
    let v: Value = serde_json::from_str(&qnm_scan(big)).unwrap();
    assert_eq!(v["error"]["module"], "input");
    let tol = r#"{"ell": 2, "s": 2, "region": [0.3, 0.45, -0.15, -0.03], "tol": 1}"#;
    let v: Value = serde_json::from_str(&qnm_scan(tol)).unwrap();
    assert_eq!(v["error"]["module"], "input");
}
