use std::fs;
use std::path::Path;

use num_complex::Complex64;
use secant_cli::format::decode_num;
use secant_cli::run;
use secant_core::cascade::{check_secant_condition, CascadeSpec};
use secant_core::passivity::{hinf_gain, secant_gain};
use secant_core::poly::RationalTransfer;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("secant").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cascade_file(dir: &Path, beta: f64, n: usize) -> String {
    let block = format!(r#"{{"type":"rational","num":[{beta}],"den":[1,1]}}"#);
    let body = format!(r#"{{"blocks":[{}]}}"#, vec![block; n].join(","));
    let p = dir.join(format!("cascade_{beta}_{n}.json"));
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn gain_worked_example() {
    let (code, out, _) = call(&["gain", "--num", "1,2", "--den", "1,1,1"]);
    assert_eq!(code, 0);
    assert!(out.contains("secant gain: 4 (approached as omega -> inf)"), "{out}");
    assert!(
        out.contains("hinf gain: 2.24834393795 at omega = 0.946384659501"),
        "{out}"
    );
    assert!(out.contains("num: 1,2\nden: 1,1,1"));
}

#[test]
fn gain_json_round_trips() {
    let (code, out, _) = call(&["gain", "--num", "1,2", "--den", "1,1,1", "--json", "--full"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let g = RationalTransfer::from_coeffs(&[1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
    let sec = secant_gain(&g).unwrap();
    let hinf = hinf_gain(&g).unwrap();
    for (key, cert) in [("secant_gain", &sec), ("hinf_gain", &hinf)] {
        let c = &v[key];
        assert_eq!(decode_num(&c["gamma"]).unwrap().to_bits(), cert.gamma.to_bits());
        assert_eq!(c["attained_at_infinity"], cert.attained_at_infinity);
        let cands: Vec<(f64, f64)> = c["candidates"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (decode_num(&p[0]).unwrap(), decode_num(&p[1]).unwrap()))
            .collect();
        assert_eq!(cands, cert.candidates);
    }
    // the ω → ∞ candidate travels as the string "inf"
    assert!(out.contains("\"inf\""));
    assert_eq!(v["inputs"]["num"][1], 2.0);
    assert_eq!(v["osp"]["is_osp"], true);
    assert_eq!(v["spr"]["is_spr"], true);
    assert_eq!(v["circle"]["passes"], true);
    assert_eq!(decode_num(&v["iqc_matrix"][0][1]), Some(2.0));
}

#[test]
fn unbounded_gain_json() {
    let (code, out, _) = call(&["gain", "--num", "1", "--den", "1,1,1", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(decode_num(&v["secant_gain"]["gamma"]), Some(f64::INFINITY));
    assert_eq!(v["secant_gain"]["unbounded"], "RelativeDegree");
}

#[test]
fn osp_but_not_spr_in_one_call() {
    let (code, out, _) = call(&["gain", "--num", "0,1", "--den", "1,1,1", "--full"]);
    assert_eq!(code, 0);
    assert!(out.contains("OSP: yes"), "{out}");
    assert!(out.contains("SPR: no"), "{out}");
    assert!(out.contains("secant gain: 1 "), "{out}");
}

#[test]
fn spr_command() {
    let (code, out, _) = call(&["spr", "--num", "1,2", "--den", "1,1,1"]);
    assert_eq!(code, 0);
    assert!(out.contains("SPR: yes"));
    let (_, out, _) = call(&["spr", "--num", "0,1", "--den", "1,1,1"]);
    assert!(out.contains("SPR: no (RealPartNotPositive)"));
}

#[test]
fn matrix_verdicts() {
    let (code, out, _) = call(&["matrix", "--alphas", "1,1,1", "--betas", "2,2,2"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: marginal (at secant boundary)"), "{out}");
    let (_, out, _) = call(&["matrix", "--alphas", "1,1,1", "--betas", "1.9,1.9,1.9"]);
    assert!(out.contains("verdict: stable"), "{out}");
    let (code, out, _) = call(&["matrix", "--alphas", "1,1,1", "--betas", "2.1,2.1,2.1"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: unstable"), "{out}");
    let (code, _, err) = call(&["matrix", "--alphas", "1,1", "--betas", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("differ in length"));
    let (code, _, _) = call(&["matrix", "--alphas", "1,-1", "--betas", "1,1"]);
    assert_eq!(code, 1);
}

#[test]
fn matrix_json() {
    let (_, out, _) = call(&["matrix", "--alphas", "1,1,1", "--betas", "2,2,2", "--json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["hurwitz"]["marginal"], true);
    assert_eq!(v["at_secant_boundary"], true);
    assert_eq!(v["char_poly"], serde_json::json!([9.0, 3.0, 3.0, 1.0]));
}

#[test]
fn cascade_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = call(&["cascade", "--spec", &cascade_file(dir.path(), 1.9, 3)]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("PASS: product 6.859 < threshold 8.000"));
    assert!(out.contains("closed-loop poles: stable"));
    let (code, out, _) = call(&["cascade", "--spec", &cascade_file(dir.path(), 2.1, 3)]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("FAIL: product 9.261 >= threshold 8.000"));
    assert!(out.contains("closed-loop poles: unstable"));
    let (_, out, _) = call(&["cascade", "--spec", &cascade_file(dir.path(), 5.0, 2)]);
    assert!(out.starts_with("PASS: product 25.000 < threshold inf"), "{out}");
}

#[test]
fn cascade_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = cascade_file(dir.path(), 1.3, 4);
    let (_, out, _) = call(&["cascade", "--spec", &path, "--json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let spec = CascadeSpec::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    let expect = check_secant_condition(&spec).unwrap();
    for (key, x) in [
        ("threshold", expect.threshold),
        ("product_gain", expect.product_gain),
        ("margin", expect.margin),
    ] {
        assert_eq!(decode_num(&v["secant"][key]).unwrap().to_bits(), x.to_bits(), "{key}");
    }
    assert_eq!(v["secant"]["passes"], expect.passes);
    assert_eq!(v["inputs"]["blocks"].as_array().unwrap().len(), 4);
    assert_eq!(v["closed_loop"]["stable"], true);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"blocks\": [").unwrap();
    for args in [
        vec!["gain", "--num", "x", "--den", "1,1"],
        vec!["gain", "--num", "1", "--den", "-1,1"],
        vec!["gain", "--num", "1,1", "--den", "1,1"],
        vec!["gain", "--num", "1,1", "--den", "2,3,1"],
        vec!["cascade", "--spec", bad.to_str().unwrap()],
        vec!["cascade", "--spec", "/nonexistent/spec.json"],
        vec![
            "nyquist", "--num", "1", "--den", "1,1", "--gamma", "-2", "--out", "/tmp/x",
        ],
        vec!["gain", "--num", "1"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("nyquist"));
}

fn read_csv(path: &Path) -> Vec<(f64, Complex64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega,re,im"));
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], Complex64::new(f[1], f[2]))
        })
        .collect()
}

#[test]
fn nyquist_reference_example() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("example");
    let (code, out, _) = call(&[
        "nyquist",
        "--num",
        "1,2",
        "--den",
        "1,1,1",
        "--out",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("circle |s - 2| <= 2: 0 of"), "{out}");
    let pts = read_csv(&stem.with_extension("csv"));
    assert!(pts.len() >= 2000);
    assert!(pts.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(pts.iter().all(|(_, z)| (z - 2.0).norm() <= 2.0 * (1.0 + 1e-9)));
    // tangency at high frequency
    let (_, last) = pts.last().unwrap();
    assert!(2.0 - (last - 2.0).norm() < 1e-2);
    let svg = fs::read_to_string(stem.with_extension("svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let root = doc.root_element();
    assert_eq!(root.attribute("width"), Some("800"));
    assert_eq!(root.attribute("viewBox"), Some("0 0 800 800"));
    assert_eq!(
        doc.descendants()
            .filter(|n| n.attribute("class") == Some("violation"))
            .count(),
        0
    );
}

#[test]
fn nyquist_marks_violations() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("tight.svg");
    let (code, _, _) = call(&[
        "nyquist",
        "--num",
        "1,2",
        "--den",
        "1,1,1",
        "--gamma",
        "3.9",
        "--out",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let pts = read_csv(&stem.with_extension("csv"));
    let expected = pts
        .iter()
        .filter(|(_, z)| (z - 1.95).norm() > 1.95 * (1.0 + 1e-9))
        .count();
    assert!(expected > 0);
    let svg = fs::read_to_string(&stem).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let marked = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("violation"))
        .count();
    assert_eq!(marked, expected);
}

#[test]
fn nyquist_first_order_is_its_circle() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("lag");
    let (code, _, _) = call(&["nyquist", "--num", "3", "--den", "2,1", "--out", stem.to_str().unwrap()]);
    assert_eq!(code, 0);
    for (_, z) in read_csv(&stem.with_extension("csv")) {
        assert!(((z - 0.75).norm() - 0.75).abs() < 1e-12);
    }
}

#[test]
fn nyquist_without_finite_gain_has_no_circle() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("rd2");
    let (code, out, _) = call(&[
        "nyquist",
        "--num",
        "1",
        "--den",
        "1,1,1",
        "--out",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("circle: none"));
    let svg = fs::read_to_string(stem.with_extension("svg")).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
}

fn scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_decaying_and_diverging() {
    let dir = tempfile::tempdir().unwrap();
    let blocks = |b: f64| vec![format!(r#"{{"type":"rational","num":[{b}],"den":[1,1]}}"#); 3].join(",");
    let ok = scenario(
        dir.path(),
        "ok.json",
        &format!(
            r#"{{"blocks":[{}],"input":{{"type":"pulse","amplitude":1,"width":1}},"T":20,"dt":0.01}}"#,
            blocks(1.5)
        ),
    );
    let out_dir = dir.path().join("ok");
    let (code, out, err) = call(&["simulate", "--scenario", &ok, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("PASS"));
    for f in ["u.csv", "y1.csv", "y2.csv", "y3.csv", "summary.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let y3 = secant_core::simulate::Signal::from_csv_str(&fs::read_to_string(out_dir.join("y3.csv")).unwrap()).unwrap();
    assert_eq!(y3.len(), 2001);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["diverged"], false);
    assert!(summary["assumption"].as_str().unwrap().contains("well-posedness"));

    let bad = scenario(
        dir.path(),
        "bad.json",
        &format!(
            r#"{{"blocks":[{}],"input":{{"type":"pulse","amplitude":1,"width":1}},"T":1000,"dt":0.01}}"#,
            blocks(2.1)
        ),
    );
    let out_dir = dir.path().join("bad");
    let (code, out, _) = call(&[
        "simulate",
        "--scenario",
        &bad,
        "--out",
        out_dir.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["diverged"], true);
    assert_eq!(v["secant"]["passes"], false);
}

#[test]
fn simulate_domain_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "dom.json",
        r#"{"blocks":[{"type":"mm","V":1,"K":0.1,"a":0.01},{"type":"rational","num":[1],"den":[1,1]}],
            "input":{"type":"step","amplitude":-5},"T":5,"dt":0.01}"#,
    );
    let (code, _, err) = call(&[
        "simulate",
        "--scenario",
        &s,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{err}");
}
