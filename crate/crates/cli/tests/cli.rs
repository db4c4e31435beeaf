use std::process::{Command, Output};

use serde_json::Value;

fn dynheight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynheight"))
        .args(args)
        .env_remove("DYNHEIGHT_BITS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = dynheight(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn model_coefficients() {
    let v = json(&["model", "--p", "2", "--n", "2"]);
    let c: Vec<i64> = v["report"]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_i64().unwrap())
        .collect();
    assert_eq!(c, vec![-8, 2, -1, -2, 1]);
    assert_eq!(v["config"]["command"], "model");
}

#[test]
fn model_coefficients_stay_exact() {
    // F_4 for p = 3 has a constant term of -3^40, beyond 64 bits.
    let v = json(&["model", "--p", "3", "--n", "4"]);
    let c0 = v["report"]["coefficients"][0].to_string();
    assert_eq!(c0, "-12157665459056928801");
}

#[test]
fn heights_report_schema() {
    let v = json(&["heights", "--p", "2", "--n-max", "3"]);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for (i, r) in reports.iter().enumerate() {
        for key in ["p", "n", "count", "elapsed_ms"] {
            assert!(r[key].is_u64(), "{key}");
        }
        for key in ["avg_height", "bound", "limit", "max_residual"] {
            assert!(r[key].is_f64(), "{key}");
        }
        assert_eq!(r["n"].as_u64(), Some(i as u64 + 1));
        assert_eq!(r["count"].as_u64(), Some(1 << (i + 1)));
    }
    assert_eq!(v["config"]["n_max"], 3);
    assert_eq!(v["config"]["bits"], 128);
}

#[test]
fn reports_are_reproducible() {
    for args in [
        &["heights", "--p", "3", "--n-max", "3", "--no-timing"][..],
        &["pairing", "--p", "2", "--n", "6", "--no-timing"][..],
        &[
            "pairing",
            "--p",
            "5",
            "--method",
            "decomposition",
            "--no-timing",
        ][..],
        &["padic", "--p", "3", "--n", "3", "--leaves", "--no-timing"][..],
    ] {
        let a = dynheight(args);
        let b = dynheight(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let v = json(&["heights", "--p", "2", "--n-max", "2", "--no-timing"]);
    assert_eq!(v["reports"][1]["elapsed_ms"], 0);
}

#[test]
fn csv_headers() {
    let header = |args: &[&str]| {
        let out = dynheight(args);
        assert!(out.status.success());
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(
        header(&["heights", "--p", "2", "--n-max", "2", "--format", "csv"]),
        "n,avg_height,bound,limit,abs_error"
    );
    assert_eq!(
        header(&["padic", "--p", "2", "--n", "3", "--format", "csv"]),
        "address,mantissa_base_p,effective_precision"
    );
    assert_eq!(
        header(&["orbit", "--p", "2", "--n", "3", "--format", "csv"]),
        "address,re,im,residual"
    );
}

#[test]
fn heights_csv_sequence() {
    let out = dynheight(&["heights", "--p", "2", "--n-max", "10", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    let last: f64 = rows[9].split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - 0.69).abs() < 0.01);
}

#[test]
fn padic_splitting() {
    let v = json(&["padic", "--p", "2", "--n", "8", "--digits", "64"]);
    assert_eq!(v["report"]["count"], 256);
    assert_eq!(v["report"]["distinct"], true);
    assert_eq!(v["config"]["digits"], 64);
}

#[test]
fn exit_status_for_bad_input() {
    assert_eq!(
        dynheight(&["heights", "--p", "4", "--n-max", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dynheight(&["heights", "--p", "2", "--n-max", "40"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dynheight(&["orbit", "--p", "2", "--n", "2", "--bits", "16"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dynheight(&["orbit", "--p", "2", "--n", "2", "--base-re", "1/0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dynheight(&[
            "pairing",
            "--p",
            "2",
            "--method",
            "decomposition",
            "--samples",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    let out = dynheight(&["model", "--p", "2", "--n", "12", "--max-degree", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn green_at_points() {
    let v = json(&["green", "--p", "2", "--re", "3"]);
    assert_eq!(v["report"]["status"], "bounded-certified");
    assert_eq!(v["report"]["value"].as_f64(), Some(0.0));
    let v = json(&["green", "--p", "3", "--re", "-100000000", "--im", "1/2"]);
    let g = v["report"]["value"].as_f64().unwrap();
    assert!((g - (1e8f64.ln() - 3f64.ln() / 2.0)).abs() < 1e-6);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_dynheight"))
        .args(["green", "--p", "2", "--re", "5"])
        .env("DYNHEIGHT_BITS", "200")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["bits"], 200);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("dynheight-{}.json", std::process::id()));
    let out = dynheight(&[
        "model",
        "--p",
        "3",
        "--n",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["report"]["degree"], 3);
}

#[test]
fn orbit_export_round_trips() {
    let v = json(&[
        "orbit",
        "--p",
        "3",
        "--n",
        "2",
        "--base-re",
        "41/100",
        "--base-im",
        "37/100",
    ]);
    let leaves = v["leaves"].as_array().unwrap();
    assert_eq!(leaves.len(), 9);
    for l in leaves {
        let re: f64 = l["re"].as_str().unwrap().parse().unwrap();
        assert!(re.is_finite());
        assert!(l["residual"].as_f64().unwrap() < 1e-30);
    }
    assert_eq!(v["config"]["base_re"], "41/100");
}
