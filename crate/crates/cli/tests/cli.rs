use std::fs;
use std::process::{Command, Output};

fn borwein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_borwein")).args(args).output().expect("spawn borwein")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(borwein(&[]).status.code(), Some(2));
    assert_eq!(borwein(&["bounds"]).status.code(), Some(2));
    assert_eq!(borwein(&["triple", "--n", "x"]).status.code(), Some(2));
    let out = borwein(&["ineq", "--id", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("region"));
}

#[test]
fn version_flag() {
    let out = borwein(&["--version"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), format!("borwein {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn triple_altsum_at_two() {
    let out = borwein(&["triple", "--n", "2", "--method", "altsum"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("B_2(q) = 1 + q + q^3"), "{text}");
    assert!(text.contains("C_2(q) = 1 + q^2 + q^3"), "{text}");
    let json: serde_json::Value =
        serde_json::from_slice(&borwein(&["--json", "triple", "--n", "2", "--family", "b"]).stdout).unwrap();
    assert_eq!(json["config"]["n"], 2);
}

#[test]
fn methods_agree() {
    let runs: Vec<String> = ["quotient", "andrews", "altsum"]
        .iter()
        .map(|m| stdout(&borwein(&["triple", "--n", "9", "--method", m])))
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn uniform_table_csv() {
    let out = borwein(&["bounds", "--table1"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "family,eps0,eps1,eps2,eps3,total\n\
         D,0.544,0.197,0.237,0.004,0.982\n\
         E,0.544,0.046,0.266,0.008,0.864\n\
         F,0.544,0.046,0.266,0.008,0.864\n"
    );
}

#[test]
fn bounds_json_certificate() {
    let out = borwein(&["--json", "bounds", "--n", "7001", "--m", "7001", "--family", "e"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let b = &v["budgets"][0];
    assert_eq!(b["valid"], true);
    assert!(b["total"].as_f64().unwrap() <= 0.864);
    assert!(b["log_lower_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn ineq_beta_passes() {
    let out = borwein(&["ineq", "--id", "beta"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{text}");
}

#[test]
fn verify_emit_and_resume_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let (ckpt, full, resumed) = (p("run.ckpt"), p("full.json"), p("resumed.json"));
    let base = ["verify", "--max-n", "25", "--threads", "2", "--checkpoint-every", "4"];

    let out = borwein(&[&base[..], &["--emit", &full]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for stop in ["3", "9", "14"] {
        let out = borwein(&[&base[..], &["--checkpoint", &ckpt, "--stop-after", stop]].concat());
        assert!(out.status.success());
        assert!(fs::metadata(&ckpt).is_ok());
    }
    let out = borwein(&[&base[..], &["--checkpoint", &ckpt, "--emit", &resumed]].concat());
    assert!(out.status.success());
    let (a, b) = (fs::read(&full).unwrap(), fs::read(&resumed).unwrap());
    let (va, vb): (serde_json::Value, serde_json::Value) =
        (serde_json::from_slice(&a).unwrap(), serde_json::from_slice(&b).unwrap());
    // the embedded run config records the checkpoint path, the certificate must not differ
    assert_eq!(va["certificate"], vb["certificate"]);
    assert_eq!(va["certificate"]["status"], "zero-found");
    assert_eq!(va["certificate"]["entries"].as_array().unwrap().len(), 25);
}

#[test]
fn verify_rejects_corrupt_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("bad.ckpt");
    fs::write(&ckpt, b"garbage").unwrap();
    let out = borwein(&["verify", "--max-n", "5", "--checkpoint", ckpt.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--json", "verify", "--max-n", "12"][..],
        &["--json", "saddle", "--n", "500", "--m", "700"],
        &["ineq", "--id", "sinh-ratio", "--samples", "2000", "--seed", "5"],
        &["limit", "--family", "e", "--terms", "40"],
    ] {
        let (a, b) = (borwein(args), borwein(args));
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn export_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b2.csv");
    let out = borwein(&["export", "--n", "2", "--family", "b", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&path).unwrap(), "exponent,coefficient\n0,1\n1,1\n3,1\n");
}

#[test]
fn bressoud_matches_altsum() {
    let a = borwein(&["bressoud", "--m", "4", "--n", "4", "--k", "3", "--alpha", "5/3", "--beta", "4/3"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let via_triple = stdout(&borwein(&["triple", "--n", "4", "--family", "a"]));
    assert_eq!(format!("A_4(q) = {}", stdout(&a).trim()), via_triple.trim());
}

#[test]
fn dump_curve_rows() {
    let out = borwein(&["dump-curve", "--n", "20", "--j", "1", "--family", "d", "--r", "0.9", "--points", "11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 12);
    assert!(rows[1..].iter().all(|r| r.split(',').count() == 2));
}
