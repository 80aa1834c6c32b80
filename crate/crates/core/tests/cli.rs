use std::process::Command;

use mcycle::cli::{run, CmCycleReport, ConicReport, CycleReport, ErrorObject, NormReport, PairReport, SweepEntry};
use mcycle::cycle::RegulatorResult;
use mcycle::greens::{CrossCheckReport, GreensValue};
use mcycle::kummer::{BWCase, KummerConfig};
use mcycle::verify::VerifyReport;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["mcycle"];
    full.extend_from_slice(args);
    let (code, out) = run(full);
    let doc: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("not JSON ({e}): {out}"));
    (code, doc)
}

fn ok(args: &[&str]) -> Value {
    let (code, doc) = call(args);
    assert_eq!(code, 0, "{doc}");
    doc["result"].clone()
}

/// Parses the result into `T` and checks that re-serializing reproduces it.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &Value) -> T {
    let t: T = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(&serde_json::to_value(&t).unwrap(), v);
    let again: T = serde_json::from_value(serde_json::to_value(&t).unwrap()).unwrap();
    assert_eq!(again, t);
    t
}

fn tmp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("mcycle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn config_has_q45() {
    let r = ok(&["config", "--params", "2,3,5"]);
    let q45: Vec<String> = r["points"]["q45"].as_array().unwrap().iter().map(|c| c["rat"].as_str().unwrap().to_string()).collect();
    assert_eq!(q45, ["-1", "0", "2"]);
    let cfg: KummerConfig = round_trip(&r);
    assert_eq!(cfg.params.a3, mcycle::arith::QuadVal::from_int(5));
}

#[test]
fn humbert_checks() {
    assert_eq!(ok(&["humbert", "--params", "2,6,3", "--check", "4"]), serde_json::json!({"on_h4": true}));
    assert_eq!(ok(&["humbert", "--params", "2,3,5", "--check", "4"])["on_h4"], false);
    let h5 = ok(&["humbert", "--params", "2,3,5", "--check", "5"]);
    assert_eq!(h5["on_h5"], false);
    let (code, doc) = call(&["humbert", "--params", "2,3,5", "--check", "6"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--check");
}

#[test]
fn decimals_are_exact() {
    let a = ok(&["humbert", "--params", "0.5,1.5,3", "--check", "4"]);
    let b = ok(&["humbert", "--params", "1/2,3/2,3", "--check", "4"]);
    assert_eq!(a, b);
    assert_eq!(a["on_h4"], true);
}

#[test]
fn conic_and_cycle() {
    let c: ConicReport = round_trip(&ok(&["conic", "--params", "2,3,5"]));
    assert!(c.smooth);
    assert!(!c.printed_form_matches);
    let cy: CycleReport = round_trip(&ok(&["cycle", "--params", "2,6,3"]));
    assert!(cy.boundary_vanishes);
}

#[test]
fn regulator_round_trip() {
    let r: RegulatorResult = round_trip(&ok(&["regulator", "--a1", "2", "--a3", "3", "--precision", "40"]));
    assert_eq!(r.precision(), 40);
    assert!(r.log_abs.to_decimal(12).starts_with("2.896660164"));
}

#[test]
fn sweep_keeps_order_and_errors() {
    let file = tmp("sweep.txt", "# a1,a3\n2,3\n\n3,1/2\n");
    let r = ok(&["regulator-sweep", "--point", "2,1", "--input", &file, "--precision", "30"]);
    let entries: Vec<SweepEntry> = round_trip(&r);
    assert_eq!(entries.len(), 3);
    assert_eq!(entries.iter().map(|e| e.index).collect::<Vec<_>>(), [0, 1, 2]);
    assert!(entries[0].error.is_some());
    assert!(entries[1].result.is_some());
    let (code, doc) = call(&["regulator-sweep"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--point");
}

#[test]
fn ns_commands() {
    let p: PairReport = round_trip(&ok(&["ns", "pair", "--module", "zero", "--d1", "1,0", "--d2", "0,1"]));
    assert_eq!(p.pairing, mcycle::arith::Rat::one());
    let n: NormReport = round_trip(&ok(&["ns", "humbert-norm", "--module", "isogeny:3", "--d", "1,3,1"]));
    assert_eq!(n.humbert_norm, mcycle::arith::Rat::from(16));
    let c: CmCycleReport = round_trip(&ok(&["ns", "cm-cycle", "--disc", "-7"]));
    assert_eq!(c.self_pairing, mcycle::arith::Rat::from(-56));
    assert_eq!(c.signature, (1, 3, 0));
    let (code, doc) = call(&["ns", "cm-cycle", "--disc", "-12"]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "InvalidArgument");
    let (code, doc) = call(&["ns", "pair", "--module", "cm:-3", "--d1", "1,0,0,1", "--d2", "1,2,3,4,5"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--d2");
}

#[test]
fn greens_commands() {
    let g: GreensValue = round_trip(&ok(&["greens", "eval", "--z1", "0.1,1.2", "--z2", "-1/3,2", "--bound", "60"]));
    assert!(g.value_f64() < 0.0);
    let m = ok(&["greens", "eval", "--z1", "0.1,1.2", "--z2", "-1/3,2", "--bound", "60"]);
    let h1: GreensValue = round_trip(&ok(&["greens", "hecke", "--m", "1", "--z1", "0.1,1.2", "--z2", "-1/3,2", "--bound", "60"]));
    assert_eq!(serde_json::to_value(&h1).unwrap()["value"]["value"], m["value"]["value"]);
    let pp = tmp("pp.json", r#"{"coeffs": {"1": "1", "2": "-1/2"}}"#);
    let _: GreensValue = round_trip(&ok(&["greens", "combo", "--pp", &pp, "--j", "1", "--z1", "0.1,1.2", "--z2", "-1/3,2", "--bound", "40"]));
    let (code, doc) = call(&["greens", "eval", "--z1", "0,1", "--z2", "0,1"]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "OnSingularLocus");
    let (code, doc) = call(&["greens", "eval", "--z1", "0,-1", "--z2", "0,1"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--z1");
    let (code, doc) = call(&["greens", "eval", "--z1", "0,2", "--z2", "0,1", "--q-order", "sideways"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--q-order");
}

#[test]
fn greens_metadata_records_settings() {
    let (_, doc) = call(&["greens", "eval", "--z1", "0.1,1.2", "--z2", "-1/3,2", "--bound", "50", "--q-order", "weight"]);
    let s = &doc["metadata"]["settings"];
    assert_eq!(s["q_order"], "weight");
    assert_eq!(s["truncation"]["matrix_bound"], 50);
}

#[test]
fn cross_check_reports_without_verdict() {
    let b = tmp("boundary.json", r#"[{"tau": "0,2", "a": "1"}, {"tau": "1/2,3/2", "a": "-1/3"}]"#);
    let r: CrossCheckReport = round_trip(&ok(&[
        "greens", "cross-check", "--a1", "2", "--a3", "3", "--boundary", &b, "--y", "0.1,1.3", "--bound", "40",
    ]));
    assert!(r.terms_summed > 0);
    let bad = tmp("bad.json", "[{\"tau\": \"0,-1\", \"a\": \"1\"}]");
    let (code, doc) = call(&["greens", "cross-check", "--a1", "2", "--a3", "3", "--boundary", &bad, "--y", "0,1"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--boundary");
}

#[test]
fn tables() {
    let rows: Vec<BWCase> = round_trip(&ok(&["bw-cases", "--delta", "5"]));
    assert!(!rows.is_empty());
    let h: Vec<u64> = round_trip(&ok(&["hecke-components", "--delta", "5"]));
    assert_eq!(h, [1]);
}

#[test]
fn verify_passes() {
    let v: VerifyReport = round_trip(&ok(&["verify"]));
    assert!(v.all_passed);
}

#[test]
fn domain_and_usage_errors() {
    let (code, doc) = call(&["regulator", "--a1", "2", "--a3", "1"]);
    assert_eq!(code, 1);
    let e: ErrorObject = serde_json::from_value(doc["error"].clone()).unwrap();
    assert_eq!(e.kind, "InvalidModuli");
    let (code, doc) = call(&["regulator", "--a1", "2", "--a3", "3", "--frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--frobnicate");
    let (code, doc) = call(&["regulator", "--a1", "2/0", "--a3", "3"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["flag"], "--a1");
    let (code, _) = call(&["config", "--params", "2,6,3", "--precision", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["regulator", "--a1", "2", "--a3", "3"][..],
        &["greens", "hecke", "--m", "2", "--z1", "0.1,1.2", "--z2", "-1/3,2", "--bound", "50"][..],
        &["regulator-sweep", "--point", "2,3", "--point", "3,5", "--point", "-2,1/3"][..],
    ] {
        let mut full = vec!["mcycle"];
        full.extend_from_slice(args);
        assert_eq!(run(full.clone()).1, run(full).1);
    }
}

#[test]
fn binary_reads_precision_from_env() {
    let exe = env!("CARGO_BIN_EXE_mcycle");
    let out = Command::new(exe)
        .args(["regulator", "--a1", "2", "--a3", "3"])
        .env("MCYCLE_PRECISION", "30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["settings"]["precision"], 30);
    let out = Command::new(exe).args(["bw-cases"]).env_remove("MCYCLE_PRECISION").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], "Usage");
}

mod properties {
    use super::*;
    use mcycle::arith::Rat;
    use proptest::prelude::*;

    fn rat() -> impl Strategy<Value = Rat> {
        (-40i64..=40, 1i64..=9).prop_map(|(n, d)| Rat::new(n, d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn config_round_trips(a1 in rat(), a2 in rat(), a3 in rat()) {
            let params = format!("{a1},{a2},{a3}");
            let (code, doc) = call(&["config", "--params", &params]);
            if code == 0 {
                let cfg: KummerConfig = round_trip(&doc["result"]);
                prop_assert_eq!(cfg.params.a1, mcycle::arith::QuadVal::from(&a1));
            } else {
                prop_assert_eq!(code, 1);
                prop_assert_eq!(&doc["error"]["kind"], "InvalidModuli");
            }
        }

        #[test]
        fn regulator_round_trips(a1 in rat(), a3 in rat()) {
            let (a1, a3) = (a1.to_string(), a3.to_string());
            let (code, doc) = call(&["regulator", "--a1", &a1, "--a3", &a3, "--precision", "20"]);
            if code == 0 {
                let _: RegulatorResult = round_trip(&doc["result"]);
            } else {
                prop_assert_eq!(code, 1);
                let e: ErrorObject = serde_json::from_value(doc["error"].clone()).unwrap();
                prop_assert!(e.code >= 1);
            }
        }
    }
}
