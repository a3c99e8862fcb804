use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde_json::Value;
use unilift::classify::ClassificationReport;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("unilift").chain(args.iter().copied());
    let code = unilift_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("not json ({e}): {s}"))
}

fn error_kind(stderr: &str) -> String {
    json(stderr)["error"]["kind"].as_str().unwrap().to_string()
}

fn report(stdout: &str) -> ClassificationReport {
    serde_json::from_value(json(stdout)["report"].clone()).unwrap()
}

#[test]
fn classify_d8_verifies_1600() {
    let (code, out, _) = cli(&["classify", "--D", "8"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema"], "unilift-report/1");
    assert_eq!(report(&out).verified_discs(), vec![1600]);
    assert_eq!(v["report"]["verified"][0]["label"], "4.4.1600.1");
}

#[test]
fn represent_one_plus_w() {
    let (code, out, _) = cli(&["represent", "--D", "8", "--delta", "5,0", "--alpha", "1,0,1,0"]);
    assert_eq!(code, 0);
    let w = &json(&out)["report"]["witness"];
    assert_eq!(w["p"], serde_json::json!([0, 0]));
    assert_eq!(w["q"], serde_json::json!([0, 0]));
    assert_eq!(w["r"], serde_json::json!([1, 0]));
}

#[test]
fn unlisted_d_is_input_error() {
    let (code, out, err) = cli(&["classify", "--D", "300"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(error_kind(&err), "ClassNumberNotOne");
    let (code, _, err) = cli(&["classify", "--D", "9"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "ClassNumberNotOne");
    // the override still requires a fundamental discriminant
    let (code, _, err) = cli(&["classify", "--D", "300", "--allow-unlisted"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "NotFundamental");
}

#[test]
fn bad_arguments_are_input_errors() {
    for args in [
        &["classify"][..],
        &["represent", "--D", "8", "--delta", "5", "--alpha", "1,0,1,0"],
        &["represent", "--D", "8", "--delta", "5,0", "--alpha", "x,0,1,0"],
        &["classify", "--D", "8", "--m-count", "0"],
        &["classify", "--D", "8", "--units", "/nonexistent/units.json"],
        &["frobnicate"],
    ] {
        let (code, _, err) = cli(args);
        assert_eq!(code, 2, "{args:?}");
        json(&err);
    }
    // not totally positive
    let (code, _, err) = cli(&["represent", "--D", "8", "--delta", "5,0", "--alpha", "-1,0,0,0"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "NotTotallyPositive");
}

#[test]
fn negative_delta_coordinates_parse() {
    let (code, out, _) = cli(&["check-delta", "--D", "5", "--delta", "6,-1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["report"]["abs_disc"], 725);
    assert!(v["report"]["outcome"]["result"]["verified"].is_object());
}

#[test]
fn check_delta_reports_failure_witness() {
    let (code, out, _) = cli(&["check-delta", "--D", "12", "--delta", "7,0"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!(v["report"]["m_test"].is_null());
    assert!(v["report"]["outcome"]["result"]["eliminated"].is_object());
}

#[test]
fn table1_honours_skip_and_only() {
    let (code, out, _) = cli(&["table1", "--only", "5,8,13,177", "--skip", "177"]);
    assert_eq!(code, 0);
    let rows = json(&out)["report"]["rows"].as_array().unwrap().clone();
    let ds: Vec<i64> = rows.iter().map(|r| r["D"].as_i64().unwrap()).collect();
    assert_eq!(ds, vec![5, 8, 13]);
    assert!(rows.iter().all(|r| r["match"] == true));
}

#[test]
fn table1_full_without_177_and_193() {
    let (code, out, _) = cli(&["table1", "--skip", "177,193", "--format", "human"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 44);
    assert!(!out.contains("D=177 ") && !out.contains("D=193 "));
    assert!(out.lines().all(|l| l.ends_with(" ok")));
}

#[test]
fn csv_has_one_row_per_survivor() {
    let (code, out, _) = cli(&["classify", "--D", "12", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["D_F", "delta_m", "delta_n", "abs_disc", "label", "verdict"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let (_, json_out, _) = cli(&["classify", "--D", "12"]);
    let r = report(&json_out);
    assert_eq!(rows.len(), r.s2.len());
    let mut verified: Vec<&str> = rows.iter().filter(|x| &x[5] == "verified").map(|x| &x[3]).collect();
    // two conjugate Δ give the field 4752
    assert_eq!(verified.len(), r.verified.len());
    verified.dedup();
    assert_eq!(verified, ["3600", "2304", "4752"]);
}

#[test]
fn report_round_trips() {
    for d in ["5", "12", "41"] {
        let (_, out, _) = cli(&["classify", "--D", d]);
        let r = report(&out);
        let again = serde_json::to_value(&r).unwrap();
        assert_eq!(again, json(&out)["report"]);
        let r2: ClassificationReport = serde_json::from_value(again).unwrap();
        assert_eq!(r, r2);
    }
}

#[test]
fn worker_count_does_not_change_output() {
    for d in ["12", "28", "57"] {
        let (_, one, _) = cli(&["classify", "--D", d, "--workers", "1"]);
        let (_, three, _) = cli(&["classify", "--D", d, "--workers", "3"]);
        assert_eq!(one, three);
    }
}

fn truncated_copy(src: &Path, dst: &Path, lines: usize, partial: &str) {
    let text = std::fs::read_to_string(src).unwrap();
    let mut keep: String = text.lines().take(lines).map(|l| format!("{l}\n")).collect();
    keep.push_str(partial);
    std::fs::write(dst, keep).unwrap();
}

#[test]
fn checkpoint_resume_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.jsonl");
    let (code, reference, _) = cli(&["classify", "--D", "12"]);
    assert_eq!(code, 0);
    let (_, with_ck, _) = cli(&["classify", "--D", "12", "--checkpoint", full.to_str().unwrap()]);
    assert_eq!(with_ck, reference);
    let n = std::fs::read_to_string(&full).unwrap().lines().count();
    assert!(n > 3);
    // interruption after every possible record, with and without a torn write
    for k in 1..n {
        for partial in ["", "{\"m_test\":{\"del"] {
            let ck = dir.path().join(format!("cut{k}.jsonl"));
            truncated_copy(&full, &ck, k, partial);
            let (code, out, err) = cli(&["classify", "--D", "12", "--checkpoint", ck.to_str().unwrap()]);
            assert_eq!(code, 0, "{err}");
            assert_eq!(out, reference, "resumed after {k} records");
            assert_eq!(std::fs::read_to_string(&ck).unwrap().lines().count(), n);
        }
    }
}

#[test]
fn killed_process_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.jsonl");
    let (_, reference, _) = cli(&["classify", "--D", "28"]);
    let bin = env!("CARGO_BIN_EXE_unilift");
    let mut child = Command::new(bin)
        .args(["classify", "--D", "28", "--checkpoint", ck.to_str().unwrap()])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    // kill once a few records exist; a run that wins the race is fine too
    let start = Instant::now();
    while start.elapsed() < Duration::from_secs(60) {
        let lines = std::fs::read_to_string(&ck).map(|s| s.lines().count()).unwrap_or(0);
        if lines >= 3 || child.try_wait().unwrap().is_some() {
            break;
        }
        std::thread::sleep(Duration::from_millis(5));
    }
    let _ = child.kill();
    let _ = child.wait();
    let out = Command::new(bin)
        .args(["classify", "--D", "28", "--checkpoint", ck.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), reference);
}

#[test]
fn corrupt_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.jsonl");
    cli(&["classify", "--D", "8", "--checkpoint", good.to_str().unwrap()]);
    let text = std::fs::read_to_string(&good).unwrap();
    let cases = [
        ("version", text.replacen("unilift-checkpoint/1+", "unilift-checkpoint/0+", 1)),
        ("garbage", format!("{text}not json\n")),
        ("no header", text.lines().skip(1).map(|l| format!("{l}\n")).collect()),
        ("params", text.replacen("\"m_count\":50", "\"m_count\":7", 1)),
        ("unexpected delta", format!("{text}{{\"m_test\":{{\"delta\":[999,0],\"m\":null}}}}\n")),
    ];
    for (name, body) in cases {
        let p = dir.path().join(format!("{}.jsonl", name.replace(' ', "_")));
        std::fs::write(&p, body).unwrap();
        let (code, out, err) = cli(&["classify", "--D", "8", "--checkpoint", p.to_str().unwrap()]);
        assert_eq!(code, 2, "{name}");
        assert!(out.is_empty());
        assert_eq!(error_kind(&err), "CorruptCheckpoint", "{name}");
    }
    // checkpoint for another D
    let (code, _, err) = cli(&["classify", "--D", "5", "--checkpoint", good.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "CorruptCheckpoint");
}

#[test]
fn missing_units_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let units = dir.path().join("units.json");
    std::fs::write(&units, "{\"fields\": []}").unwrap();
    let (code, out, _) = cli(&["classify", "--D", "8", "--units", units.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(json(&out)["report"]["needs_units"], serde_json::json!([[5, 0]]));
    // the environment variable is honoured
    let out = Command::new(env!("CARGO_BIN_EXE_unilift"))
        .args(["classify", "--D", "8"])
        .env("UNILIFT_UNITS", &units)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&String::from_utf8(out.stdout).unwrap())["config"]["units"], units.to_str().unwrap());
}

#[test]
fn units_directory_is_merged() {
    let dir = tempfile::tempdir().unwrap();
    let all = unilift::data::bundled_units();
    let (a, b): (Vec<_>, Vec<_>) = all.into_iter().partition(|r| r.d < 20);
    for (name, part) in [("a.json", a), ("b.json", b)] {
        let f = unilift::indecomp::UnitFile { fields: part };
        std::fs::write(dir.path().join(name), serde_json::to_string(&f).unwrap()).unwrap();
    }
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let (code, out, _) = cli(&["verify-units", "--units", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["report"]["records"], unilift::data::bundled_units().len());
    let (code, _, _) = cli(&["classify", "--D", "28", "--units", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn verify_units_bundled_and_broken() {
    let (code, out, _) = cli(&["verify-units"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["report"]["failures"], 0);
    let dir = tempfile::tempdir().unwrap();
    let mut recs = unilift::data::bundled_units();
    recs.truncate(3);
    // a non-unit
    recs[0].units[0] = unilift::KElem::small(2, 0, 0, 0);
    // a dependent set
    recs[1].units[2] = recs[1].units[1].clone();
    let p = dir.path().join("bad.json");
    let f = unilift::indecomp::UnitFile { fields: recs };
    std::fs::write(&p, serde_json::to_string(&f).unwrap()).unwrap();
    let (code, out, _) = cli(&["verify-units", "--units", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["report"]["failures"], 2);
    std::fs::write(&p, "{\"fields\": [{\"D\": 8}]}").unwrap();
    let (code, _, err) = cli(&["verify-units", "--units", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "Data");
}

#[test]
fn sqrt_e_commands() {
    let (code, out, _) = cli(&["sqrt-e", "--D", "5", "--e", "2"]);
    assert_eq!(code, 0);
    let w = &json(&out)["report"]["witness"];
    // 2 + √2 with w = √2
    assert_eq!(w["alpha"], serde_json::json!([[2, 0], [1, 0]]));
    assert_eq!(w["totally_positive"], true);
    assert!(w["result"]["witness"].is_null());
    let (code, _, err) = cli(&["sqrt-e", "--D", "8", "--e", "5"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "ESpecialFive");
    let (code, _, err) = cli(&["sqrt-e", "--D", "12", "--e", "2"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "NotCoprime");
    let (code, _, err) = cli(&["sqrt-e", "--D", "5", "--e", "12"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "NotSquarefree");
}

#[test]
fn sqrt5_commands() {
    let (code, out, _) = cli(&["sqrt5-witness", "--D", "4081"]);
    assert_eq!(code, 0);
    let w = &json(&out)["report"]["witnesses"][0];
    assert_eq!(w["regime"], "theorem");
    assert_eq!(w["representable"], false);
    assert_eq!(w["totally_positive"], true);
    let (code, _, err) = cli(&["sqrt5-witness", "--D", "4077"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "NotFundamental");
    let (code, _, err) = cli(&["sqrt5-witness", "--D", "4085"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "DivisibleBy5");
    let (code, _, err) = cli(&["sqrt5-witness", "--D", "1000"]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&err), "DTooSmall");
    let (code, out, _) = cli(&["sqrt5-witness", "--D", "1001", "--allow-unproved"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["report"]["witnesses"][0]["regime"], "empirical");
    let (code, out, _) = cli(&["sqrt5-witness", "--count", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["report"]["witnesses"].as_array().unwrap().len(), 3);
}

#[test]
fn indecomposables_command() {
    let (code, out, _) = cli(&["indecomposables", "--D", "8", "--delta", "5,0", "--max-trace", "20"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let list = v["report"]["indecomposables"].as_array().unwrap();
    assert_eq!(v["report"]["count"], list.len());
    assert!(list.contains(&serde_json::json!([[1, 0], [0, 0]])));
    let (code, out, _) = cli(&["indecomposables", "--D", "8", "--delta", "5,0"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["report"]["trace_bound"], 72);
    let (code, _, err) = cli(&["indecomposables", "--D", "8", "--delta", "17,0", "--units", "/dev/null"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn help_and_version_exit_0() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("classify"));
    let (code, _, _) = cli(&["--version"]);
    assert_eq!(code, 0);
}
