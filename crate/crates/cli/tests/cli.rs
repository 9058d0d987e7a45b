use std::process::{Command, Output};

use serde_json::Value;

fn fixedj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixedj"))
        .args(args)
        .env_remove("FIXEDJ_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn sigma_quartics_through_eleven_points() {
    let o = fixedj(&["sigma", "--n", "2", "--d", "4", "--constraints", "p:11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "value"), "620");
    assert!(text.starts_with("query: sigma n=2 d=4 constraints=p:11"));
}

#[test]
fn tau_reports_both_normalizations() {
    let o = fixedj(&["tau", "--n", "3", "--d", "3", "--constraints", "l:11", "--j", "generic"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let tau: u64 = field(&text, "tau").parse().unwrap();
    let scaled: u64 = field(&text, "nj_times_tau").parse().unwrap();
    assert_eq!(field(&text, "n_j"), "2");
    assert_eq!(field(&text, "formula_path"), "general");
    assert_eq!(scaled, 2 * tau);
}

#[test]
fn header_is_normalized() {
    let o = fixedj(&["tau", "--n", "3", "--d", "2", "--constraints", "l:3,p:1,l:2", "--j", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("query: tau n=3 d=2 constraints=p:1,l:5 j=0\n"));
}

#[test]
fn json_and_plain_agree() {
    for args in [
        vec!["tau", "--n", "4", "--d", "3", "--constraints", "H2:12,l:1", "--j", "1728"],
        vec!["tau", "--n", "3", "--d", "4", "--constraints", "p:3,l:9"],
    ] {
        let plain = stdout(&fixedj(&args));
        let mut with_json = args.clone();
        with_json.extend(["--format", "json"]);
        let doc: Value = serde_json::from_str(&stdout(&fixedj(&with_json))).unwrap();
        for key in ["tau", "nj_times_tau", "formula_path"] {
            assert_eq!(doc["result"][key].as_str().unwrap(), field(&plain, key), "{key}");
        }
        for key in ["sigma_evals", "phi_evals", "cache_hits"] {
            assert!(doc["stats"][key].is_u64());
        }
        assert_eq!(doc["query"]["command"], "tau");
    }
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["tau", "--n", "5", "--d", "2", "--constraints", "l:11"], 65),
        (&["tau", "--n", "3", "--d", "3", "--constraints", "l:10"], 2),
        (&["sigma", "--n", "2", "--d", "4", "--constraints", "p:10"], 2),
        (&["phi", "--n", "2", "--d", "3", "--constraints", "p:7", "--i", "3", "--j-exp", "0"], 2),
        (&["tau", "--n", "3", "--d", "3", "--constraints", "l:11", "--frobnicate"], 64),
        (&["tau", "--n", "3", "--d", "3", "--constraints", "q:11"], 64),
        (&["tau", "--n", "3", "--d", "2..4", "--constraints", "l:11"], 64),
        (&["tau", "--n", "3", "--d", "3", "--constraints", "l:11", "--j", "17"], 64),
        (&["bogus"], 64),
    ];
    for (args, code) in cases {
        let o = fixedj(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    let o = fixedj(&["tau", "--n", "3", "--d", "3", "--constraints", "l:10"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("defect -1"));
    let o = fixedj(&["tau", "--n", "5", "--d", "2", "--constraints", "l:11"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("2..=4"));
}

#[test]
fn table_rows_and_empty_range() {
    let o = fixedj(&["table", "--n", "3", "--d", "2..3", "--family", "p3-lines"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(2)
        .filter(|l| !l.starts_with("stats"))
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2..], ["0", "0", "0", "0"]);
    let generic: u64 = rows[1][2].parse().unwrap();
    assert_eq!(rows[1][3].parse::<u64>().unwrap() * 3, generic);
    assert_eq!(rows[1][4].parse::<u64>().unwrap() * 2, generic);

    let o = fixedj(&["table", "--n", "2", "--d", "5..4", "--family", "p2-points", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc, Value::Array(vec![]));
}

#[test]
fn table_plane_points_matches_sigma() {
    let o = fixedj(&["table", "--n", "2", "--d", "1..6", "--family", "p2-points", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = doc.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for (k, row) in rows.iter().enumerate() {
        let d = k as u64 + 1;
        let s = fixedj(&["sigma", "--n", "2", "--d", &d.to_string(), "--constraints", &format!("p:{}", 3 * d - 1)]);
        let sigma: u64 = field(&stdout(&s), "value").parse().unwrap();
        let pairs = (d - 1) * d.saturating_sub(2) / 2;
        for (label, n_j) in [("generic", 2), ("0", 6), ("1728", 4)] {
            let tau: u64 = row["columns"][label]["tau"].as_str().unwrap().parse().unwrap();
            assert_eq!(tau * n_j, 2 * pairs * sigma, "d = {d}, j = {label}");
        }
    }
}

#[test]
fn cache_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p3.cache");
    let p = path.to_str().unwrap();
    let args = ["tau", "--n", "3", "--d", "4", "--constraints", "l:15", "--format", "json"];
    let mut first = args.to_vec();
    first.extend(["--cache", p]);
    let cold: Value = serde_json::from_str(&stdout(&fixedj(&first))).unwrap();
    let warm = Command::new(env!("CARGO_BIN_EXE_fixedj"))
        .args(args)
        .env("FIXEDJ_CACHE", p)
        .output()
        .unwrap();
    let warm: Value = serde_json::from_slice(&warm.stdout).unwrap();
    assert_eq!(cold["result"], warm["result"]);
    assert_eq!(warm["stats"]["sigma_evals"], 0);
    assert_eq!(warm["stats"]["phi_evals"], 0);

    let other = fixedj(&["sigma", "--n", "2", "--d", "2", "--constraints", "p:5", "--cache", p]);
    assert_eq!(other.status.code(), Some(74));
    std::fs::write(&path, b"not a cache").unwrap();
    assert_eq!(fixedj(&first).status.code(), Some(74));
}

#[test]
fn rt_and_phi() {
    let o = fixedj(&["rt", "--n", "2", "--d", "3", "--constraints", "p:8"]);
    assert_eq!(o.status.code(), Some(0));
    // only the H·H split survives, and each H contributes a factor d
    let s = fixedj(&["sigma", "--n", "2", "--d", "3", "--constraints", "p:8"]);
    let sigma: i64 = field(&stdout(&s), "value").parse().unwrap();
    assert_eq!(field(&stdout(&o), "value").parse::<i64>().unwrap(), 9 * sigma);

    let o = fixedj(&["phi", "--n", "2", "--d", "3", "--constraints", "p:7", "--i", "0", "--j-exp", "2"]);
    let sigma = fixedj(&["sigma", "--n", "2", "--d", "3", "--constraints", "p:8"]);
    assert_eq!(field(&stdout(&o), "value"), field(&stdout(&sigma), "value"));
}
