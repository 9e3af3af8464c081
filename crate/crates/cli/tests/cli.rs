use assert_cmd::Command;
use serde_json::Value;

use nij_core::families::{sample_params, FamilyId};
use nij_core::scalar::format_rational;

fn nij() -> Command {
    let mut cmd = Command::cargo_bin("nij").unwrap();
    cmd.env_remove("NIJ_SEED");
    cmd
}

struct Run {
    code: i32,
    json: Value,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = nij().args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let json = if stdout.trim().is_empty() { Value::Null } else { serde_json::from_str(&stdout).unwrap() };
    assert!(serde_json::from_str::<Value>(stderr.trim()).is_err() || stderr.trim().is_empty());
    Run { code: out.status.code().unwrap(), json, stdout, stderr }
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn family_args(id: FamilyId, algebra: &str, params: &[(String, String)]) -> Vec<String> {
    let mut args = vec!["family".into(), "--algebra".into(), algebra.into(), "--family".into(), id.as_str().into()];
    for (k, v) in params {
        args.push("--param".into());
        args.push(format!("{k}={v}"));
    }
    args
}

#[test]
fn family_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for id in FamilyId::ALL {
        if matches!(id, FamilyId::Case6Theta1Lambda2 | FamilyId::Case6Theta1LambdaMinus2) {
            continue;
        }
        let algebra = id.reference_algebras()[0].to_string();
        let samples = if id == FamilyId::Mixed || id.is_constant() { 1 } else { 20 };
        for (i, params) in sample_params(id, 11, samples).into_iter().enumerate() {
            let pairs: Vec<(String, String)> = if id == FamilyId::Mixed {
                vec![]
            } else {
                params.pairs(id).into_iter().map(|(k, v)| (k.to_string(), format_rational(&v))).collect()
            };
            let args = family_args(id, &algebra, &pairs);
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            let fam = run(&args);
            assert_eq!(fam.code, 0, "{id} sample {i}: {}", fam.stderr);
            let file = write(&dir, "f.json", &fam.stdout);
            let checked = run(&["check", "--algebra", &algebra, "--matrix", &file]);
            assert_eq!(checked.code, 0, "{id} sample {i}");
            assert_eq!(checked.json["integrable"], true);
        }
    }
}

#[test]
fn check_reports_split_form_on_type_two() {
    let dir = tempfile::tempdir().unwrap();
    let fam = run(&[
        "family", "--algebra", "2", "--family", "case2", "--param", "X=1", "--param", "Y=2", "--param", "lambda=1/2",
        "--param", "kappa=3", "--param", "kappa*=1", "--param", "X*=0", "--param", "Y*=-1",
    ]);
    assert_eq!(fam.code, 0);
    let file = write(&dir, "f.json", &fam.stdout);
    let r = run(&["check", "--algebra", "2", "--matrix", &file]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["integrable"], true);
    assert_eq!(r.json["star_rank"], serde_json::json!([1, 1]));
    let quasi = r.json["quasi_invariant"].as_array().unwrap();
    assert!(quasi.iter().any(|q| q["v"] == "e3" && q["lambda"]["value"] == "1/2"));
}

#[test]
fn naive_swap_is_not_integrable_on_type_two() {
    let dir = tempfile::tempdir().unwrap();
    let standard = run(&["family", "--algebra", "1", "--family", "abelian-standard"]);
    let mut doc: Value = standard.json;
    doc["algebra"] = "2".into();
    let file = write(&dir, "swap.json", &doc.to_string());
    let r = run(&["check", "--algebra", "2", "--matrix", &file]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json["integrable"], false);
    assert!(r.json["failing_pairs"].as_array().unwrap().contains(&serde_json::json!(["e1", "e2"])));
}

#[test]
fn constant_lambda_two_form_is_emitted_and_flagged() {
    let r = run(&["family", "--algebra", "6:1", "--family", "case6-theta1-λ2"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json["integrable"], false);
    assert_eq!(r.json["matrix"][2][5], "-5/1");
    assert!(!r.json["failing_pairs"].as_array().unwrap().is_empty());
}

#[test]
fn search_on_type_five_reports_nonexistence_note() {
    let r = run(&["search", "--algebra", "5", "--restarts", "200", "--seed", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["verdict"], "not-found");
    assert!(r.json["best_residual"].as_f64().unwrap() >= 1e-3);
    assert!(r.json["note"].as_str().unwrap().contains("non-existence"));
    assert_eq!(r.json["restarts"], 200);
}

#[test]
fn search_finds_structures_and_honours_nij_seed() {
    let a = run(&["search", "--algebra", "3", "--restarts", "3", "--seed", "5"]);
    assert_eq!(a.json["verdict"], "found");
    assert!(a.json["diagnostics"]["star_rank"].is_array());
    let out = nij().args(["search", "--algebra", "3", "--restarts", "3"]).env("NIJ_SEED", "5").output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), a.stdout);
}

#[test]
fn scan_nonexistence() {
    let r = run(&["scan-nonexistence", "--thetas", "2", "--restarts", "20"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["results"][0]["verdict"], "not-found");
    assert_eq!(r.json["results"][0]["theta"], 2.0);
    assert_eq!(run(&["scan-nonexistence", "--thetas", "0"]).code, 2);
}

#[test]
fn verify_families_is_deterministic() {
    let a = run(&["verify-families", "--samples", "3", "--seed", "4"]);
    let b = run(&["verify-families", "--samples", "3", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let results = a.json["results"].as_array().unwrap();
    let failing: Vec<&str> = results
        .iter()
        .filter(|r| r["verified"] != r["samples"])
        .map(|r| r["family"].as_str().unwrap())
        .collect();
    // the two constant lambda = +-2 forms do not verify
    assert_eq!(failing, ["case6-theta1-lambda2", "case6-theta1-lambda-2"]);
    assert_eq!(a.code, 1);
}

#[test]
fn aut_sample_and_alias() {
    let r = run(&["aut-sample", "--algebra", "6:1", "--count", "4", "--seed", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["accepted"], 4);
    assert_eq!(r.json["orbit_invariance"]["passed"], true);
    let alias = run(&["aut", "sample", "--algebra", "6:1", "--count", "4", "--seed", "2"]);
    assert_eq!(alias.stdout, r.stdout);
}

#[test]
fn mixed_and_listing() {
    let r = run(&["mixed", "--algebra", "8"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["uvw"], serde_json::json!(["e3", "e1", "e2"]));
    assert_eq!(run(&["mixed", "--algebra", "5"]).code, 1);
    let list = run(&["algebras-list"]);
    assert_eq!(list.code, 0);
    assert!(list.json["algebras"].as_array().unwrap().len() >= 8);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let mixed_modes = write(
        &dir,
        "m.json",
        r#"{"algebra":"1","scalar":"rational","matrix":[[0.5,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,0,0,0,0]]}"#,
    );
    for args in [
        vec!["bogus"],
        vec!["check", "--matrix", mixed_modes.as_str()],
        vec!["check", "--matrix", "/nonexistent/file.json"],
        vec!["family", "--algebra", "2", "--family", "case2", "--param", "Q=1"],
        vec!["family", "--algebra", "5", "--family", "case2"],
        vec!["family", "--algebra", "9", "--family", "case2"],
        vec!["search", "--algebra", "4"],
        vec!["search", "--algebra", "1", "--restarts", "0"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.stdout.trim().is_empty(), "{args:?}");
        assert!(!r.stderr.is_empty());
    }
}
