use std::process::{Command, Output};

use serde_json::Value;

fn wyang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wyang")).args(args).output().expect("spawn wyang")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn exit_codes() {
    assert_eq!(wyang(&["verify", "rtt", "--N", "2", "--p", "1"]).status.code(), Some(0));
    assert_eq!(wyang(&["verify", "rtt", "--N", "2", "--p", "1", "--corrupt-table"]).status.code(), Some(1));
    assert_eq!(wyang(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(wyang(&["verify", "rsrs", "--N", "3", "--theta0", "-1"]).status.code(), Some(2));
    assert_eq!(wyang(&["verify", "glnp-bracket", "--N", "1", "--p", "2", "--corrupt-eta", "oops"]).status.code(), Some(2));
}

#[test]
fn mmatrix_is_sparse_triplets() {
    let o = wyang(&["compute", "mmatrix", "--j", "1", "--m", "0", "--a", "1", "--b", "2", "--N", "2", "--p", "2", "--out", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["Np"], 4);
    let v = &v["matrix"];
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(4), Some(4)));
    let vals = v["vals"].as_array().unwrap();
    assert!(!vals.is_empty());
    // E^{12} sits in the top right block
    assert!(vals.iter().all(|t| t[0].as_u64().unwrap() < 2 && t[1].as_u64().unwrap() >= 2));
}

#[test]
fn reports_do_not_depend_on_threads() {
    let run = |jobs: &str| wyang(&["verify", "cg", "--N", "2", "--p", "2", "--out", "json", "--jobs", jobs]).stdout;
    assert_eq!(run("1"), run("4"));
}

#[test]
fn rep_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("wyang-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("triv.json");
    let built = wyang(&["rep", "build", "--N", "2", "--theta0", "+1", "--eval", "triv@0", "--out", "json"]);
    assert!(built.status.success());
    std::fs::write(&file, &built.stdout).unwrap();
    let cl = wyang(&["rep", "classify", file.to_str().unwrap(), "--out", "json"]);
    assert!(cl.status.success());
    let v = json(&cl);
    assert_eq!(v["classification"]["epsilon"], "1/2");
    let ad = wyang(&["rep", "admissible", file.to_str().unwrap(), "--p", "2", "--out", "json"]);
    assert_eq!(json(&ad)["admissible"], true);
    std::fs::write(&file, "{\"family\":\"Q\"}").unwrap();
    assert_eq!(wyang(&["rep", "classify", file.to_str().unwrap()]).status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}
