use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherecover")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["construct", "--type", "nm_upper", "--d", "2", "--n", "1", "--m", "2", "-o", "nm.json"])), 0);
    assert_eq!(code(&run(d, &["verify", "nm.json", "--exact"])), 0);

    assert_eq!(code(&run(d, &["construct", "--type", "gale", "--d", "2", "--n", "1", "-o", "g.json"])), 0);
    let o = run(d, &["verify", "g.json", "--exact", "--claim-m", "2"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));

    // Predicate covers never go through the exact engine.
    assert_eq!(code(&run(d, &["construct", "--type", "theorem4", "--d", "2", "-o", "b.json"])), 0);
    assert_eq!(code(&run(d, &["verify", "b.json", "--exact"])), 2);
    assert_eq!(code(&run(d, &["kyfan", "b.json", "--n", "1"])), 2);
    assert_eq!(code(&run(d, &["verify", "b.json", "--samples", "20000", "--seed", "3"])), 0);

    // Usage errors.
    assert_eq!(code(&run(d, &["verify", "g.json"])), 2);
    assert_eq!(code(&run(d, &["construct", "--type", "bar", "--d", "2", "-o", "x.json"])), 2);
    assert_eq!(code(&run(d, &["search", "--d", "2", "--n", "2", "-N", "5"])), 2);
    assert_eq!(code(&run(d, &["verify", "missing.json", "--exact"])), 2);
}

#[test]
fn construct_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (args, sets) in [
        (vec!["--type", "gale", "--d", "2", "--n", "1"], 4),
        (vec!["--type", "bar", "--d", "2", "--n", "1", "--m", "2"], 5),
        (vec!["--type", "theorem4", "--d", "3"], 5),
        (vec!["--type", "circle", "--m", "2"], 4),
    ] {
        let mut full = vec!["construct"];
        full.extend(&args);
        full.extend(["-o", "c.json"]);
        assert_eq!(code(&run(d, &full)), 0);
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("c.json")).unwrap()).unwrap();
        assert_eq!(v["sets"].as_array().unwrap().len(), sets, "{args:?}");
    }
}

#[test]
fn manifests_hash_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["construct", "--type", "gale", "--d", "2", "--n", "2", "-o", "g.json"])), 0);
    assert_eq!(code(&run(d, &["kyfan", "g.json", "--n", "2", "-o", "cert.json"])), 0);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("cert.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "kyfan");
    let art = &m["artifacts"][0];
    let bytes = std::fs::read(d.join("cert.json")).unwrap();
    let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(art["sha256"], hex);
    let input = std::fs::read(d.join("g.json")).unwrap();
    let hex: String = Sha256::digest(&input).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(m["inputs"][0]["sha256"], hex);
    let cert: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(cert["verified"], true);
    assert!(cert["count"].as_u64().unwrap() >= 3);
}

#[test]
fn renders_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["construct", "--type", "circle", "--m", "2", "-o", "c.json"])), 0);
    assert_eq!(code(&run(d, &["render", "c.json", "--view", "equator", "-o", "a.svg"])), 0);
    assert_eq!(code(&run(d, &["render", "c.json", "--view", "equator", "-o", "b.svg"])), 0);
    let a = std::fs::read(d.join("a.svg")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.svg")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().matches("class=\"ring\"").count(), 4);
    // No geometric view of S^1 beyond the ring picture; S^3 is unsupported.
    assert_eq!(code(&run(d, &["render", "c.json", "--view", "north", "-o", "n.svg"])), 2);
    assert_eq!(code(&run(d, &["construct", "--type", "gale", "--d", "3", "--n", "1", "-o", "g3.json"])), 0);
    assert_eq!(code(&run(d, &["render", "g3.json", "-o", "g3.svg"])), 2);
}

#[test]
fn sampled_verification_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["construct", "--type", "belt", "--d", "2", "-o", "b.json"])), 0);
    for out in ["r1.json", "r2.json"] {
        assert_eq!(code(&run(d, &["verify", "b.json", "--samples", "30000", "--seed", "9", "-o", out])), 0);
    }
    assert_eq!(std::fs::read(d.join("r1.json")).unwrap(), std::fs::read(d.join("r2.json")).unwrap());
}

#[test]
fn bounds_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["bounds", "--d", "1", "--n", "1", "--m", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("f      = 6 (exact)"));
    let o = run(dir.path(), &["bounds", "--d", "4", "--n", "1", "--m", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["f_exact"], 6);
}

#[test]
fn restrict_and_search_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["construct", "--type", "bar", "--d", "2", "--n", "1", "--m", "2", "-o", "bar.json"])), 0);
    assert_eq!(code(&run(d, &["restrict", "bar.json", "-o", "eq.json"])), 0);
    // The closed northern fold carries over to the equator.
    assert_eq!(code(&run(d, &["verify", "eq.json", "--exact"])), 0);

    let args = ["search", "--d", "1", "--n", "1", "-N", "3", "--iterations", "20", "--restarts", "2", "-o", "s.json", "--trace", "t.csv"];
    assert_eq!(code(&run(d, &args)), 0);
    let csv = std::fs::read_to_string(d.join("t.csv")).unwrap();
    assert!(csv.starts_with("restart,iteration,"));
    assert_eq!(csv.lines().count(), 41);
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert_eq!(s["verdict"], "SUPPORTS_CONJECTURE");
    assert_eq!(s["best_report"]["exact"], true);
}
