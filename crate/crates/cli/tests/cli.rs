use std::process::{Command, Output};

use serde_json::Value;

fn norm1lat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_norm1lat"))
        .args(args)
        .env_remove("NORM1LAT_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

#[test]
fn verify_main_ii_6_passes() {
    let out = norm1lat(&["verify-paper", "--case", "main-ii", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["verdict"], "stably_rational");
    assert!(v.get("timings_ms").is_none());
    assert!(v["claims"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn parity_violation_is_a_usage_error() {
    let out = norm1lat(&["verify-paper", "--case", "main-ii", "--n", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mod 4"));
    for args in [
        &["verify-paper", "--case", "main-i", "--n", "6"][..],
        &["verify-paper", "--case", "appendix-c2", "--n", "4"],
        &["verify-paper", "--case", "nonsense", "--n", "4"],
        &["classify", "--group", "dihedral:n=6", "--subgroup", "<w>"],
        &["classify", "--group", "dihedral"],
        &["classify"],
    ] {
        assert_eq!(norm1lat(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn resource_bound_exit_code() {
    let out = norm1lat(&["classify", "--group", "dihedral:n=6", "--subgroup", "<x*y>", "--max-group-order", "8"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound 8"));
}

#[test]
fn cohomology_table_for_j() {
    let out = norm1lat(&["cohomology", "--group", "dihedral:n=6", "--lattice", "J:<x*y>", "--subgroup", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rank"], 5);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    // Ĥ^{-1}(U, J) vanishes exactly on 1 and H
    let zero: Vec<&str> = rows
        .iter()
        .filter(|r| r["H^-1"] == "0")
        .map(|r| r["subgroup"].as_str().unwrap())
        .collect();
    assert_eq!(zero, ["1", "<x*y>"]);
    let g = rows.iter().find(|r| r["subgroup"] == "G").unwrap();
    assert_eq!(g["H^0"], "0");
    assert_eq!(g["H^-1"], "Z/6");
}

#[test]
fn permutation_summands_have_no_h_minus_1() {
    let out = norm1lat(&[
        "cohomology", "--group", "dihedral:n=6", "--lattice", "P:<x*y> + P:<x> + Z", "--degree", "-1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for r in json(&out)["rows"].as_array().unwrap() {
        assert_eq!(r["H^-1"], "0");
        assert_eq!(r["H^1"], "0");
        assert!(r.get("H^0").is_none());
    }
}

#[test]
fn classify_examples() {
    let cases = [
        ("dihedral:n=4", "<x*y>", "not_retract_rational", "dihedral_reflection0_mod4"),
        ("dihedral:n=6", "<x*y>", "stably_rational", "dihedral_reflection2_mod4"),
        ("dihedral:n=3", "1", "stably_rational", "dihedral_galois_odd"),
        ("dihedral:n=6", "1", "not_retract_rational", "galois_noncyclic_sylow"),
        ("cyclic:n=5", "1", "stably_rational", "cyclic_galois"),
        ("dihedral:n=6", "<x^3>", "unsupported", "not_core_free"),
    ];
    for (g, h, verdict, rule) in cases {
        let out = norm1lat(&["classify", "--group", g, "--subgroup", h]);
        assert_eq!(out.status.code(), Some(0), "{g} {h}");
        let v = json(&out);
        assert_eq!(v["verdict"], verdict, "{g} {h}");
        assert_eq!(v["rule"], rule, "{g} {h}");
        if verdict != "unsupported" {
            assert!(!v["certificates"].as_array().unwrap().is_empty());
        }
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_norm1lat"))
            .args(["classify", "--group", "dihedral:n=10", "--subgroup", "<x*y>"])
            .env("NORM1LAT_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
}

#[test]
fn job_file_matches_flags() {
    let dir = std::env::temp_dir().join(format!("norm1lat-job-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("job.json");
    std::fs::write(&path, r#"{"command": "verify-paper", "case": "appendix-c2", "n": 5}"#).unwrap();
    let from_job = norm1lat(&["--job", path.to_str().unwrap()]);
    let from_flags = norm1lat(&["verify-paper", "--case", "appendix-c2", "--n", "5"]);
    assert_eq!(from_job.status.code(), Some(0));
    assert_eq!(from_job.stdout, from_flags.stdout);

    std::fs::write(&path, r#"{"command": "verify-paper", "case": "appendix-c2", "n": 4}"#).unwrap();
    assert_eq!(norm1lat(&["--job", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(norm1lat(&["--job", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_format_renders_the_json() {
    let out = norm1lat(&["classify", "--group", "dihedral:n=4", "--subgroup", "<x*y>", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: not_retract_rational"));
    assert!(text.contains("rule: dihedral_reflection0_mod4"));
    assert!(text.contains("matrix>"));
}

#[test]
fn resolve_and_stably_permutation_search() {
    let out = norm1lat(&["resolve", "--group", "dihedral:n=3", "--subgroup", "<y>"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exact"], true);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["rank_p"].as_u64().unwrap(), v["rank_f"].as_u64().unwrap() + 2);
    assert!(v["f_cohomology"].as_array().unwrap().iter().all(|r| r["H^-1"] == "0"));

    // C2 acting trivially on Z: F = Z[C2]
    let out = norm1lat(&["resolve", "--group", "cyclic:n=2", "--lattice", "Z", "--target", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let sp = &json(&out)["stably_permutation"];
    assert_eq!(sp["outcome"], "found");
    assert_eq!(sp["verified"], true);
    assert_eq!(sp["certificate"]["type"], "flabby_class_zero");

    let out = norm1lat(&["resolve", "--group", "cyclic:n=2", "--lattice", "Z", "--target", "G;G"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["stably_permutation"]["verified"], false);

    let out = norm1lat(&["resolve", "--group", "dihedral:n=4", "--subgroup", "<x*y>", "--target", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let out = norm1lat(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["all_passed"], true);
}
