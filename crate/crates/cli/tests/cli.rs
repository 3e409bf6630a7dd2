use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hardyerg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardyerg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hardyerg-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn pet_type_of_the_basic_family() {
    let o = hardyerg(&["pet-type", "{t,2t,t^2}"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(2,1,2)\n");
    let o = hardyerg(&["pet-type", "--preset", "pet-golden"]);
    assert_eq!(stdout(&o), "(2,1,2)\n(2,1,1)\n");
}

#[test]
fn classify_table_and_exit_codes() {
    let o = hardyerg(&["classify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = hardyerg(&["classify", "sin(t)"]);
    assert_eq!(o.status.code(), Some(2));

    let exprs = ["t*log(t)", "t^2 + sqrt(3)*t", "sqrt(5)*t^2", "1/2*t + log(t)", "sqrt(5)*t^2 + log(t)", "2*t + log(t)"];
    let o = hardyerg(&[&["classify"], &exprs[..]].concat());
    let out = stdout(&o);
    let classes: Vec<&str> = out.lines().skip(1).map(|l| l.split("  ").map(str::trim).filter(|c| !c.is_empty()).nth(1).unwrap()).collect();
    assert_eq!(classes[0], "GoodCond1");
    assert_eq!(classes[1], "GoodCond1");
    assert!(classes[2].starts_with("GoodCond2"));
    assert!(classes[3].starts_with("GoodCond3"));
    assert_eq!(&classes[4..], ["Bad", "Bad"]);
}

#[test]
fn usage_and_runtime_errors() {
    for args in [
        &["avg", "--preset", "no-such-preset"][..],
        &["avg", "--preset", "rotation-arc-quarter"],
        &["avg", "--obs", "char(1)"],
        &["recur", "--set", "triangle(1)", "--seq", "t^(1/2)"],
        &["taylor", "--N", "0", "t^(3/2)"],
        &["avg", "--unknown-flag"],
    ] {
        assert_eq!(hardyerg(args).status.code(), Some(2), "{args:?}");
    }
    // [n^5] leaves the 64-bit range long before n = 10^5
    let o = hardyerg(&["avg", "--obs", "char(1)", "--seq", "t^5", "--N", "100000"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_files_are_validated_and_merged() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "grid_size = 3\n").unwrap();
    assert_eq!(hardyerg(&["avg", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    let good = dir.join("good.toml");
    std::fs::write(&good, "N = 512\ngrid = 8\nobservables = [\"char(1)\"]\nsequences = [\"t^(3/2)\"]\n").unwrap();
    let r = json(&hardyerg(&["avg", "--config", good.to_str().unwrap(), "--grid", "4"]));
    assert_eq!(r["config_echo"]["N"], 512);
    assert_eq!(r["config_echo"]["grid"], 4);
    assert_eq!(r["checkpoints"].as_array().unwrap().last().unwrap()["N"], 512);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn serial_runs_are_byte_identical() {
    let args = ["avg", "--preset", "furstenberg-compare-t32", "--N", "4096", "--grid", "16", "--serial"];
    let a = hardyerg(&args);
    let b = hardyerg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // work is split over initial points only, so threads do not change sums
    let parallel = hardyerg(&args[..args.len() - 1]);
    let strip = |o: &Output| {
        let mut v = json(o);
        v["config_echo"].as_object_mut().unwrap().remove("serial");
        v
    };
    assert_eq!(strip(&a), strip(&parallel));
}

#[test]
fn reports_go_to_the_output_directory() {
    let dir = scratch("out");
    let o = hardyerg(&["taylor", "t^(3/2)", "--at", "10000", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS "));
    let csv = std::fs::read_to_string(dir.join("taylor.csv")).unwrap();
    assert!(csv.starts_with("expression,N,L,k,errors,max_remainder,remainder_bound,passed\n"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("taylor.json")).unwrap()).unwrap();
    assert_eq!(r["experiment"], "taylor");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn presets_name_their_property_and_tolerance() {
    let r = json(&hardyerg(&["recur", "--preset", "rotation-arc-quarter", "--N", "20000", "--from", "2000"]));
    assert_eq!(r["preset"], "rotation-arc-quarter");
    assert!(r["verdicts"][0]["property"].as_str().unwrap().contains("recurrence"));
    assert_eq!(r["tolerances"]["bound"], 0.01);
    // μ(A)^{ℓ+1} for an arc of length 1/4 and two sequences
    let bound = 0.25f64.powi(3);
    for row in r["checkpoints"].as_array().unwrap() {
        assert_eq!(row["lower_bound"].as_f64().unwrap(), bound);
    }
}

#[test]
fn furstenberg_preset_end_to_end() {
    let r = json(&hardyerg(&["avg", "--preset", "furstenberg-compare-t32"]));
    let rows = r["checkpoints"].as_array().unwrap();
    let last = rows.last().unwrap();
    assert_eq!(last["N"], 100_000);
    assert!(last["difference"].as_f64().unwrap() <= 0.05);
    assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["passed"] == true), "{}", r["verdicts"]);
}

#[test]
fn seminorm_and_equidist_commands() {
    let r = json(&hardyerg(&["seminorm", "--system", "cyclic(6)", "--obs", "vec(1,-1,1,-1,1,-1)", "--ell", "3"]));
    // a nonconstant character of Z/6 has zero mean and seminorm 1 from order 2 on
    let rows = r["checkpoints"].as_array().unwrap();
    assert!(rows[0]["recursive"].as_f64().unwrap().abs() < 1e-12);
    for row in &rows[1..] {
        assert!((row["recursive"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    let r = json(&hardyerg(&["seminorm", "--moduli", "2,3,5", "--trials", "3", "--seed", "1"]));
    assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["passed"] == true));

    let r = json(&hardyerg(&["equidist", "--system", "affine(1,0;1,1 | sqrt(2), sqrt(3))", "--N", "2000"]));
    assert_eq!(r["verdicts"][0]["passed"], true);
    assert_eq!(r["checkpoints"].as_array().unwrap().len(), 11 * 11 - 1);
}

#[test]
fn pet_tree_of_a_family() {
    let o = hardyerg(&["pet-tree", "t, 2*t, t^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("(2,1,2) {t^2, t, 2*t}"));
    let r = json(&hardyerg(&["pet-tree", "--count", "5", "--seed", "3"]));
    assert_eq!(r["checkpoints"].as_array().unwrap().len(), 5);
    assert_eq!(r["verdicts"].as_array().unwrap().len(), 2);
}
