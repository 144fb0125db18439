use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gnp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn sample_is_deterministic_and_well_formed() {
    let a = gnp(&["sample", "--n", "12", "--p", "1/2", "--seed", "7"]);
    let b = gnp(&["sample", "--n", "12", "--p", "0.5", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same (n, p, seed) must give identical bytes");
    let text = stdout(&a);
    let header: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
    assert_eq!(header[0], "12");
    let m: usize = header[1].parse().unwrap();
    assert_eq!(text.lines().count(), m + 1);
}

#[test]
fn solve_agrees_between_file_and_inline_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let sampled = gnp(&["sample", "--n", "14", "--p", "1/2", "--seed", "3"]);
    fs::write(&path, &sampled.stdout).unwrap();

    let from_file = gnp(&["solve", "--in", path.to_str().unwrap()]);
    let inline = gnp(&["solve", "--n", "14", "--p", "1/2", "--seed", "3"]);
    assert!(from_file.status.success() && inline.status.success());

    let pick = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("forest_size="))
            .unwrap()
            .split(" elapsed_ms=")
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(pick(&stdout(&from_file)), pick(&stdout(&inline)));
    assert!(stdout(&inline).contains("status=optimal"));
}

#[test]
fn window_prints_the_endpoints() {
    let out = gnp(&["window", "--n", "1024", "--p", "1/2", "--eps", "0.1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("k_minus=23 k_plus=25"), "{}", stdout(&out));
}

#[test]
fn moments_prints_exact_values_on_request() {
    let out = gnp(&[
        "moments", "--n", "4", "--k", "2", "--p", "1/2", "--exact", "--second-moment",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("ln_expected_count="));
    assert!(text.contains("expected_count=9 "), "{text}");
    assert!(text.contains("second_moment="), "{text}");
}

#[test]
fn concentration_writes_reports_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let csv1 = dir.path().join("r1.csv");
    let csv2 = dir.path().join("r2.csv");
    let plot = dir.path().join("hist.csv");
    let base = [
        "concentration", "--n", "12", "--p", "1/2", "--eps", "0.3", "--samples", "6", "--seed",
        "5",
    ];

    let mut args1: Vec<&str> = base.to_vec();
    args1.extend(["--out", csv1.to_str().unwrap(), "--plot", plot.to_str().unwrap()]);
    assert!(gnp(&args1).status.success());

    let mut args2: Vec<&str> = base.to_vec();
    args2.extend(["--jobs", "1", "--out", csv2.to_str().unwrap()]);
    assert!(gnp(&args2).status.success());

    let r1 = fs::read_to_string(&csv1).unwrap();
    let r2 = fs::read_to_string(&csv2).unwrap();
    assert_eq!(r1, r2, "reports must not depend on worker count");
    assert!(r1.starts_with("index,derived_seed,forest_size,status,in_window\n"));
    assert_eq!(r1.lines().count(), 7);

    let hist = fs::read_to_string(&plot).unwrap();
    assert!(hist.starts_with("forest_size,count,is_in_window,k_minus,k_plus\n"));

    let json_out = gnp(&[
        "concentration", "--n", "12", "--p", "1/2", "--eps", "0.3", "--samples", "3", "--seed",
        "5", "--format", "json",
    ]);
    assert!(json_out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&json_out).trim()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["config"]["p"], "1/2");
}

#[test]
fn codec_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.txt");
    let code = dir.path().join("code.json");
    let back = dir.path().join("back.txt");
    // Star with center 4: {0..3} is an independent prefix.
    fs::write(&tree, "5 4\n0 4\n1 4\n2 4\n3 4\n").unwrap();

    let enc = gnp(&[
        "codec", "encode", "--m", "4", "--in", tree.to_str().unwrap(), "--out",
        code.to_str().unwrap(),
    ]);
    assert!(enc.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&code).unwrap()).unwrap();
    assert_eq!(v["n"], 5);
    assert_eq!(v["m"], 4);
    assert_eq!(v["a"], serde_json::json!([4, 4, 4]));
    assert_eq!(v["b"], serde_json::json!([]));

    let dec = gnp(&[
        "codec", "decode", "--in", code.to_str().unwrap(), "--out", back.to_str().unwrap(),
    ]);
    assert!(dec.status.success());
    assert_eq!(
        fs::read_to_string(&tree).unwrap(),
        fs::read_to_string(&back).unwrap()
    );

    // Cross-check flag disagreement is a usage error.
    let clash = gnp(&["codec", "decode", "--m", "2", "--in", code.to_str().unwrap()]);
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn verify_suite_runs_and_reports() {
    let out = gnp(&["verify", "--suite", "codec", "--max-n", "5"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("suite codec: PASS"), "{}", stdout(&out));
}

#[test]
fn exit_codes_follow_the_contract() {
    // Usage errors: 2.
    assert_eq!(
        gnp(&["sample", "--n", "3", "--p", "2", "--seed", "0"]).status.code(),
        Some(2),
        "p out of range is a usage error"
    );
    assert_eq!(
        gnp(&["sample", "--n", "3", "--p", "abc", "--seed", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(gnp(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(gnp(&["window", "--n", "10"]).status.code(), Some(2), "missing args");
    // Runtime failures: 1.
    assert_eq!(
        gnp(&["solve", "--in", "/nonexistent/graph.txt"]).status.code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "3 1\n1 0\n").unwrap(); // reversed pair
    assert_eq!(
        gnp(&["solve", "--in", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
    // Success: 0.
    assert!(Path::new(env!("CARGO_BIN_EXE_gnp")).exists());
    assert_eq!(
        gnp(&["window", "--n", "64", "--p", "1/2", "--eps", "0.3"]).status.code(),
        Some(0)
    );
}
