use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn convextest(args: &[&str]) -> Out {
    run_with(args, &[])
}

fn run_with(args: &[&str], env: &[(&str, &str)]) -> Out {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_convextest"));
    cmd.args(args).env_remove("CONVEXTEST_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Out {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

fn lines(s: &str) -> Vec<Value> {
    s.lines().map(json).collect()
}

/// Generates into `dir` and returns the path.
fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let out = convextest(&all);
    assert_eq!(out.code, 0, "{}", out.stderr);
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn ids_arg(v: &Value) -> String {
    v.as_array()
        .unwrap()
        .iter()
        .map(|i| i.as_u64().unwrap().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn validator() -> jsonschema::Validator {
    let text = include_str!("../../../docs/result_record.schema.json");
    jsonschema::validator_for(&json(text)).unwrap()
}

fn assert_valid(v: &Value) {
    let errors: Vec<String> = validator().iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v}");
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = gen(
        dir.path(),
        "a.txt",
        &["sawtooth", "--n", "12", "--seed", "3"],
    );
    let b = gen(
        dir.path(),
        "b.txt",
        &["sawtooth", "--n", "12", "--seed", "3"],
    );
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let printed = convextest(&["gen", "sawtooth", "--n", "12", "--seed", "3"]);
    assert_eq!(printed.stdout, text);
    assert!(text.contains("# tag: far<1/4"));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "2 12");
    assert_eq!(data.len(), 13);
    let other = convextest(&["gen", "sawtooth", "--n", "12", "--seed", "4"]);
    assert_ne!(other.stdout, text);
}

#[test]
fn seed_defaults_to_the_environment() {
    let a = run_with(
        &["gen", "convex-circle", "--n", "6"],
        &[("CONVEXTEST_SEED", "17")],
    );
    let b = convextest(&["gen", "convex-circle", "--n", "6", "--seed", "17"]);
    let c = convextest(&["gen", "convex-circle", "--n", "6"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn small_convex_set_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "c4.txt",
        &["convex-circle", "--n", "4", "--seed", "1"],
    );
    let out = convextest(&["oracle", p(&f), "--mode", "convex"]);
    assert_eq!(out.code, 0);
    let v = json(&out.stdout);
    assert_eq!(v["in_convex_position"], true);
    assert_eq!(v["n"], 4);
    assert!(v["witness"].is_null());
}

#[test]
fn sawtooth_oracles() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "s12.txt",
        &["sawtooth", "--n", "12", "--seed", "0"],
    );
    let out = convextest(&["oracle", p(&f), "--mode", "min-removal"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["min_removal"], 3);
    let kept: Vec<String> = (0..12)
        .filter(|i| {
            !v["removed_ids"]
                .as_array()
                .unwrap()
                .contains(&Value::from(*i))
        })
        .map(|i| i.to_string())
        .collect();
    let rest = convextest(&[
        "oracle",
        p(&f),
        "--mode",
        "convex",
        "--subset",
        &kept.join(","),
    ]);
    assert_eq!(rest.code, 0);

    let out = convextest(&["oracle", p(&f), "--mode", "max-subset-2d"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["mode"], "max-subset-2d");
    assert_eq!(v["size"], 9);
    let best = convextest(&[
        "oracle",
        p(&f),
        "--mode",
        "convex",
        "--subset",
        &ids_arg(&v["ids"]),
    ]);
    assert_eq!(best.code, 0);
}

#[test]
fn triangle_with_centroid_is_not_convex() {
    let dir = TempDir::new().unwrap();
    let f = gen(dir.path(), "tc.txt", &["triangle-centroid", "--n", "4"]);
    let out = convextest(&["oracle", p(&f), "--mode", "convex"]);
    assert_eq!(out.code, 1);
    let v = json(&out.stdout);
    assert_eq!(v["in_convex_position"], false);
    assert_eq!(v["witness"]["ids"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(v["witness"]["interior_id"], 3);
    assert_eq!(
        v["witness"]["coefficients"],
        serde_json::json!(["1/3", "1/3", "1/3"])
    );
}

#[test]
fn far_tester_accepts_convex_input() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "c.txt",
        &["convex-circle", "--n", "2048", "--seed", "8"],
    );
    let out = convextest(&["test-far", p(&f), "--epsilon", "0.1", "--seed", "5"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_valid(&v);
    assert_eq!(v["decision"], "accept");
    assert_eq!(v["params"]["epsilon"], "1/10");
    assert_eq!(v["params"]["repetitions"], 22);
    assert_eq!(v["trials"].as_array().unwrap().len(), 22);
    assert!(v["certificate"].is_null());
}

#[test]
fn far_tester_rejects_sawtooth_batches() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "s.txt",
        &["sawtooth", "--n", "2048", "--seed", "2"],
    );
    let out = convextest(&[
        "test-far",
        p(&f),
        "--epsilon",
        "0.1",
        "--seed",
        "11",
        "--batch",
        "100",
        "--jobs",
        "2",
    ]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    let records = lines(&out.stdout);
    assert_eq!(records.len(), 100);
    let mut rejected = 0;
    for r in &records {
        assert_valid(r);
        if r["decision"] == "reject" {
            rejected += 1;
        }
    }
    // at least 2/3 - 0.1 of the runs
    assert!(rejected >= 57, "{rejected}");
    // every certificate re-verifies through the oracle
    for r in records.iter().filter(|r| r["decision"] == "reject") {
        let cert = &r["certificate"];
        assert_eq!(cert["kind"], "negative");
        assert_eq!(cert["ids"].as_array().unwrap().len(), 4);
        let check = convextest(&[
            "oracle",
            p(&f),
            "--mode",
            "convex",
            "--subset",
            &ids_arg(&cert["ids"]),
        ]);
        assert_eq!(check.code, 1);
        let w = &json(&check.stdout)["witness"];
        assert_eq!(w["interior_id"], cert["interior_id"]);
        assert_eq!(w["support"], cert["support"]);
        assert_eq!(w["coefficients"], cert["coefficients"]);
    }
    // a run replays from its recorded seed
    let first = &records[0];
    let replay = convextest(&[
        "test-far",
        p(&f),
        "--epsilon",
        "1/10",
        "--seed",
        &first["seed"].to_string(),
    ]);
    let again = json(&replay.stdout);
    assert_eq!(again["certificate"], first["certificate"]);
    assert_eq!(again["trials"], first["trials"]);
}

#[test]
fn batch_output_does_not_depend_on_jobs() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "s.txt",
        &["sawtooth", "--n", "1024", "--seed", "0"],
    );
    let strip = |s: &str| -> Vec<Value> {
        lines(s)
            .into_iter()
            .map(|mut v| {
                v["wall_ms"] = Value::from(0);
                v
            })
            .collect()
    };
    let base = ["test-far", p(&f), "--epsilon", "0.1", "--batch", "6"];
    let one = convextest(&[&base[..], &["--jobs", "1"]].concat());
    let three = convextest(&[&base[..], &["--jobs", "3", "--parallel"]].concat());
    assert_eq!(one.code, three.code);
    assert_eq!(strip(&one.stdout), strip(&three.stdout));
}

#[test]
fn far_tester_constraint_errors() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "c.txt",
        &["convex-circle", "--n", "2048", "--seed", "0"],
    );
    let out = convextest(&["test-far", p(&f), "--epsilon", "0.4"]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("epsilon ≤ (d−1)/(2d)"),
        "{}",
        out.stderr
    );
    assert!(out.stdout.is_empty());
    let small = gen(dir.path(), "small.txt", &["convex-circle", "--n", "500"]);
    let out = convextest(&["test-far", p(&small), "--epsilon", "0.1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("n ≥ 2^10"));
    let out = convextest(&["test-far", p(&f), "--epsilon", "0.1", "--reps", "0"]);
    assert_eq!(out.code, 2);
    let out = convextest(&["test-far", p(&f)]);
    assert_eq!(out.code, 2);
    let out = convextest(&["test-far", p(&f), "--epsilon", "1/10", "--batch", "0"]);
    assert_eq!(out.code, 2);
}

#[test]
fn close_tester_accepts_with_a_convex_certificate() {
    let dir = TempDir::new().unwrap();
    // 1500^(-0.95) rounded to eight decimal places
    let eps = "0.00096098";
    let f = gen(
        dir.path(),
        "close.txt",
        &[
            "convex-plus-interior",
            "--n",
            "1500",
            "--epsilon",
            eps,
            "--seed",
            "2",
        ],
    );
    let out = convextest(&["test-close", p(&f), "--epsilon", eps, "--seed", "4"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_valid(&v);
    assert_eq!(v["params"]["s"], 174);
    assert_eq!(v["params"]["delta"], "1/10");
    let cert = &v["certificate"];
    assert_eq!(cert["kind"], "positive");
    assert_eq!(cert["ids"].as_array().unwrap().len(), 174);
    let check = convextest(&[
        "oracle",
        p(&f),
        "--mode",
        "convex",
        "--subset",
        &ids_arg(&cert["ids"]),
    ]);
    assert_eq!(check.code, 0);
}

#[test]
fn close_tester_constraint_errors() {
    let dir = TempDir::new().unwrap();
    let small = gen(dir.path(), "c1000.txt", &["convex-circle", "--n", "1000"]);
    let out = convextest(&["test-close", p(&small), "--epsilon", "0.001"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("n ≥ 1500"), "{}", out.stderr);
    let f = gen(dir.path(), "c1500.txt", &["convex-circle", "--n", "1500"]);
    let out = convextest(&["test-close", p(&f), "--epsilon", "0.01"]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("epsilon ≤ n^(delta−1)"),
        "{}",
        out.stderr
    );
    let out = convextest(&["test-close", p(&f), "--epsilon", "0.001", "--delta", "0.6"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("0 < delta ≤ 1/2"));
}

#[test]
fn lemma3_appendix() {
    let out = convextest(&["verify-lemma3", "--appendix"]);
    assert_eq!(out.code, 0);
    let v = json(&out.stdout);
    assert_eq!(v["s_original"], 363);
    assert_eq!(v["s_ceiling"], 184);
    let f1 = v["f1_approx"].as_f64().unwrap();
    assert!(f1 > 0.5147 && f1 < 0.5148);
    assert_eq!(v["appendix_product_below_quarter"], true);
    assert_eq!(v["corrected_product_at_least_quarter"], true);
}

#[test]
fn lemma3_monte_carlo() {
    let out = convextest(&[
        "verify-lemma3",
        "--n",
        "1024",
        "--k",
        "10",
        "--ell",
        "3",
        "--seed",
        "1",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["s"], 380);
    assert_eq!(v["empirical"]["trials"], 10_000);
    assert!(v["empirical"]["probability"].as_f64().unwrap() >= 0.24);
    assert_eq!(v["product_at_least_quarter"], true);

    let out = convextest(&["verify-lemma3", "--s", "1024", "--trials", "200"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["empirical"]["probability"], 1.0);
    assert_eq!(v["exact_probability"], "1");

    let out = convextest(&["verify-lemma3", "--k", "5"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("k ≥ 10"), "{}", out.stderr);
    let out = convextest(&[
        "verify-lemma3",
        "--k",
        "5",
        "--unconstrained",
        "--trials",
        "100",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn parse_errors_report_line_numbers() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("# header next\n2 3\n0 0\n1 x\n1 1\n", "line 4"),
        ("2 2\n0 0\n1\n", "line 3"),
        ("2 2\n0 0\n0.0 0/5\n", "line 3"),
        ("two 2\n", "line 1"),
        ("2 3\n0 0\n1 1\n", "expected 3 points"),
        ("2 1\n1/0 1\n", "line 2"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let f = dir.path().join(format!("bad{i}.txt"));
        std::fs::write(&f, text).unwrap();
        let out = convextest(&["oracle", p(&f), "--mode", "convex"]);
        assert_eq!(out.code, 2, "{text}");
        assert!(out.stderr.contains(needle), "{text}: {}", out.stderr);
        assert!(out.stdout.is_empty());
    }
    let out = convextest(&["oracle", "/nonexistent/file.txt", "--mode", "convex"]);
    assert_eq!(out.code, 2);
}

#[test]
fn decimal_input_is_exact() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("dec.txt");
    // (1/20, 1/20) lies inside the first three points
    std::fs::write(&f, "2 4\n0 0\n1 0\n0 1\n0.05 5e-2\n").unwrap();
    let out = convextest(&["oracle", p(&f), "--mode", "convex"]);
    assert_eq!(out.code, 1);
    let v = json(&out.stdout);
    assert_eq!(v["witness"]["interior_id"], 3);
    assert_eq!(
        v["witness"]["coefficients"],
        serde_json::json!(["9/10", "1/20", "1/20"])
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(convextest(&[]).code, 2);
    assert_eq!(convextest(&["gen", "spiral", "--n", "5"]).code, 2);
    let out = convextest(&["gen", "convex-plus-interior", "--n", "20"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("epsilon"));
    assert_eq!(
        convextest(&["gen", "sawtooth", "--n", "12", "--d", "3"]).code,
        2
    );
    let dir = TempDir::new().unwrap();
    let f = gen(
        dir.path(),
        "c.txt",
        &["convex-moment-curve", "--n", "30", "--d", "3"],
    );
    let out = convextest(&["oracle", p(&f), "--mode", "max-subset-2d"]);
    assert_eq!(out.code, 2);
    let out = convextest(&["oracle", p(&f), "--mode", "min-removal"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("budget"));
    let out = convextest(&["oracle", p(&f), "--mode", "convex", "--subset", "1,1"]);
    assert_eq!(out.code, 2);
    let out = convextest(&["oracle", p(&f), "--mode", "convex", "--subset", "99"]);
    assert_eq!(out.code, 2);
}
