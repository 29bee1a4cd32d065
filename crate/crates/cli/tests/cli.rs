use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn exe() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pierce-lab"));
    c.env_remove("PIERCE_LAB_PRECISION_BITS");
    c
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn single(args: &[&str]) -> Value {
    let mut v = lines(&run(args));
    assert_eq!(v.len(), 1);
    v.pop().unwrap()
}

fn strs(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect()
}

fn assert_no_floats(v: &Value) {
    match v {
        Value::Number(n) => assert!(n.is_u64() || n.is_i64(), "bare float {n}"),
        Value::Array(xs) => xs.iter().for_each(assert_no_floats),
        Value::Object(m) => m.values().for_each(assert_no_floats),
        _ => {}
    }
}

#[test]
fn expand_example() {
    let v = single(&["expand", "7/10"]);
    assert_eq!(v["command"], "expand");
    assert_eq!(strs(&v["results"]["digits"]), ["1", "3", "10"]);
    assert_eq!(strs(&v["results"]["tau"]), ["1", "3", "9", "10"]);
    assert_eq!(strs(&v["results"]["orbit"]), ["3/10", "1/10", "0"]);
    assert_eq!(strs(&v["results"]["partial_sums"]), ["1", "2/3", "7/10"]);
}

#[test]
fn eval_example() {
    let v = single(&["eval", "--prefix", "2", "--bits", "8"]);
    let cell = &v["results"]["fundamental_interval"];
    assert_eq!(
        (cell["left"].as_str(), cell["right"].as_str()),
        (Some("1/3"), Some("1/2"))
    );
    assert_eq!(cell["diameter"], "1/6");
    assert_eq!(v["results"]["phi"]["kind"], "exact");
    assert_eq!(v["provenance"]["precision_bits"], 8);
}

#[test]
fn eval_rule_gives_enclosure_inside_cell() {
    let v = single(&["eval", "--prefix", "2", "--rule", "power-floor", "--alpha", "1/2"]);
    assert_eq!(v["results"]["phi"]["kind"], "enclosure");
    assert_eq!(v["results"]["rule"]["family"], "power-floor");
    assert_eq!(v["params"]["rule"], "power-floor");
}

#[test]
fn cover_example_reports_ratio_window() {
    let v = single(&[
        "cover", "--alpha", "1/2", "--beta", "1/2", "--eps", "1/10", "--s", "1", "--kmax", "200",
    ]);
    let r = &v["results"];
    assert_eq!(r["threshold"], "9/10");
    assert_eq!(r["ratios"].as_array().unwrap().len(), 199);
    // a_200 / a_199 = (1 + 1/199)^(199 * 5/2) * 200^(-1/6), about 5.03, so the
    // window ends above 1 and the ratio test cannot conclude yet.
    let last = r["ratios"].as_array().unwrap().last().unwrap().as_str().unwrap();
    let (lo, _) = last.trim_matches(['[', ']']).split_once(", ").unwrap();
    let (n, d) = lo.split_once('/').unwrap();
    let approx = n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap();
    let oracle = (199.0 * 2.5 * (1.0f64 / 199.0).ln_1p() - 200f64.ln() / 6.0).exp();
    assert!((approx - oracle).abs() < 1e-9 * oracle, "{approx} vs {oracle}");
    assert_eq!(r["verdict"], "Inconclusive");
}

#[test]
fn lambda_reports_certificate() {
    let v = single(&["lambda", "--rule", "monomial", "--exponent", "2", "--window", "500"]);
    assert_eq!(v["results"]["certificate"], "1/2");
    let v = single(&["lambda", "--prefix", "2,5,11", "--window", "10"]);
    assert_eq!(v["results"]["certificate"], "0");
    // 1/3 has first digit 3, so nothing is shared on [1/3, 1/2].
    let v = single(&["lambda", "--interval", "1/3,1/2", "--window", "10"]);
    assert_eq!(v["results"]["estimate"]["certified_digits"], 0);
    let v = single(&["lambda", "--interval", "2/5,3/7", "--window", "10"]);
    assert!(v["results"]["estimate"]["certified_digits"].as_u64().unwrap() >= 1);
}

#[test]
fn construct_and_divergent() {
    let v = single(&["construct", "--alpha", "1/4", "--in", "2/5,3/7"]);
    assert_eq!(v["results"]["certificate"], "1/4");
    let v = single(&[
        "divergent",
        "--s",
        "1/2",
        "--prefix",
        "2,9,16",
        "--j",
        "2",
        "--bound",
        "3",
    ]);
    let r = &v["results"];
    assert_eq!(r["verdict"], "Divergent");
    assert!(r["first_exceeding"].as_u64().unwrap() <= r["harmonic_term_bound"].as_u64().unwrap());
}

#[test]
fn enumerate_and_refine() {
    let v = single(&[
        "enumerate",
        "--n",
        "2",
        "--alpha",
        "3/5",
        "--beta",
        "9/10",
        "--eps",
        "1/10",
        "--k",
        "2",
        "--list",
    ]);
    assert_eq!(v["results"]["count"], "6");
    assert_eq!(v["results"]["listing"].as_array().unwrap().len(), 6);
    let v = single(&["refine", "--alpha", "1/2", "--beta", "1", "--parts", "100"]);
    assert_eq!(v["results"]["bound"], "101/200");
}

#[test]
fn grid_streams_cells_then_summary() {
    let v = lines(&run(&["grid", "--alpha", "1", "--depth", "3"]));
    assert_eq!(v.len(), 9);
    for (i, cell) in v[..8].iter().enumerate() {
        assert_eq!(cell["results"]["index"], i as u64);
        assert_eq!(cell["results"]["inside"], true);
    }
    assert_eq!(v[8]["command"], "grid-summary");
    assert_eq!(v[8]["results"]["witnessed"], 8);
}

#[test]
fn sample_records_seed_and_rng() {
    let v = lines(&run(&["sample", "--bits", "256", "--count", "3", "--seed", "42"]));
    assert_eq!(v.len(), 4);
    for line in &v {
        assert_eq!(line["provenance"]["seed"], 42);
        assert!(line["provenance"]["rng"].as_str().unwrap().starts_with("ChaCha20"));
    }
    assert_eq!(v[3]["command"], "sample-summary");
    assert!(v[3]["results"].get("samples").is_none());
}

#[test]
fn reports_carry_no_floats() {
    let runs: [&[&str]; 6] = [
        &["expand", "5/17"],
        &[
            "eval", "--prefix", "3", "--rule", "binary", "--alpha", "1/2", "--word", "101",
        ],
        &["lambda", "--rule", "linear", "--offset", "3", "--window", "100"],
        &[
            "cover", "--alpha", "1", "--beta", "1", "--eps", "1/2", "--s", "3", "--kmax", "20",
        ],
        &["grid", "--alpha", "0", "--depth", "2"],
        &["sample", "--bits", "256", "--count", "2", "--seed", "1"],
    ];
    for args in runs {
        for v in lines(&run(args)) {
            assert_no_floats(&v);
            // Keys are emitted in sorted order.
            let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
            assert_eq!(keys, ["command", "params", "provenance", "results"]);
        }
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["sample", "--bits", "512", "--count", "16", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["--format", "csv", "grid", "--alpha", "1/2", "--depth", "4"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn csv_output() {
    let out = run(&["--format", "csv", "expand", "1/2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("record,path,value\n"));
    assert!(text.contains("0,results.tau.1,2\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
    assert_eq!(run(&["expand", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "3/2"]).status.code(), Some(2));
    assert_eq!(
        run(&["construct", "--alpha", "2", "--in", "0,1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["grid", "--alpha", "1/2", "--depth", "13"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "--rule", "monomial"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    let err = run(&["expand", "3/2"]);
    assert!(err.stdout.is_empty());
    assert!(!err.stderr.is_empty());
}

#[test]
fn precision_precedence() {
    let bits = |v: &Value| v["provenance"]["precision_bits"].as_u64().unwrap();
    let v = lines(
        &exe()
            .args(["expand", "1/3"])
            .env("PIERCE_LAB_PRECISION_BITS", "40")
            .output()
            .unwrap(),
    );
    assert_eq!(bits(&v[0]), 40);
    let v = lines(
        &exe()
            .args(["--precision-bits", "20", "expand", "1/3"])
            .env("PIERCE_LAB_PRECISION_BITS", "40")
            .output()
            .unwrap(),
    );
    assert_eq!(bits(&v[0]), 20);

    let dir = std::env::temp_dir().join(format!("pierce-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.toml");
    std::fs::File::create(&path)
        .unwrap()
        .write_all(b"precision_bits = 96\nformat = \"json\"\n")
        .unwrap();
    let cfg = path.to_str().unwrap();
    let v = single(&["--config", cfg, "expand", "1/3"]);
    assert_eq!(bits(&v), 96);
    let v = single(&["--config", cfg, "--precision-bits", "12", "expand", "1/3"]);
    assert_eq!(bits(&v), 12);
    std::fs::write(&path, "unknown = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg, "expand", "1/3"]).status.code(), Some(64));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn schema_is_published_and_parses() {
    let text = include_str!("../schema/report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    assert_eq!(
        schema["required"],
        serde_json::json!(["command", "params", "results", "provenance"])
    );
}
