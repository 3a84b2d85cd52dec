use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wavshrink"));
    cmd.env_remove("WAVSHRINK_WORKERS");
    cmd
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Extracts `lambda=...` from the denoise report line.
fn printed_lambda(out: &Output) -> f64 {
    let err = stderr(out);
    let field = err
        .split_whitespace()
        .find_map(|w| w.strip_prefix("lambda="))
        .expect("lambda printed");
    field.parse().unwrap()
}

#[test]
fn help_version_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["simulate", "--help"])), 0);
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["verify", "--bogus"])), 1);
    assert_eq!(code(&run(&["denoise", "--input", "x.csv"])), 1);
    assert_eq!(
        code(&run(&[
            "denoise",
            "--input",
            "missing.csv",
            "--output",
            "o.csv",
            "--alpha",
            "0.5",
            "--M",
            "1",
            "--b",
            "1"
        ])),
        1
    );
}

#[test]
fn verify_passes() {
    let out = run(&["verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn constant_input_is_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    fs::write(&input, "2.5\n".repeat(256)).unwrap();
    let output = dir.path().join("out.csv");
    for system in ["haar", "interval:2"] {
        let out = run(&[
            "denoise",
            "--input",
            path_str(&input),
            "--output",
            path_str(&output),
            "--alpha",
            "1",
            "--M",
            "1",
            "--b",
            "0.5",
            "--system",
            system,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let values = wavshrink::csv_io::read_vector(&output).unwrap();
        assert_eq!(values.len(), 256);
        let tol = if system == "haar" { 0.0 } else { 1e-12 };
        assert!(values.iter().all(|v| (v - 2.5).abs() <= tol), "{system}");
    }
}

#[test]
fn larger_delta_prints_larger_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("out.csv");
    let input = fixture("noisy_cusp.csv");
    let lambda = |delta: &str| {
        let out = run(&[
            "denoise",
            "--input",
            path_str(&input),
            "--output",
            path_str(&output),
            "--alpha",
            "0.5",
            "--M",
            "1",
            "--b",
            "1",
            "--delta",
            delta,
        ]);
        assert_eq!(code(&out), 0);
        printed_lambda(&out)
    };
    assert!(lambda("2") > lambda("1"));
}

#[test]
fn denoise_matches_golden_output() {
    let dir = tempfile::tempdir().unwrap();
    let golden = fs::read(fixture("noisy_cusp.denoised.csv")).unwrap();
    for i in 0..2 {
        let output = dir.path().join(format!("out{i}.csv"));
        let out = run(&[
            "denoise",
            "--input",
            path_str(&fixture("noisy_cusp.csv")),
            "--output",
            path_str(&output),
            "--alpha",
            "0.5",
            "--M",
            "1",
            "--b",
            "1",
            "--delta",
            "1",
            "--system",
            "haar",
        ]);
        assert_eq!(code(&out), 0);
        assert_eq!(fs::read(&output).unwrap(), golden);
    }
}

#[test]
fn non_power_of_two_needs_an_explicit_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("odd.csv");
    fs::write(&input, "1\n2\n3\n4\n5\n6\n").unwrap();
    let output = dir.path().join("out.csv");
    let base = [
        "denoise",
        "--input",
        path_str(&input),
        "--output",
        path_str(&output),
        "--alpha",
        "1",
        "--M",
        "1",
        "--b",
        "1",
    ];
    let out = run(&base);
    assert_eq!(code(&out), 1);
    assert!(!output.exists());
    for (pad, len) in [("zero", 8), ("truncate", 4)] {
        let mut args = base.to_vec();
        args.extend(["--n-pad", pad]);
        let out = run(&args);
        assert_eq!(code(&out), 0);
        assert!(stderr(&out).contains("warning"));
        assert_eq!(wavshrink::csv_io::read_vector(&output).unwrap().len(), len);
    }
}

fn simulate(plan: &Path, dir: &Path, tag: &str, workers: Option<&str>, extra: &[&str]) -> (Output, PathBuf, PathBuf) {
    let reports = dir.join(format!("{tag}.jsonl"));
    let summary = dir.join(format!("{tag}.csv"));
    let mut cmd = bin();
    cmd.args([
        "simulate",
        "--plan",
        path_str(plan),
        "--seed",
        "11",
        "--reports",
        path_str(&reports),
        "--summary",
        path_str(&summary),
    ]);
    cmd.args(extra);
    if let Some(w) = workers {
        cmd.env("WAVSHRINK_WORKERS", w);
    }
    (cmd.output().unwrap(), reports, summary)
}

#[test]
fn simulate_is_reproducible_and_rates_fit() {
    let dir = tempfile::tempdir().unwrap();
    let plan = fixture("rate_plan.json");
    let (out, reports, summary) = simulate(&plan, dir.path(), "a", Some("1"), &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (out, reports_b, summary_b) = simulate(&plan, dir.path(), "b", Some("3"), &[]);
    assert_eq!(code(&out), 0);
    let (_, reports_c, _) = simulate(&plan, dir.path(), "c", None, &["--sequential"]);
    assert_eq!(fs::read(&reports).unwrap(), fs::read(&reports_b).unwrap());
    assert_eq!(fs::read(&reports).unwrap(), fs::read(&reports_c).unwrap());
    assert_eq!(fs::read(&summary).unwrap(), fs::read(&summary_b).unwrap());
    assert_eq!(fs::read_to_string(&reports).unwrap().lines().count(), 5 * 200);

    let out = run(&["rates", "--summary", path_str(&summary), "--alpha", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let table = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = table.lines().nth(1).unwrap().split(',').collect();
    let exponent: f64 = row[2].parse().unwrap();
    assert!((exponent - 2.0 / 3.0).abs() < 0.2, "{exponent}");

    let (out, _, _) = simulate(&plan, dir.path(), "d", Some("zero"), &[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn empty_plan_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("rate_plan.json"))
        .unwrap()
        .replace("\"trials\": 200", "\"trials\": 0");
    let plan = dir.path().join("empty.json");
    fs::write(&plan, text).unwrap();
    let (out, reports, summary) = simulate(&plan, dir.path(), "e", None, &[]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(reports).unwrap(), "");
    assert_eq!(
        fs::read_to_string(summary).unwrap(),
        format!("{}\n", wavshrink::experiments::io::SUMMARY_HEADER)
    );
}

#[test]
fn bad_plans_fail_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let good = fs::read_to_string(fixture("rate_plan.json")).unwrap();
    for (i, text) in [
        "{ not json".to_string(),
        good.replace("\"trials\": 200,", ""),
        good.replace("\"n_list\": [256,", "\"n_list\": [300,"),
        good.replace("\"b\": 0.01", "\"b\": 0.01, \"extra\": 1"),
    ]
    .iter()
    .enumerate()
    {
        let plan = dir.path().join(format!("bad{i}.json"));
        fs::write(&plan, text).unwrap();
        let (out, reports, summary) = simulate(&plan, dir.path(), &format!("bad{i}"), None, &[]);
        assert_eq!(code(&out), 1, "case {i}");
        assert!(!reports.exists() && !summary.exists());
    }
    let out = run(&[
        "simulate",
        "--plan",
        path_str(&fixture("rate_plan.json")),
        "--reports",
        "r",
        "--summary",
        "s",
    ]);
    assert_eq!(code(&out), 1, "the seed is mandatory");
}

#[test]
fn rates_need_four_sample_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.csv");
    fs::write(
        &summary,
        format!(
            "{}\n256,1,0.1,0.01,1,,,\n512,1,0.08,0.01,1,,,\n1024,1,0.06,0.01,1,,,\n",
            wavshrink::experiments::io::SUMMARY_HEADER
        ),
    )
    .unwrap();
    assert_eq!(
        code(&run(&["rates", "--summary", path_str(&summary), "--alpha", "1"])),
        1
    );
}
