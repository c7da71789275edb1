mod common;

use std::f64::consts::E;

use common::*;
use tempfile::tempdir;

const NOISELESS_SPEC: &str = "a_x = 0.01\nb_x = 2\na_y = 0.005\nb_y = 3\nn_frames = 100\n";

#[test]
fn simulate_writes_one_line_per_frame() {
    let dir = tempdir().unwrap();
    let spec = dir.path().join("n.spec");
    std::fs::write(&spec, NOISELESS_SPEC).unwrap();
    let out = run(["simulate", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 100);
    assert!(lines[0].starts_with(r#"{"frame":0,"#));
    assert!(lines[99].starts_with(r#"{"frame":99,"#));
    assert!(
        lines[0].contains(r#""width":4.0,"height":4.0,"confidence":1.0,"label":"rebar_endpoint""#)
    );
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = tempdir().unwrap();
    let spec = fixture("trajectory.spec");
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for path in [&a, &b] {
        let out = run([
            "simulate",
            "--spec",
            spec.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = run(["simulate", "--spec", spec.to_str().unwrap(), "--seed", "8"]);
    assert_ne!(c.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn simulate_rejects_unknown_key() {
    let dir = tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    std::fs::write(&spec, format!("{NOISELESS_SPEC}wobble = 3\n")).unwrap();
    let out = run(["simulate", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("wobble"), "{}", stderr(&out));
}

fn kv(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn fit_recovers_exponential_parameters() {
    let dir = tempdir().unwrap();
    let input = write_stream(
        dir.path(),
        "e.jsonl",
        10,
        |t| (0.2 * t + 0.5).exp(),
        |_| 50.0,
    );
    let out = run([
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--axis",
        "x",
        "--model",
        "exp",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("kind = exp\n"));
    assert_eq!(kv(&text, "a"), 0.2);
    assert_eq!(kv(&text, "b"), 0.5);
    assert_eq!(kv(&text, "n_points"), 10.0);
    assert!(text.contains("a = 0.200000\nb = 0.500000\n"), "{text}");
}

#[test]
fn fit_constant_sin_exponential() {
    let dir = tempdir().unwrap();
    let input = write_stream(dir.path(), "c.jsonl", 10, |_| E, |_| E);
    let out = run([
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--axis",
        "y",
        "--model",
        "sinexp",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(
        stdout(&out).contains("a = 0.000000\nb = 1.000000\n"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn fit_polynomial_prints_coefficients() {
    let dir = tempdir().unwrap();
    let input = write_stream(dir.path(), "p.jsonl", 12, |t| 3.0 + 0.5 * t * t, |_| 1.0);
    let out = run([
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--axis",
        "x",
        "--model",
        "poly",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(
        stdout(&out).contains("coefficients = 3.000000,0.000000,0.500000\n"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn fit_zero_value_needs_clamp() {
    let dir = tempdir().unwrap();
    let input = write_stream(
        dir.path(),
        "z.jsonl",
        10,
        |t| if t == 3.0 { 0.0 } else { t + 1.0 },
        |_| 5.0,
    );
    let args = [
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--axis",
        "x",
        "--model",
        "exp",
    ];
    let out = run(args);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("sample 3 (t = 3)"),
        "{}",
        stderr(&out)
    );

    let out = run(args.iter().copied().chain(["--clamp-nonpositive"]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn predict_gates_with_exit_code() {
    let dir = tempdir().unwrap();
    let input = write_stream(dir.path(), "c.jsonl", 10, |_| E, |_| E);
    let path = input.to_str().unwrap();

    let out = run([
        "predict",
        "--input",
        path,
        "--model",
        "sinexp",
        "--region",
        "0,0,10,10",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "69.000000,2.718282,2.718282,false\n");

    let out = run([
        "predict",
        "--input",
        path,
        "--model",
        "sinexp",
        "--region",
        "5,5,10,10",
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(stdout(&out), "69.000000,2.718282,2.718282,true\n");

    let out = run(["predict", "--input", path, "--model", "sinexp"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with(",false\n"));

    let out = run(["predict", "--input", path, "--horizon", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn predict_reads_csv_and_stdin() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("line.csv");
    let mut text = String::from("frame,left,top,width,height,confidence,label\n");
    for t in 0..20 {
        text.push_str(&format!(
            "{t},{},{},2,2,,\n",
            t as f64 - 1.0,
            2.0 * t as f64 - 1.0
        ));
    }
    std::fs::write(&csv, &text).unwrap();
    let out = run([
        "predict",
        "--input",
        csv.to_str().unwrap(),
        "--model",
        "linear",
        "--horizon",
        "10",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "29.000000,29.000000,58.000000,false\n");

    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(BIN)
        .args([
            "predict",
            "--format",
            "csv",
            "--model",
            "linear",
            "--horizon",
            "10",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(stdout(&out), "29.000000,29.000000,58.000000,false\n");
}

#[test]
fn compare_default_rows_in_table_order() {
    let dir = tempdir().unwrap();
    let input = write_stream(
        dir.path(),
        "e.jsonl",
        100,
        |t| (0.01 * t + 2.0).exp(),
        |t| (0.005 * t + 3.0).exp(),
    );
    let out = run(["compare", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let models: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(models, ["sinexp", "cosexp", "exp", "poly2"]);
    let exp_row = text.lines().find(|l| l.starts_with("exp,")).unwrap();
    assert!(
        exp_row.starts_with("exp,0.000000,0.000000,99.000000,"),
        "{exp_row}"
    );
}

#[test]
fn compare_isolates_polynomial_failure() {
    let dir = tempdir().unwrap();
    let input = write_stream(
        dir.path(),
        "e.jsonl",
        100,
        |t| (0.01 * t + 2.0).exp(),
        |t| (0.005 * t + 3.0).exp(),
    );
    let out = run([
        "compare",
        "--input",
        input.to_str().unwrap(),
        "--window",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.lines().any(|l| l.starts_with("poly2,,,99.000000,,,")),
        "{text}"
    );
    assert!(
        text.lines()
            .any(|l| l.starts_with("exp,0.000000,0.000000,")),
        "{text}"
    );
    assert!(stderr(&out).contains("poly2 unavailable"));
}

#[test]
fn compare_pretty_and_missing_truth() {
    let dir = tempdir().unwrap();
    let input = write_stream(
        dir.path(),
        "e.jsonl",
        100,
        |t| (0.01 * t + 2.0).exp(),
        |t| (0.005 * t + 3.0).exp(),
    );
    let path = input.to_str().unwrap();
    let out = run([
        "compare",
        "--input",
        path,
        "--pretty",
        "--models",
        "sinexp,exp",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("Regression"));
    assert!(text.contains("Sin exponential regression"));
    assert_eq!(text.lines().count(), 3);

    let out = run(["compare", "--input", path, "--cutoff", "50"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("ground-truth"), "{}", stderr(&out));
}

#[test]
fn plot_writes_deterministic_svg() {
    let dir = tempdir().unwrap();
    let input = write_stream(
        dir.path(),
        "e.jsonl",
        40,
        |t| (0.02 * t + 3.0).exp(),
        |t| 200.0 - t,
    );
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for path in [&a, &b] {
        let out = run([
            "plot",
            "--input",
            input.to_str().unwrap(),
            "--model",
            "exp",
            "--window",
            "20",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches(r#"class="panel""#).count(), 2);
    assert_eq!(svg.matches(r#"class="prediction""#).count(), 2);
    assert_eq!(svg.matches(r#"class="window-start""#).count(), 2);
}

#[test]
fn plot_empty_input_fails() {
    let dir = tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out = run([
        "plot",
        "--input",
        empty.to_str().unwrap(),
        "--out",
        dir.path().join("x.svg").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_stream_reports_line() {
    let dir = tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"frame\":0,\"left\":1,\"top\":1,\"width\":2,\"height\":2}\n{\"frame\":1,\"left\":1,\"top\":1,\"width\":0,\"height\":2}\n").unwrap();
    let out = run(["predict", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("line 2") && err.contains("width"), "{err}");
}
