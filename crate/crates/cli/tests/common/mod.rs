#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rebarfit::{write_detections, DetectionRecord, StreamFormat};

pub const BIN: &str = env!("CARGO_BIN_EXE_rebarfit");

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(BIN)
        .args(args)
        .output()
        .expect("spawn rebarfit")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Writes a JSONL stream whose box centres are `(x(t), y(t))` for `t` in `0..n`.
pub fn write_stream(
    dir: &Path,
    name: &str,
    n: u64,
    x: impl Fn(f64) -> f64,
    y: impl Fn(f64) -> f64,
) -> PathBuf {
    let records: Vec<_> = (0..n)
        .map(|t| DetectionRecord::centered(t, x(t as f64), y(t as f64), 4.0))
        .collect();
    let path = dir.join(name);
    std::fs::write(&path, write_detections(&records, StreamFormat::Jsonl)).unwrap();
    path
}

/// Compares against a golden file, rewriting it when `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected =
        std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!(
            "{} differs:\n--- expected\n{expected}--- actual\n{actual}",
            path.display()
        ))
    }
}
