//! Shared fixtures for the end-to-end suites.
#![allow(dead_code)]

pub mod oracles;

use std::path::{Path, PathBuf};
use std::process::Command;

use msep::cli::synthetic::{generate_series, synthetic_config, SyntheticSpec};
use msep::domain::write_series;

/// Writes a synthetic config and series with the given shape into `dir`
/// and returns the config path.
pub fn write_instance(dir: &Path, seed: u64, stages: u32, timesteps: usize) -> PathBuf {
    let spec = SyntheticSpec {
        stages,
        years_per_stage: 5,
        timesteps,
        final_cer: 0.5,
    };
    let raw = synthetic_config(spec, Some("series.csv"));
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, raw.to_toml_string()).unwrap();
    let mut f = std::fs::File::create(dir.join("series.csv")).unwrap();
    write_series(&mut f, &generate_series(seed, timesteps)).unwrap();
    cfg
}

pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn msep(args: &[&str]) -> RunOutput {
    let out = Command::new(env!("CARGO_BIN_EXE_msep"))
        .args(args)
        .env_remove("MSEP_THREADS")
        .output()
        .expect("msep runs");
    RunOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn objective(out_dir: &Path) -> f64 {
    let text = std::fs::read_to_string(out_dir.join("plan.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["objective"].as_f64().unwrap()
}

/// Rows of a CSV file as header-keyed string maps.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

pub fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect()
}

/// Convergence log columns from `convergence.csv`.
pub struct Convergence {
    pub ub: Vec<f64>,
    pub best_lb: Vec<f64>,
    pub gap: Vec<f64>,
}

pub fn convergence(out_dir: &Path) -> Convergence {
    let (h, rows) = read_csv(&out_dir.join("convergence.csv"));
    Convergence {
        ub: column(&h, &rows, "ub"),
        best_lb: column(&h, &rows, "lb"),
        gap: column(&h, &rows, "gap"),
    }
}
