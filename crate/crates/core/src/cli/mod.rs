//! Batch front end: input resolution, single runs, carbon-target sweeps and
//! report writing.

pub mod manifest;
pub mod output;
pub mod synthetic;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use crate::domain::{load_config, load_series, write_series, ConfigError, ModelInputs, RawConfig, TimeSeriesBundle};
use crate::lp::LpStatus;
use crate::metrics::metrics_report;
use crate::solve::{solve_plan, Mode, SolveError, SolveOptions};
use manifest::{sha256_hex, unix_now, RunManifest, SyntheticSource};
use output::{dispatch_csv, sweep_csv, write_json, SweepRow};
use synthetic::{generate_series, synthetic_config, Profile, SyntheticSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_ITER_LIMIT: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Multi-stage expansion planning of a renewable export hub with battery,
/// hydrogen and ammonia storage.
#[derive(Debug, Clone, Parser)]
#[command(name = "msep", version)]
pub struct Args {
    /// Planning config (TOML).
    #[arg(long, conflicts_with_all = ["synthetic", "manifest"])]
    pub config: Option<PathBuf>,
    /// Time-series CSV (t,wind_pu,solar_pu,uhvdc_mw); overrides the config's `series`.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Solve the monolithic LP directly or by column generation.
    #[arg(long, value_enum, default_value = "direct")]
    pub mode: Mode,
    /// Relative gap at which column generation stops; overrides the config.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Column generation round limit; overrides the config.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Concurrent pricing solves (0 = one per core).
    #[arg(long, env = "MSEP_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Directory receiving all reports.
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Final-stage carbon targets to sweep, comma separated (e.g. 0,0.5,1).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub sweep_cer: Option<Vec<f64>>,
    /// Generate synthetic inputs as `seed:profile` (profile small or medium),
    /// write them to the output directory and solve them.
    #[arg(long, conflicts_with = "manifest")]
    pub synthetic: Option<String>,
    /// Only write the synthetic config and series, without solving.
    #[arg(long, requires = "synthetic")]
    pub generate_only: bool,
    /// Repeat the run recorded in a `manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Use the alternative textual readings of the model and price equations.
    #[arg(long)]
    pub paper_literal: bool,
    /// Record real per-iteration wall times in `convergence.csv` (otherwise
    /// zero, keeping the file reproducible byte for byte).
    #[arg(long)]
    pub wall_times: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    IterLimit(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::IterLimit(_) => EXIT_ITER_LIMIT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Infeasible(m) => CliError::Infeasible(format!("infeasible: {m}")),
            SolveError::IterLimit => CliError::IterLimit(e.to_string()),
            SolveError::Numerical(m) => CliError::Numerical(format!("numerical failure: {m}")),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

/// Where the inputs came from, for the manifest.
struct Source {
    raw: RawConfig,
    series: TimeSeriesBundle,
    config_path: Option<PathBuf>,
    config_sha256: Option<String>,
    series_path: Option<PathBuf>,
    series_sha256: String,
    synthetic: Option<SyntheticSource>,
}

fn series_bytes(series: &TimeSeriesBundle) -> Vec<u8> {
    let mut buf = Vec::new();
    write_series(&mut buf, series).expect("in-memory series");
    buf
}

fn parse_synthetic(arg: &str) -> Result<(u64, Profile), CliError> {
    let bad = || CliError::Input(format!("--synthetic expects seed:profile, got `{arg}`"));
    let (seed, profile) = arg.split_once(':').ok_or_else(bad)?;
    let seed = seed.parse().map_err(|_| bad())?;
    let profile = Profile::parse(profile).ok_or_else(bad)?;
    Ok((seed, profile))
}

fn synthetic_source(seed: u64, profile: Profile) -> Source {
    let spec = SyntheticSpec::from_profile(profile);
    let series = generate_series(seed, spec.timesteps);
    let raw = synthetic_config(spec, Some("series.csv"));
    Source {
        raw,
        series_sha256: sha256_hex(&series_bytes(&series)),
        series,
        config_path: None,
        config_sha256: None,
        series_path: None,
        synthetic: Some(SyntheticSource {
            seed,
            profile: profile.name().to_string(),
        }),
    }
}

fn load_file_series(path: &Path) -> Result<(TimeSeriesBundle, String), CliError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let series = load_series(path)?;
    Ok((series, sha256_hex(&bytes)))
}

fn config_source(path: &Path, series_override: Option<&Path>) -> Result<Source, CliError> {
    let text = std::fs::read(path).map_err(io_err(path))?;
    let raw = load_config(path)?;
    let series_path = match (series_override, &raw.series) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(rel)) => path.parent().unwrap_or(Path::new(".")).join(rel),
        (None, None) => return Err(CliError::Input("no time series: pass --series or set `series` in the config".into())),
    };
    let (series, hash) = load_file_series(&series_path)?;
    Ok(Source {
        raw,
        series,
        config_path: Some(path.to_path_buf()),
        config_sha256: Some(sha256_hex(&text)),
        series_path: Some(series_path),
        series_sha256: hash,
        synthetic: None,
    })
}

fn manifest_source(m: &RunManifest) -> Result<Source, CliError> {
    let (series, hash, series_path) = match (&m.synthetic, &m.series_path) {
        (Some(src), _) => {
            let series = generate_series(src.seed, m.config.planning.timesteps);
            let hash = sha256_hex(&series_bytes(&series));
            (series, hash, None)
        }
        (None, Some(p)) => {
            let (series, hash) = load_file_series(p)?;
            (series, hash, Some(p.clone()))
        }
        (None, None) => return Err(CliError::Input("manifest names no series".into())),
    };
    if hash != m.series_sha256 {
        return Err(CliError::Input(format!(
            "series hash {hash} differs from the manifest's {}",
            m.series_sha256
        )));
    }
    Ok(Source {
        raw: m.config.clone(),
        series,
        config_path: m.config_path.clone(),
        config_sha256: m.config_sha256.clone(),
        series_path,
        series_sha256: hash,
        synthetic: m.synthetic.clone(),
    })
}

/// Runs the command and returns the process exit code.
pub fn run_cli(args: Args) -> i32 {
    match execute(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(mut args: Args) -> Result<i32, CliError> {
    let started = unix_now();
    let clock = Instant::now();
    std::fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;

    let replay = match &args.manifest {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(io_err(p))?;
            let m: RunManifest =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            Some(m)
        }
        None => None,
    };
    let mut source = if let Some(m) = &replay {
        args.mode = match m.mode.as_str() {
            "dwdcg" => Mode::Dwdcg,
            _ => Mode::Direct,
        };
        args.epsilon = Some(m.epsilon);
        args.max_iters = Some(m.max_iterations);
        args.paper_literal = m.paper_literal;
        if !m.sweep_cer.is_empty() {
            args.sweep_cer = Some(m.sweep_cer.clone());
        }
        manifest_source(m)?
    } else if let Some(spec) = &args.synthetic {
        let (seed, profile) = parse_synthetic(spec)?;
        let src = synthetic_source(seed, profile);
        let cfg = args.out_dir.join("config.toml");
        std::fs::write(&cfg, src.raw.to_toml_string()).map_err(io_err(&cfg))?;
        let ser = args.out_dir.join("series.csv");
        std::fs::write(&ser, series_bytes(&src.series)).map_err(io_err(&ser))?;
        if args.generate_only {
            println!("wrote {} and {}", cfg.display(), ser.display());
            return Ok(EXIT_OK);
        }
        src
    } else if let Some(cfg) = &args.config {
        config_source(cfg, args.series.as_deref())?
    } else {
        return Err(CliError::Input("one of --config, --synthetic or --manifest is required".into()));
    };
    if args.paper_literal {
        source.raw.options.paper_literal = true;
    }

    let (inputs, report) = source.raw.resolve(source.series.clone())?;
    for w in report.warnings() {
        eprintln!("warning [{}]: {}", w.code, w.message);
    }
    let mut opts = SolveOptions::from_inputs(args.mode, &inputs);
    if let Some(e) = args.epsilon {
        opts.epsilon = e;
    }
    if let Some(k) = args.max_iters {
        opts.max_iterations = k;
    }
    opts.threads = args.threads;

    let mut manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        backend: "revised-simplex".into(),
        mode: args.mode.name().into(),
        epsilon: opts.epsilon,
        max_iterations: opts.max_iterations,
        threads: opts.threads,
        paper_literal: args.paper_literal,
        sweep_cer: args.sweep_cer.clone().unwrap_or_default(),
        config: source.raw.clone(),
        config_path: source.config_path.clone(),
        config_sha256: source.config_sha256.clone(),
        series_path: source.series_path.clone(),
        series_sha256: source.series_sha256.clone(),
        synthetic: source.synthetic.clone(),
        started_unix_s: started,
        finished_unix_s: 0,
        wall_ms: 0,
        status: String::new(),
        objective: None,
        iteration_wall_ms: Vec::new(),
        outputs: Vec::new(),
    };

    let outcome = match &args.sweep_cer {
        Some(targets) => run_sweep(&inputs, &opts, targets, &args.out_dir, &mut manifest),
        None => run_single(&inputs, &opts, &args, &mut manifest),
    };
    manifest.finished_unix_s = unix_now();
    manifest.wall_ms = clock.elapsed().as_millis() as u64;
    if let Err(e) = &outcome {
        manifest.status = format!("error: {e}");
    }
    manifest.outputs.push("manifest.json".into());
    let path = args.out_dir.join("manifest.json");
    write_json(&path, &manifest).map_err(io_err(&path))?;
    outcome
}

fn run_single(inputs: &ModelInputs, opts: &SolveOptions, args: &Args, manifest: &mut RunManifest) -> Result<i32, CliError> {
    let out = &args.out_dir;
    let report = solve_plan(inputs, opts)?;
    let plan = &report.plan;
    let mut files = Vec::new();
    let mut write = |name: String, bytes: Vec<u8>| -> Result<(), CliError> {
        let path = out.join(&name);
        std::fs::write(&path, bytes).map_err(io_err(&path))?;
        files.push(name);
        Ok(())
    };
    let mut plan_json = serde_json::to_string_pretty(plan).expect("plan serializes");
    plan_json.push('\n');
    write("plan.json".into(), plan_json.into_bytes())?;
    for st in &plan.stages {
        write(format!("dispatch_stage{}.csv", st.stage), dispatch_csv(plan, st.stage).into_bytes())?;
    }
    match metrics_report(plan, inputs) {
        Ok(m) => {
            let mut text = serde_json::to_string_pretty(&m).expect("metrics serialize");
            text.push('\n');
            write("metrics.json".into(), text.into_bytes())?;
        }
        Err(e) => eprintln!("warning: metrics skipped: {e}"),
    }
    if let Some(log) = &report.convergence {
        write("convergence.csv".into(), log.to_csv(!args.wall_times).into_bytes())?;
        manifest.iteration_wall_ms = log.rows.iter().map(|r| r.wall_ms).collect();
    }
    manifest.outputs.extend(files);
    manifest.objective = Some(plan.objective);
    let d = &plan.diagnostics;
    manifest.status = format!("{:?}", d.status);
    let worst = report.residuals.iter().fold(0.0f64, |m, r| m.max(r.relative));
    println!(
        "{} solve: status {:?}, objective {:.10e} {}, iterations {}, worst relative residual {:.2e}{}",
        d.mode,
        d.status,
        plan.objective,
        plan.currency,
        d.iterations,
        worst,
        d.final_gap.map_or(String::new(), |g| format!(", final gap {g:.3e}"))
    );
    println!("reports written to {}", out.display());
    Ok(if d.status == LpStatus::IterLimit {
        eprintln!("warning: iteration limit reached before the gap closed");
        EXIT_ITER_LIMIT
    } else {
        EXIT_OK
    })
}

fn run_sweep(
    inputs: &ModelInputs,
    opts: &SolveOptions,
    targets: &[f64],
    out: &Path,
    manifest: &mut RunManifest,
) -> Result<i32, CliError> {
    let mut rows = Vec::with_capacity(targets.len());
    for &target in targets {
        if !(0.0..=1.0).contains(&target) {
            return Err(CliError::Input(format!("sweep target {target} outside [0,1]")));
        }
        let mut case = inputs.clone();
        case.set_linear_cer(target);
        let row = match solve_plan(&case, opts) {
            Ok(rep) => {
                let status = format!("{:?}", rep.plan.diagnostics.status);
                match metrics_report(&rep.plan, &case) {
                    Ok(m) => SweepRow {
                        target,
                        status,
                        metrics: Some(m),
                    },
                    Err(e) => SweepRow {
                        target,
                        status: format!("metrics failed: {e}"),
                        metrics: None,
                    },
                }
            }
            Err(e) => {
                let status = match e {
                    SolveError::Infeasible(_) => "Infeasible",
                    SolveError::IterLimit => "IterLimit",
                    SolveError::Numerical(_) => "Numerical",
                };
                SweepRow {
                    target,
                    status: status.into(),
                    metrics: None,
                }
            }
        };
        println!("target {target}: {}", row.status);
        rows.push(row);
    }
    let path = out.join("sweep.csv");
    std::fs::write(&path, sweep_csv(&rows)).map_err(io_err(&path))?;
    manifest.outputs.push("sweep.csv".into());
    manifest.status = "sweep complete".into();
    Ok(EXIT_OK)
}
