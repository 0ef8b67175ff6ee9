use std::fs;
use std::path::{Path, PathBuf};

use censored_llr::bandwidth::DEFAULT_GRID_SIZE;
use censored_llr::estimators::fit;
use censored_llr::prelude::*;
use clap::{Args, Parser, Subcommand};

use crate::config::{unix_now, RunManifest, StudyFile};
use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Parser)]
#[command(
    name = "cllr",
    version,
    about = "Local linear regression for right-censored responses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a smoother to an `x,y,delta` CSV and write `x,estimate,degenerate`.
    Fit(FitArgs),
    /// Draw a sample from the simulation model as `x,y,delta,z_latent`.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo study from a TOML config or a previous manifest.
    Study(StudyArgs),
}

/// `cv` or a positive bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthArg {
    Cv,
    Fixed(f64),
}

fn parse_bandwidth(s: &str) -> std::result::Result<BandwidthArg, String> {
    if s.eq_ignore_ascii_case("cv") {
        return Ok(BandwidthArg::Cv);
    }
    let h: f64 = s
        .parse()
        .map_err(|_| format!("expected `cv` or a number, got `{s}`"))?;
    Bandwidth::new(h)
        .map(|_| BandwidthArg::Fixed(h))
        .map_err(|e| e.to_string())
}

fn parse_estimator(s: &str) -> std::result::Result<EstimatorKind, String> {
    match s.parse::<EstimatorKind>() {
        Ok(EstimatorKind::LlrPseudo) => {
            Err("llr_pseudo needs the true survival; use llr or cr".into())
        }
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_target(s: &str) -> std::result::Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("not a number: `{s}`"))?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(format!(
            "censoring target {s} must lie strictly between 0 and 1"
        ))
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV with header `x,y,delta` (`-` for stdin).
    pub input: PathBuf,
    #[arg(long, default_value = "gaussian", value_parser = |s: &str| s.parse::<KernelSpec>().map_err(|e| e.to_string()))]
    pub kernel: KernelSpec,
    /// Bandwidth, or `cv` for leave-one-out cross-validation.
    #[arg(long, default_value = "cv", value_parser = parse_bandwidth)]
    pub bandwidth: BandwidthArg,
    #[arg(long, default_value = "llr", value_parser = parse_estimator)]
    pub estimator: EstimatorKind,
    /// Cross-validation loss.
    #[arg(long, default_value = "ipcw", value_parser = |s: &str| s.parse::<CvLoss>().map_err(|e| e.to_string()))]
    pub cv_loss: CvLoss,
    /// Number of candidates in the data-driven bandwidth grid.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub cv_grid_size: usize,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,
    /// Output CSV (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    /// Target censoring proportion in (0, 1).
    #[arg(long, value_parser = parse_target)]
    pub cp: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.2)]
    pub noise_scale: f64,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// TOML study config.
    #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
    pub config: Option<PathBuf>,
    /// Rerun the study recorded in a previous `manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Directory for `mse_report.csv`, `raw_replications.csv` and `manifest.json`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(args) => cmd_fit(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Study(args) => cmd_study(&args).map(|_| ()),
    }
}

/// Builds the fit for a parsed dataset; separated from I/O for testing.
pub fn fit_dataset(data: &Dataset, args: &FitArgs) -> Result<(FitResult, Option<Bandwidth>)> {
    let km = km_censoring_survival(data)?;
    let synth = synthetic_responses(data, &km);
    let grid = EvalGrid::equispaced(args.grid_min, args.grid_max, args.grid_points)?;
    let (h, selected) = match args.bandwidth {
        BandwidthArg::Fixed(h) => (Bandwidth::new(h)?, None),
        BandwidthArg::Cv => {
            if data.len() < 2 {
                return Err(CliError::Data(format!(
                    "cross-validation needs at least 2 records, got {}",
                    data.len()
                )));
            }
            if args.cv_grid_size == 0 {
                return Err(CliError::Usage("--cv-grid-size must be at least 1".into()));
            }
            let candidates = BandwidthGrid::default_for(data, args.cv_grid_size)
                .map_err(|e| CliError::Data(e.to_string()))?;
            let h = select_bandwidth(
                data,
                &synth,
                &candidates,
                args.kernel,
                args.estimator,
                args.cv_loss,
            )?;
            (h, Some(h))
        }
    };
    let result = fit(args.estimator, data, &synth, grid.points(), h, args.kernel)?;
    Ok((result, selected))
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let data = io::read_dataset(io::open_input(&args.input)?)?;
    let (result, selected) = fit_dataset(&data, args)?;
    if let Some(h) = selected {
        eprintln!("selected bandwidth: {h}");
    }
    io::write_fit(io::open_output(args.output.as_deref())?, &result)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let c = calibrate_censor_location(args.cp, args.noise_scale)?;
    let sim = simulate(&SimulationConfig::new(
        args.n,
        args.noise_scale,
        c,
        args.seed,
    ))?;
    io::write_simulated(io::open_output(args.out.as_deref())?, &sim)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, f: impl FnOnce(fs::File) -> Result<()>) -> Result<()> {
    f(fs::File::create(path).map_err(|e| CliError::io(path, e))?)
}

/// Runs a study and writes its three output files. Returns the manifest.
pub fn cmd_study(args: &StudyArgs) -> Result<RunManifest> {
    let file = match (&args.config, &args.manifest) {
        (Some(path), None) => StudyFile::from_toml(&read_text(path)?)?,
        (None, Some(path)) => RunManifest::from_json(&read_text(path)?)?.config,
        _ => {
            return Err(CliError::Usage(
                "pass either a config file or --manifest".into(),
            ))
        }
    };
    let config = file.to_study_config()?;
    let mut manifest = RunManifest::new(&file, &config, unix_now())?;
    let out = run_study(&config)?;
    manifest.finished_unix = unix_now();

    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    write_file(&args.out_dir.join("mse_report.csv"), |f| {
        io::write_report(f, &out.report)
    })?;
    write_file(&args.out_dir.join("raw_replications.csv"), |f| {
        io::write_replications(f, &out.replications)
    })?;
    let manifest_path = args.out_dir.join("manifest.json");
    fs::write(&manifest_path, manifest.to_json() + "\n")
        .map_err(|e| CliError::io(&manifest_path, e))?;
    Ok(manifest)
}
