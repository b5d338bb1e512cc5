//! Command-line front end. `main.rs` only parses arguments and maps the
//! result to an exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (or watermark detected) |
//! | 1 | usage or input-data error |
//! | 2 | I/O error |
//! | 3 | `detect`: watermark not detected |
//! | 4 | solver diverged |

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cs_attack::{acquire, measurement_fraction, plan_measurements};
use crate::error::{Error, Result};
use crate::experiment::{self, run_experiment, write_response_csv, write_table_csv, RunManifest};
use crate::image::{load_pgm, psnr, save_pgm, QualityReport};
use crate::tv_solver::{reconstruct, SolverConfig, SolverMethod};
use crate::watermark::{detect, embed, wrong_seed_range, EmbedConfig, EmbedMethod, WatermarkKey};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_DETECTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "wavemark",
    version,
    about = "HL2 Haar watermarking under a compressive-sensing attack"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed a watermark and write the image plus its key file.
    Embed(EmbedArgs),
    /// Keep a subset of DCT coefficients and reconstruct by TV minimization.
    Attack(AttackArgs),
    /// Correlate an image against a key and a wrong-key ensemble.
    Detect(DetectArgs),
    /// Run the full embed/attack/detect sweep and write a CSV table.
    Experiment(ExperimentArgs),
    /// PSNR between two PGM images.
    Psnr(PsnrArgs),
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = experiment::DEFAULT_WATERMARK_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = experiment::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Additive)]
    pub method: MethodArg,
    /// Key file; defaults to the output path with extension `key.json`.
    #[arg(long)]
    pub key: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Additive,
    Multiplicative,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverArg {
    PrimalDual,
    ProjectedGradient,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long = "solver", value_enum, default_value_t = SolverArg::PrimalDual)]
    pub solver: SolverArg,
    #[arg(long = "max-iters", default_value_t = 300)]
    pub max_iters: usize,
    /// Defaults to the chosen solver's default step.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}

impl SolverArgs {
    pub fn config(&self) -> Result<SolverConfig> {
        let method = match self.solver {
            SolverArg::PrimalDual => SolverMethod::PrimalDual,
            SolverArg::ProjectedGradient => SolverMethod::ProjectedGradient,
        };
        let cfg = SolverConfig {
            method,
            max_iterations: self.max_iters,
            step_size: self.step.unwrap_or(method.default_step()),
            smoothing_epsilon: self.epsilon,
            stop_tolerance: self.tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub v1: usize,
    #[arg(long)]
    pub v2: usize,
    #[arg(long = "selection-seed", default_value_t = experiment::DEFAULT_SELECTION_SEED)]
    pub selection_seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Reconstruction report; defaults to the output path with extension `json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Unwatermarked original, for an extra PSNR in the report.
    #[arg(long)]
    pub original: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "wrong-count", default_value_t = experiment::DEFAULT_WRONG_COUNT)]
    pub wrong_count: usize,
    #[arg(long = "wrong-seed-base", default_value_t = experiment::DEFAULT_WRONG_SEED_BASE)]
    pub wrong_seed_base: u64,
    /// DetectionReport JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Per-key responses CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, required_unless_present = "manifest")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Full JSON outcome (manifest, per-row details, detection reports).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run from a saved manifest; the other experiment flags are ignored.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value_t = experiment::DEFAULT_WATERMARK_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = experiment::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long = "selection-seed", default_value_t = experiment::DEFAULT_SELECTION_SEED)]
    pub selection_seed: u64,
    #[arg(long = "wrong-count", default_value_t = experiment::DEFAULT_WRONG_COUNT)]
    pub wrong_count: usize,
    #[arg(long = "wrong-seed-base", default_value_t = experiment::DEFAULT_WRONG_SEED_BASE)]
    pub wrong_seed_base: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct PsnrArgs {
    pub reference: PathBuf,
    pub test: PathBuf,
}

/// JSON written by `attack`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub grid_side: usize,
    pub v1_count: usize,
    pub v2_count: usize,
    pub selection_seed: u64,
    pub fraction_percent: f64,
    pub solver: SolverConfig,
    pub iterations_used: usize,
    pub initial_tv: f64,
    pub final_tv: f64,
    pub data_residual: f64,
    pub psnr_vs_input: QualityReport,
    pub psnr_vs_original: Option<QualityReport>,
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Embed(a) => cmd_embed(&a),
        Command::Attack(a) => cmd_attack(&a),
        Command::Detect(a) => cmd_detect(&a),
        Command::Experiment(a) => cmd_experiment(&a),
        Command::Psnr(a) => cmd_psnr(&a),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn cmd_embed(args: &EmbedArgs) -> Result<i32> {
    let original = load_pgm(&args.input)?;
    let method = match args.method {
        MethodArg::Additive => EmbedMethod::Additive,
        MethodArg::Multiplicative => EmbedMethod::Multiplicative,
    };
    let config = EmbedConfig::new(args.alpha, method)?;
    let key = WatermarkKey::for_image(args.seed, &original)?;
    let marked = embed(&original, &key, &config)?.clamped();
    let quality = psnr(&original, &marked)?;

    save_pgm(&marked, &args.output)?;
    let key_path = args
        .key
        .clone()
        .unwrap_or_else(|| args.output.with_extension("key.json"));
    write_json(&key_path, &key)?;
    println!("embed PSNR: {} dB", quality.psnr_text());
    Ok(EXIT_OK)
}

pub fn cmd_attack(args: &AttackArgs) -> Result<i32> {
    let input = load_pgm(&args.input)?;
    let original = args.original.as_deref().map(load_pgm).transpose()?;
    let solver = args.solver.config()?;
    if input.width() != input.height() {
        return Err(Error::Dimension(format!(
            "the attack needs a square image, got {}x{}",
            input.width(),
            input.height()
        )));
    }
    let plan = plan_measurements(input.width(), args.v1, args.v2, args.selection_seed)?;
    let measured = acquire(&input, &plan)?;
    let rec = reconstruct(&measured, &solver)?;

    let report = AttackReport {
        grid_side: plan.grid_side(),
        v1_count: plan.v1_count(),
        v2_count: plan.v2_count(),
        selection_seed: plan.selection_seed(),
        fraction_percent: measurement_fraction(&plan),
        solver,
        iterations_used: rec.iterations_used,
        initial_tv: rec.initial_tv,
        final_tv: rec.final_tv,
        data_residual: rec.data_residual,
        psnr_vs_input: psnr(&input, &rec.image)?,
        psnr_vs_original: original.map(|o| psnr(&o, &rec.image)).transpose()?,
    };
    save_pgm(&rec.image, &args.output)?;
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.output.with_extension("json"));
    write_json(&report_path, &report)?;
    println!(
        "measurements: {:.2}%  PSNR: {} dB  iterations: {}",
        report.fraction_percent,
        report.psnr_vs_input.psnr_text(),
        report.iterations_used
    );
    Ok(EXIT_OK)
}

pub fn cmd_detect(args: &DetectArgs) -> Result<i32> {
    let image = load_pgm(&args.input)?;
    let key: WatermarkKey = read_json(&args.key)?;
    let wrong = wrong_seed_range(args.wrong_seed_base, args.wrong_count, key.seed);
    let report = detect(&image, &key, &wrong)?;
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }
    if let Some(path) = &args.csv {
        let mut buf = Vec::new();
        write_response_csv(&report, &mut buf)?;
        write_file(path, &buf)?;
    }
    println!(
        "right response: {:.3}  max wrong: {:.3}  detected: {}",
        report.right_response,
        report.max_wrong_response(),
        report.decision
    );
    Ok(if report.decision {
        EXIT_OK
    } else {
        EXIT_NOT_DETECTED
    })
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<i32> {
    let manifest = match &args.manifest {
        Some(path) => read_json::<RunManifest>(path)?,
        None => {
            let input = args
                .input
                .clone()
                .expect("clap enforces --input without --manifest");
            RunManifest {
                watermark_seed: args.seed,
                alpha: args.alpha,
                selection_seed: args.selection_seed,
                wrong_key_seeds: wrong_seed_range(
                    args.wrong_seed_base,
                    args.wrong_count,
                    args.seed,
                ),
                solver: args.solver.config()?,
                csv_path: args.csv.clone(),
                json_path: args.output.clone(),
                ..RunManifest::new(input)
            }
        }
    };
    if manifest.csv_path.is_none() && manifest.json_path.is_none() {
        return Err(Error::InvalidArgument("give --csv and/or --output".into()));
    }
    let original = load_pgm(&manifest.image_path)?;
    let outcome = run_experiment(&original, &manifest)?;

    if let Some(path) = &manifest.csv_path {
        let mut buf = Vec::new();
        write_table_csv(&outcome.table(), &mut buf)?;
        write_file(path, &buf)?;
    }
    if let Some(path) = &manifest.json_path {
        write_json(path, &outcome)?;
    }
    println!("embed PSNR: {} dB", outcome.embed_quality.psnr_text());
    for row in outcome.table() {
        println!(
            "v1={:>5} v2={:>5} {:>6.2}%  PSNR {:>6} dB  detection {}",
            row.v1,
            row.v2,
            row.fraction_percent,
            format!("{:.2}", row.psnr_db),
            if row.detection_succeeded {
                "succeeded"
            } else {
                "failed"
            }
        );
    }
    Ok(EXIT_OK)
}

pub fn cmd_psnr(args: &PsnrArgs) -> Result<i32> {
    let q = psnr(&load_pgm(&args.reference)?, &load_pgm(&args.test)?)?;
    println!("{}", serde_json::to_string(&q)?);
    Ok(EXIT_OK)
}
