//! Table-style sweep: embed once, then for each `(v1, v2)` measurement
//! budget run attack, reconstruction and detection, and collect one row.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cs_attack::{acquire, measurement_fraction, plan_measurements};
use crate::error::{Error, Result};
use crate::image::{psnr, Image, QualityReport};
use crate::serde_db::format_db;
use crate::tv_solver::{reconstruct, SolverConfig};
use crate::watermark::{
    detect, embed, wrong_seed_range, DetectionReport, EmbedConfig, WatermarkKey,
};

/// Built-in `(v1, v2)` measurement budgets for a 256x256 image.
pub const TABLE_ROWS: [(usize, usize); 6] = [
    (2000, 12000),
    (2000, 15000),
    (0, 17000),
    (1000, 17000),
    (5000, 15000),
    (0, 30000),
];

pub const CSV_HEADER: [&str; 7] = [
    "v1",
    "v2",
    "fraction_percent",
    "psnr_db",
    "detection",
    "right_response",
    "max_wrong_response",
];

pub const DEFAULT_WATERMARK_SEED: u64 = 1;
pub const DEFAULT_ALPHA: f64 = 7.0;
pub const DEFAULT_SELECTION_SEED: u64 = 7;
pub const DEFAULT_WRONG_COUNT: usize = 100;
pub const DEFAULT_WRONG_SEED_BASE: u64 = 1000;

/// Everything needed to reproduce an experiment's outputs byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub image_path: PathBuf,
    pub watermark_seed: u64,
    pub alpha: f64,
    pub selection_seed: u64,
    pub wrong_key_seeds: Vec<u64>,
    pub rows: Vec<(usize, usize)>,
    pub solver: SolverConfig,
    pub csv_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
}

impl RunManifest {
    pub fn new(image_path: impl Into<PathBuf>) -> Self {
        RunManifest {
            image_path: image_path.into(),
            watermark_seed: DEFAULT_WATERMARK_SEED,
            alpha: DEFAULT_ALPHA,
            selection_seed: DEFAULT_SELECTION_SEED,
            wrong_key_seeds: wrong_seed_range(
                DEFAULT_WRONG_SEED_BASE,
                DEFAULT_WRONG_COUNT,
                DEFAULT_WATERMARK_SEED,
            ),
            rows: TABLE_ROWS.to_vec(),
            solver: SolverConfig::default(),
            csv_path: None,
            json_path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub v1: usize,
    pub v2: usize,
    pub fraction_percent: f64,
    /// Reconstruction vs. watermarked image.
    #[serde(with = "crate::serde_db")]
    pub psnr_db: f64,
    pub detection_succeeded: bool,
    pub right_response: f64,
    pub max_wrong_response: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowDetail {
    pub row: ExperimentRow,
    pub psnr_vs_original: QualityReport,
    pub iterations_used: usize,
    pub initial_tv: f64,
    pub final_tv: f64,
    pub data_residual: f64,
    pub detection: DetectionReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub manifest: RunManifest,
    pub key: WatermarkKey,
    /// Original vs. watermarked (clamped, not quantized).
    pub embed_quality: QualityReport,
    pub watermarked_detection: DetectionReport,
    pub rows: Vec<RowDetail>,
}

impl ExperimentOutcome {
    pub fn table(&self) -> Vec<ExperimentRow> {
        self.rows.iter().map(|d| d.row.clone()).collect()
    }
}

/// Additive embedding followed by the display clamp; the attack input.
pub fn watermark_image(original: &Image, key: &WatermarkKey, alpha: f64) -> Result<Image> {
    Ok(embed(original, key, &EmbedConfig::additive(alpha)?)?.clamped())
}

/// Attack, reconstruct and detect for one `(v1, v2)` budget.
pub fn run_row(
    original: &Image,
    watermarked: &Image,
    key: &WatermarkKey,
    v1: usize,
    v2: usize,
    manifest: &RunManifest,
) -> Result<RowDetail> {
    if watermarked.width() != watermarked.height() {
        return Err(Error::Dimension(format!(
            "the attack needs a square image, got {}x{}",
            watermarked.width(),
            watermarked.height()
        )));
    }
    let plan = plan_measurements(watermarked.width(), v1, v2, manifest.selection_seed)?;
    let measured = acquire(watermarked, &plan)?;
    let rec = reconstruct(&measured, &manifest.solver)?;
    let detection = detect(&rec.image, key, &manifest.wrong_key_seeds)?;
    Ok(RowDetail {
        row: ExperimentRow {
            v1,
            v2,
            fraction_percent: measurement_fraction(&plan),
            psnr_db: psnr(watermarked, &rec.image)?.psnr_db,
            detection_succeeded: detection.decision,
            right_response: detection.right_response,
            max_wrong_response: detection.max_wrong_response(),
        },
        psnr_vs_original: psnr(original, &rec.image)?,
        iterations_used: rec.iterations_used,
        initial_tv: rec.initial_tv,
        final_tv: rec.final_tv,
        data_residual: rec.data_residual,
        detection,
    })
}

/// Runs every row of the manifest. Rows execute in parallel; the output
/// keeps manifest order.
pub fn run_experiment(original: &Image, manifest: &RunManifest) -> Result<ExperimentOutcome> {
    let key = WatermarkKey::for_image(manifest.watermark_seed, original)?;
    let watermarked = watermark_image(original, &key, manifest.alpha)?;
    let embed_quality = psnr(original, &watermarked)?;
    let watermarked_detection = detect(&watermarked, &key, &manifest.wrong_key_seeds)?;
    let rows = manifest
        .rows
        .par_iter()
        .map(|&(v1, v2)| {
            run_row(original, &watermarked, &key, v1, v2, manifest).map_err(|e| {
                Error::ExperimentRow {
                    v1,
                    v2,
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutcome {
        manifest: manifest.clone(),
        key,
        embed_quality,
        watermarked_detection,
        rows,
    })
}

pub fn write_table_csv(rows: &[ExperimentRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.v1.to_string(),
            r.v2.to_string(),
            r.fraction_percent.to_string(),
            format_db(r.psnr_db),
            r.detection_succeeded.to_string(),
            r.right_response.to_string(),
            r.max_wrong_response.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Detector response per trial key: the right key first, then the wrong keys
/// in order. Columns: `index,seed,response,is_right`.
pub fn write_response_csv(report: &DetectionReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "seed", "response", "is_right"])?;
    w.write_record([
        "0".to_string(),
        report.right_seed.to_string(),
        report.right_response.to_string(),
        "true".to_string(),
    ])?;
    for (i, (seed, resp)) in report
        .wrong_seeds
        .iter()
        .zip(&report.wrong_responses)
        .enumerate()
    {
        w.write_record([
            (i + 1).to_string(),
            seed.to_string(),
            resp.to_string(),
            "false".to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
