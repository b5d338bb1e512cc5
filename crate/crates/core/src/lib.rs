//! Invisible watermarking in the second-level Haar HL subband, a
//! compressive-sensing attack that keeps only a subset of 2D-DCT
//! coefficients, total-variation reconstruction of the attacked image,
//! and blind correlation detection of the surviving watermark.
//!
//! The pipeline, end to end:
//!
//! ```no_run
//! use wavemark::{cs_attack, image, tv_solver, watermark};
//!
//! # fn main() -> wavemark::Result<()> {
//! let original = image::load_pgm("crates/core/data/cameraman.pgm")?;
//! let key = watermark::WatermarkKey::for_image(1, &original)?;
//! let marked = watermark::embed(&original, &key, &watermark::EmbedConfig::additive(7.0)?)?;
//!
//! let plan = cs_attack::plan_measurements(256, 2000, 15000, 7)?;
//! let measured = cs_attack::acquire(&marked.clamped(), &plan)?;
//! let rec = tv_solver::reconstruct(&measured, &tv_solver::SolverConfig::default())?;
//!
//! let wrong: Vec<u64> = (1000..1100).collect();
//! let report = watermark::detect(&rec.image, &key, &wrong)?;
//! println!("detected: {}", report.decision);
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod cs_attack;
mod error;
pub mod experiment;
pub mod image;
mod serde_db;
pub mod transforms;
pub mod tv_solver;
pub mod watermark;

pub use error::{Error, Result};
pub use image::{Image, QualityReport};
