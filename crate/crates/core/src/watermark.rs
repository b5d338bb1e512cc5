//! Pseudo-random watermarks in the level-2 HL Haar subband and blind
//! correlation detection.
//!
//! A key is a `(seed, length)` pair. The sequence is drawn from the
//! standard normal distribution with a ChaCha20 generator seeded from the
//! 64-bit seed, so it is identical across runs and platforms. Embedding
//! pairs sequence element `i` with the `i`-th HL2 coefficient in row-major
//! order; the correlator uses the same pairing.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::transforms::{haar_inverse, haar_pyramid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "KeyFile", into = "KeyFile")]
pub struct WatermarkKey {
    pub seed: u64,
    pub length: usize,
}

#[derive(Serialize, Deserialize)]
struct KeyFile {
    seed: u64,
    length: usize,
    distribution: String,
}

impl From<WatermarkKey> for KeyFile {
    fn from(k: WatermarkKey) -> Self {
        KeyFile {
            seed: k.seed,
            length: k.length,
            distribution: "normal".into(),
        }
    }
}

impl TryFrom<KeyFile> for WatermarkKey {
    type Error = String;

    fn try_from(f: KeyFile) -> std::result::Result<Self, String> {
        if f.distribution != "normal" {
            return Err(format!("unsupported distribution {:?}", f.distribution));
        }
        if f.length == 0 {
            return Err("key length must be positive".into());
        }
        Ok(WatermarkKey {
            seed: f.seed,
            length: f.length,
        })
    }
}

impl WatermarkKey {
    pub fn new(seed: u64, length: usize) -> Self {
        WatermarkKey { seed, length }
    }

    /// Key covering the whole HL2 band of `image`.
    pub fn for_image(seed: u64, image: &Image) -> Result<Self> {
        Ok(WatermarkKey {
            seed,
            length: hl2_len(image.width(), image.height())?,
        })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        WatermarkKey { seed, ..*self }
    }
}

/// Number of level-2 HL coefficients of a `width x height` image.
pub fn hl2_len(width: usize, height: usize) -> Result<usize> {
    if width == 0 || height == 0 || !width.is_multiple_of(4) || !height.is_multiple_of(4) {
        return Err(Error::Dimension(format!(
            "two Haar levels need sides divisible by 4, got {width}x{height}"
        )));
    }
    Ok((width / 4) * (height / 4))
}

pub fn generate_sequence(key: &WatermarkKey) -> Result<Vec<f64>> {
    if key.length == 0 {
        return Err(Error::InvalidArgument(
            "watermark length must be positive".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(key.seed);
    Ok(StandardNormal
        .sample_iter(&mut rng)
        .take(key.length)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedMethod {
    /// `I_w = I + alpha * w`
    Additive,
    /// `I_w = I + alpha * w * |I|`
    Multiplicative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    alpha: f64,
    method: EmbedMethod,
}

impl EmbedConfig {
    pub fn new(alpha: f64, method: EmbedMethod) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be finite and nonnegative, got {alpha}"
            )));
        }
        Ok(EmbedConfig { alpha, method })
    }

    pub fn additive(alpha: f64) -> Result<Self> {
        Self::new(alpha, EmbedMethod::Additive)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn method(&self) -> EmbedMethod {
        self.method
    }
}

fn check_length(key: &WatermarkKey, image: &Image) -> Result<()> {
    let expected = hl2_len(image.width(), image.height())?;
    if key.length != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: key.length,
        });
    }
    Ok(())
}

/// Embeds the key's sequence into HL2. The result is not clamped.
pub fn embed(image: &Image, key: &WatermarkKey, config: &EmbedConfig) -> Result<Image> {
    check_length(key, image)?;
    let mark = generate_sequence(key)?;
    let mut pyramid = haar_pyramid(image)?;
    let alpha = config.alpha;
    for (coef, w) in pyramid.level2.hl.pixels_mut().iter_mut().zip(&mark) {
        *coef += match config.method {
            EmbedMethod::Additive => alpha * w,
            EmbedMethod::Multiplicative => alpha * w * coef.abs(),
        };
    }
    haar_inverse(&pyramid)
}

fn hl2_of(image: &Image) -> Result<Image> {
    Ok(haar_pyramid(image)?.level2.hl)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Correlator response `D = sum_i w_i * HL2_i`.
pub fn correlate(image: &Image, key: &WatermarkKey) -> Result<f64> {
    check_length(key, image)?;
    Ok(dot(hl2_of(image)?.pixels(), &generate_sequence(key)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub right_seed: u64,
    pub right_response: f64,
    pub wrong_seeds: Vec<u64>,
    pub wrong_responses: Vec<f64>,
    pub wrong_key_count: usize,
    /// `right_response > max(wrong_responses)`.
    pub decision: bool,
    /// `(right - mean(wrong)) / std(wrong)` with the population standard
    /// deviation; `None` when the wrong responses have zero spread.
    pub separation: Option<f64>,
}

impl DetectionReport {
    pub fn max_wrong_response(&self) -> f64 {
        self.wrong_responses
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn detect(
    image: &Image,
    right_key: &WatermarkKey,
    wrong_key_seeds: &[u64],
) -> Result<DetectionReport> {
    if wrong_key_seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one wrong key is required".into(),
        ));
    }
    if wrong_key_seeds.contains(&right_key.seed) {
        return Err(Error::InvalidArgument(format!(
            "wrong-key list contains the right seed {}",
            right_key.seed
        )));
    }
    check_length(right_key, image)?;
    let hl2 = hl2_of(image)?;
    let coeffs = hl2.pixels();

    let right_response = dot(coeffs, &generate_sequence(right_key)?);
    let wrong_responses = wrong_key_seeds
        .par_iter()
        .map(|&seed| Ok(dot(coeffs, &generate_sequence(&right_key.with_seed(seed))?)))
        .collect::<Result<Vec<f64>>>()?;

    let n = wrong_responses.len() as f64;
    let mean = wrong_responses.iter().sum::<f64>() / n;
    let var = wrong_responses
        .iter()
        .map(|r| (r - mean).powi(2))
        .sum::<f64>()
        / n;
    let separation = (var > 0.0).then(|| (right_response - mean) / var.sqrt());
    let max_wrong = wrong_responses
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(DetectionReport {
        right_seed: right_key.seed,
        right_response,
        wrong_seeds: wrong_key_seeds.to_vec(),
        wrong_key_count: wrong_responses.len(),
        wrong_responses,
        decision: right_response > max_wrong,
        separation,
    })
}

/// Wrong-key seeds `base + 1, base + 2, ...`, skipping `right_seed`, `count` in total.
pub fn wrong_seed_range(base: u64, count: usize, right_seed: u64) -> Vec<u64> {
    (1..)
        .map(|i| base.wrapping_add(i))
        .filter(|&s| s != right_seed)
        .take(count)
        .collect()
}
