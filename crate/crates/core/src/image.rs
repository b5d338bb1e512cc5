//! Real-valued grayscale pixel grids, binary PGM I/O and PSNR.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Peak value used for PSNR regardless of the actual dynamic range.
pub const PEAK: f64 = 255.0;

/// Row-major grid of real pixel intensities.
///
/// Pipeline intermediates may leave the nominal `[0, 255]` range; only
/// [`Image::clamped`] and [`save_pgm`] bring values back into it. The same
/// type carries wavelet subbands and DCT coefficient grids.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!("empty grid {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Image {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    /// Builds a grid from `f(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        Image {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Element-wise combination of two equally sized grids.
    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Result<Image> {
        self.check_shape(other)?;
        Ok(Image {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .zip(&other.pixels)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Sum of squared values.
    pub fn energy(&self) -> f64 {
        self.pixels.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &Image) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn max_abs_diff(&self, other: &Image) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Copy with every value clamped to the display range `[0, 255]`.
    pub fn clamped(&self) -> Image {
        self.map(|v| v.clamp(0.0, PEAK))
    }

    pub(crate) fn check_shape(&self, other: &Image) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }
}

/// Mean squared error and PSNR (peak 255) between two images.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub mse: f64,
    /// `+inf` when the images are identical; serialized as `"inf"`.
    #[serde(with = "crate::serde_db")]
    pub psnr_db: f64,
}

impl QualityReport {
    pub fn from_mse(mse: f64) -> Self {
        let psnr_db = if mse > 0.0 {
            10.0 * (PEAK * PEAK / mse).log10()
        } else {
            f64::INFINITY
        };
        QualityReport { mse, psnr_db }
    }

    pub fn psnr_text(&self) -> String {
        crate::serde_db::format_db(self.psnr_db)
    }
}

pub fn psnr(reference: &Image, test: &Image) -> Result<QualityReport> {
    reference.check_shape(test)?;
    let sum: f64 = reference
        .pixels
        .iter()
        .zip(&test.pixels)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(QualityReport::from_mse(sum / reference.len() as f64))
}

/// Reads an 8-bit binary PGM (P5) whose sides are multiples of 4.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut header = HeaderReader { bytes, pos: 0 };
    if header.token()? != b"P5" {
        return Err(Error::Format("missing P5 magic".into()));
    }
    let width = header.number("width")?;
    let height = header.number("height")?;
    let max_value = header.number("max value")?;
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        _ => return Err(Error::Format("no whitespace after header".into())),
    }

    if max_value != 255 {
        return Err(Error::UnsupportedMaxValue(max_value));
    }
    if width == 0 || height == 0 || !width.is_multiple_of(4) || !height.is_multiple_of(4) {
        return Err(Error::Dimension(format!(
            "{width}x{height} is not a positive multiple of 4 in both directions"
        )));
    }
    let (width, height) = (width as usize, height as usize);
    let raster = &bytes[header.pos..];
    if raster.len() < width * height {
        return Err(Error::Format(format!(
            "raster has {} bytes, expected {}",
            raster.len(),
            width * height
        )));
    }
    let pixels = raster[..width * height]
        .iter()
        .map(|&b| f64::from(b))
        .collect();
    Image::new(width, height, pixels)
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn token(&mut self) -> Result<&'a [u8]> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(_) => break,
                None => return Err(Error::Format("truncated header".into())),
            }
        }
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("bad {what} {:?}", String::from_utf8_lossy(tok))))
    }
}

/// Quantizes to 8 bits: round half away from zero, then clamp to `[0, 255]`.
pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(
        image
            .pixels
            .iter()
            .map(|&v| v.round().clamp(0.0, PEAK) as u8),
    );
    out
}

pub fn save_pgm(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&encode_pgm(image))
        .map_err(|e| Error::io(path, e))
}
