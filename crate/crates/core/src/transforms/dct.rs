use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};

use crate::image::Image;

/// Orthonormal 2D DCT-II coefficients, indexed `(frequency_row, frequency_col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DctSpectrum {
    pub coeffs: Image,
}

impl DctSpectrum {
    pub fn width(&self) -> usize {
        self.coeffs.width()
    }

    pub fn height(&self) -> usize {
        self.coeffs.height()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.coeffs.get(row, col)
    }
}

/// Planned separable orthonormal DCT-II / DCT-III pair for one grid shape.
///
/// Reusing a plan avoids re-planning inside iterative solvers.
pub struct Dct2d {
    width: usize,
    height: usize,
    rows: Arc<dyn TransformType2And3<f64>>,
    cols: Arc<dyn TransformType2And3<f64>>,
}

impl Dct2d {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = DctPlanner::new();
        Dct2d {
            width,
            height,
            rows: planner.plan_dct2(width),
            cols: planner.plan_dct2(height),
        }
    }

    /// In-place forward transform of a row-major `width x height` buffer.
    pub fn forward_in_place(&self, data: &mut [f64]) {
        assert_eq!(data.len(), self.width * self.height);
        let mut scratch = vec![0.0; self.rows.get_scratch_len().max(self.cols.get_scratch_len())];
        for row in data.chunks_exact_mut(self.width) {
            self.rows.process_dct2_with_scratch(row, &mut scratch);
            scale_forward(row);
        }
        let mut t = transpose(data, self.width, self.height);
        for col in t.chunks_exact_mut(self.height) {
            self.cols.process_dct2_with_scratch(col, &mut scratch);
            scale_forward(col);
        }
        transpose_into(&t, self.height, self.width, data);
    }

    /// In-place inverse (orthonormal DCT-III).
    pub fn inverse_in_place(&self, data: &mut [f64]) {
        assert_eq!(data.len(), self.width * self.height);
        let mut scratch = vec![0.0; self.rows.get_scratch_len().max(self.cols.get_scratch_len())];
        let mut t = transpose(data, self.width, self.height);
        for col in t.chunks_exact_mut(self.height) {
            scale_inverse(col);
            self.cols.process_dct3_with_scratch(col, &mut scratch);
        }
        transpose_into(&t, self.height, self.width, data);
        for row in data.chunks_exact_mut(self.width) {
            scale_inverse(row);
            self.rows.process_dct3_with_scratch(row, &mut scratch);
        }
    }

    pub fn forward(&self, image: &Image) -> DctSpectrum {
        assert!(image.width() == self.width && image.height() == self.height);
        let mut data = image.pixels().to_vec();
        self.forward_in_place(&mut data);
        DctSpectrum {
            coeffs: Image::new(self.width, self.height, data).expect("shape preserved"),
        }
    }

    pub fn inverse(&self, spectrum: &DctSpectrum) -> Image {
        assert!(spectrum.width() == self.width && spectrum.height() == self.height);
        let mut data = spectrum.coeffs.pixels().to_vec();
        self.inverse_in_place(&mut data);
        Image::new(self.width, self.height, data).expect("shape preserved")
    }
}

// rustdct computes the unnormalized DCT-II  X_k = sum x_n cos(pi (n + 1/2) k / N)
// and the DCT-III  x_n = X_0 / 2 + sum_{k>0} X_k cos(pi k (n + 1/2) / N).
fn scale_forward(v: &mut [f64]) {
    let n = v.len() as f64;
    v[0] *= (1.0 / n).sqrt();
    let s = (2.0 / n).sqrt();
    v[1..].iter_mut().for_each(|x| *x *= s);
}

fn scale_inverse(v: &mut [f64]) {
    let n = v.len() as f64;
    v[0] *= 2.0 * (1.0 / n).sqrt();
    let s = (2.0 / n).sqrt();
    v[1..].iter_mut().for_each(|x| *x *= s);
}

fn transpose(data: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    transpose_into(data, width, height, &mut out);
    out
}

fn transpose_into(data: &[f64], width: usize, height: usize, out: &mut [f64]) {
    for r in 0..height {
        for c in 0..width {
            out[c * height + r] = data[r * width + c];
        }
    }
}

pub fn dct2_forward(image: &Image) -> DctSpectrum {
    Dct2d::new(image.width(), image.height()).forward(image)
}

pub fn dct2_inverse(spectrum: &DctSpectrum) -> Image {
    Dct2d::new(spectrum.width(), spectrum.height()).inverse(spectrum)
}
