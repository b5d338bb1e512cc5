//! Orthonormal 2D Haar wavelet (two levels) and orthonormal 2D DCT-II with
//! JPEG zigzag frequency ordering.

mod dct;
mod haar;
mod zigzag;

pub use dct::{dct2_forward, dct2_inverse, Dct2d, DctSpectrum};
pub use haar::{
    haar_forward_level, haar_inverse, haar_inverse_level, haar_pyramid, DwtPyramid, SubbandSet,
};
pub use zigzag::zigzag_indices;
