#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavemark::image::{load_pgm, Image};

pub const CAMERAMAN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/cameraman.pgm");

pub fn cameraman() -> Image {
    load_pgm(CAMERAMAN).expect("bundled test image")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_grid(rng: &mut impl Rng, width: usize, height: usize) -> Image {
    Image::from_fn(width, height, |_, _| rng.gen_range(-128.0..128.0))
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
