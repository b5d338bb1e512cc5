// Energy compaction of the DCT along the zigzag order.

use wavemark::image::load_pgm;
use wavemark::transforms::{dct2_forward, zigzag_indices};

const IMAGE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/cameraman.pgm");

/// Returns the share of energy held by the first 2000 zigzag coefficients.
pub fn run_example() -> wavemark::Result<f64> {
    let image = load_pgm(IMAGE)?;
    let spectrum = dct2_forward(&image);
    let total = image.energy();
    let mut acc = 0.0;
    let mut share = 0.0;
    for (k, (r, c)) in zigzag_indices(image.width()).into_iter().enumerate() {
        acc += spectrum.get(r, c).powi(2);
        if [1, 100, 1000, 2000, 15000].contains(&(k + 1)) {
            println!(
                "first {:>5} coefficients: {:.5}% of energy",
                k + 1,
                100.0 * acc / total
            );
        }
        if k + 1 == 2000 {
            share = acc / total;
        }
    }
    Ok(share)
}

fn main() -> wavemark::Result<()> {
    run_example().map(|_| ())
}
