// Two-level Haar decomposition of the bundled image.

use wavemark::image::load_pgm;
use wavemark::transforms::{haar_inverse, haar_pyramid};

const IMAGE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/cameraman.pgm");

/// Returns the reconstruction error of the round trip.
pub fn run_example() -> wavemark::Result<f64> {
    let image = load_pgm(IMAGE)?;
    let pyramid = haar_pyramid(&image)?;
    let l2 = &pyramid.level2;
    println!("image energy    {:.4e}", image.energy());
    println!("pyramid energy  {:.4e}", pyramid.energy());
    for (name, band) in [
        ("LL2", &l2.ll),
        ("HL2", &l2.hl),
        ("LH2", &l2.lh),
        ("HH2", &l2.hh),
    ] {
        println!(
            "{name}  {}x{}  energy {:.4e}",
            band.width(),
            band.height(),
            band.energy()
        );
    }
    let err = haar_inverse(&pyramid)?.max_abs_diff(&image)?;
    println!("round-trip max error {err:.2e}");
    Ok(err)
}

fn main() -> wavemark::Result<()> {
    run_example().map(|_| ())
}
