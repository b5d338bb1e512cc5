// Keep a subset of DCT coefficients and look at the naive zero-filled image.

use wavemark::cs_attack::{acquire, measurement_fraction, plan_measurements};
use wavemark::image::{load_pgm, psnr};
use wavemark::transforms::{dct2_inverse, DctSpectrum};
use wavemark::Image;

const IMAGE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/cameraman.pgm");

/// Returns the PSNR of the zero-filled inverse DCT.
pub fn run_example() -> wavemark::Result<f64> {
    let image = load_pgm(IMAGE)?;
    let n = image.width();
    let plan = plan_measurements(n, 2000, 15000, 7)?;
    let measured = acquire(&image, &plan)?;
    println!(
        "kept {} of {} coefficients ({:.2}%)",
        plan.total(),
        n * n,
        measurement_fraction(&plan)
    );

    let mut coeffs = Image::zeros(n, n);
    for (&(r, c), &v) in plan.kept_indices().iter().zip(measured.values()) {
        coeffs.set(r, c, v);
    }
    let filled = dct2_inverse(&DctSpectrum { coeffs }).clamped();
    let db = psnr(&image, &filled)?.psnr_db;
    println!("zero-filled PSNR {db:.2} dB");
    Ok(db)
}

fn main() -> wavemark::Result<()> {
    run_example().map(|_| ())
}
