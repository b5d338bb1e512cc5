// TV reconstruction from 26% of the DCT coefficients.

use wavemark::cs_attack::{acquire, plan_measurements};
use wavemark::image::{load_pgm, psnr};
use wavemark::tv_solver::{reconstruct_with_progress, SolverConfig};

const IMAGE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/cameraman.pgm");

pub fn run_example() -> wavemark::Result<f64> {
    let image = load_pgm(IMAGE)?;
    let plan = plan_measurements(image.width(), 2000, 15000, 7)?;
    let measured = acquire(&image, &plan)?;
    let rec = reconstruct_with_progress(&measured, &SolverConfig::default(), |p| {
        if p.iteration % 50 == 0 {
            println!(
                "iter {:>4}  tv {:.4e}  residual {:.1e}",
                p.iteration, p.tv, p.residual
            );
        }
    })?;
    let db = psnr(&image, &rec.image)?.psnr_db;
    println!(
        "{} iterations, tv {:.4e} -> {:.4e}, PSNR {db:.2} dB",
        rec.iterations_used, rec.initial_tv, rec.final_tv
    );
    Ok(db)
}

fn main() -> wavemark::Result<()> {
    run_example().map(|_| ())
}
