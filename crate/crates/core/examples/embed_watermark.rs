// Embed a watermark in HL2 and check it is detectable.

use wavemark::image::{load_pgm, psnr};
use wavemark::watermark::{detect, embed, wrong_seed_range, EmbedConfig, WatermarkKey};

const IMAGE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/cameraman.pgm");

pub fn run_example() -> wavemark::Result<(f64, bool)> {
    let image = load_pgm(IMAGE)?;
    let key = WatermarkKey::for_image(1, &image)?;
    let marked = embed(&image, &key, &EmbedConfig::additive(7.0)?)?.clamped();
    let quality = psnr(&image, &marked)?;
    println!("embed PSNR {} dB", quality.psnr_text());

    let report = detect(&marked, &key, &wrong_seed_range(1000, 100, key.seed))?;
    println!(
        "right {:.1}  max wrong {:.1}  detected {}",
        report.right_response,
        report.max_wrong_response(),
        report.decision
    );
    Ok((quality.psnr_db, report.decision))
}

fn main() -> wavemark::Result<()> {
    run_example().map(|_| ())
}
