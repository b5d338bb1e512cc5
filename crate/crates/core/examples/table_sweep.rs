// Full six-row attack sweep, printed as CSV.

use wavemark::experiment::{run_experiment, write_table_csv, RunManifest};
use wavemark::image::load_pgm;

const IMAGE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/cameraman.pgm");

pub fn run_example() -> wavemark::Result<usize> {
    let image = load_pgm(IMAGE)?;
    let outcome = run_experiment(&image, &RunManifest::new(IMAGE))?;
    println!("embed PSNR {} dB", outcome.embed_quality.psnr_text());
    let table = outcome.table();
    write_table_csv(&table, std::io::stdout().lock())?;
    Ok(table.iter().filter(|r| r.detection_succeeded).count())
}

fn main() -> wavemark::Result<()> {
    run_example().map(|_| ())
}
