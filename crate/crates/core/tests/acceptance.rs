//! Acceptance criteria, one test each. Every test prints a single
//! `[PASS]` / `[FAIL]` line before asserting; run with `--nocapture`.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use clap::Parser;
use rayon::prelude::*;

use common::{cameraman, random_grid, rel_diff, rng, CAMERAMAN};
use wavemark::cli::{run, Cli};
use wavemark::cs_attack::{acquire, plan_measurements};
use wavemark::experiment::{
    run_experiment, watermark_image, ExperimentOutcome, RunManifest, TABLE_ROWS,
};
use wavemark::image::psnr;
use wavemark::transforms::{
    dct2_forward, dct2_inverse, haar_forward_level, haar_inverse, haar_pyramid,
};
use wavemark::tv_solver::{
    reconstruct, reconstruct_with_progress, tv_gradient, tv_value, SolverConfig,
};
use wavemark::watermark::{
    detect, embed, generate_sequence, wrong_seed_range, EmbedConfig, WatermarkKey,
};
use wavemark::Image;

const REFERENCE_PSNR: [f64; 6] = [29.17, 30.28, 30.04, 30.47, 31.64, 34.75];
const PSNR_BAND_DB: f64 = 2.0;
const QUALITY_FLOOR_DB: f64 = 29.0;
const RUNTIME_LIMIT: Duration = Duration::from_secs(15 * 60);
const EMBED_PSNR_RANGE: (f64, f64) = (40.0, 50.0);
const ANALYTIC_TOL_DB: f64 = 1e-6;
const ROUND_TRIP_TOL: f64 = 1e-9;
const PARSEVAL_TOL: f64 = 1e-9;
const RANDOM_GRIDS: usize = 100;
const GRADIENT_TOL: f64 = 1e-5;
const RESIDUAL_TOL: f64 = 1e-9;
const FULL_SAMPLING_DB: f64 = 60.0;
const TRIALS: u64 = 20;
const TRIAL_ROW: (usize, usize) = (2000, 15000);
const SEPARATION_LIMIT: f64 = 4.0;

struct TableRun {
    outcome: ExperimentOutcome,
    elapsed: Duration,
}

fn table_run() -> &'static TableRun {
    static RUN: OnceLock<TableRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let outcome = run_experiment(&cameraman(), &RunManifest::new(CAMERAMAN)).unwrap();
        TableRun {
            outcome,
            elapsed: start.elapsed(),
        }
    })
}

fn report(n: u32, ok: bool, detail: &str) {
    println!(
        "[{}] criterion {n}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_table_detection() {
    let run = table_run();
    let mut detail = Vec::new();
    for row in run.outcome.table() {
        detail.push(format!(
            "({},{}) {} {:.0}/{:.0}",
            row.v1,
            row.v2,
            if row.detection_succeeded {
                "ok"
            } else {
                "MISS"
            },
            row.right_response,
            row.max_wrong_response
        ));
    }
    let all = run.outcome.rows.iter().all(|r| r.row.detection_succeeded);
    let fast = run.elapsed < RUNTIME_LIMIT;
    report(
        1,
        all && fast,
        &format!(
            "detection {}; runtime {:.1}s",
            detail.join(", "),
            run.elapsed.as_secs_f64()
        ),
    );
    assert!(fast);
    assert!(all, "detection failed on at least one row");
}

#[test]
fn criterion_2_psnr_band_and_monotonicity() {
    let table = table_run().outcome.table();
    let mut in_band = true;
    let mut detail = Vec::new();
    for (row, reference) in table.iter().zip(REFERENCE_PSNR) {
        let ok = (row.psnr_db - reference).abs() <= PSNR_BAND_DB;
        in_band &= ok;
        detail.push(format!(
            "{:.2} vs {reference}{}",
            row.psnr_db,
            if ok { "" } else { " OUT" }
        ));
    }
    let mut monotone = true;
    for a in &table {
        for b in &table {
            if a.v1 + a.v2 < b.v1 + b.v2 && a.psnr_db > b.psnr_db {
                monotone = false;
                detail.push(format!(
                    "order broken: {} meas {:.2} dB > {} meas {:.2} dB",
                    a.v1 + a.v2,
                    a.psnr_db,
                    b.v1 + b.v2,
                    b.psnr_db
                ));
            }
        }
    }
    report(2, in_band && monotone, &detail.join(", "));
    assert!(in_band, "PSNR outside the band");
    assert!(monotone, "PSNR not monotone in measurement count");
}

#[test]
fn criterion_3_quality_threshold() {
    let table = table_run().outcome.table();
    let low: Vec<String> = table[1..]
        .iter()
        .filter(|r| r.psnr_db < QUALITY_FLOOR_DB)
        .map(|r| format!("({},{}) {:.2} dB", r.v1, r.v2, r.psnr_db))
        .collect();
    let ok = low.is_empty();
    report(
        3,
        ok,
        &format!(
            "rows 2-6 >= {QUALITY_FLOOR_DB} dB; below: [{}]; row 1 {:.2} dB",
            low.join(", "),
            table[0].psnr_db
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_embedding_imperceptibility() {
    let img = cameraman();
    let key = WatermarkKey::for_image(1, &img).unwrap();
    let config = EmbedConfig::additive(7.0).unwrap();
    let raw = embed(&img, &key, &config).unwrap();
    let measured = psnr(&img, &raw).unwrap().psnr_db;
    let w_energy: f64 = generate_sequence(&key).unwrap().iter().map(|w| w * w).sum();
    let analytic =
        10.0 * (255f64.powi(2) * (img.width() * img.height()) as f64 / (49.0 * w_energy)).log10();
    let stored = psnr(&img, &watermark_image(&img, &key, 7.0).unwrap())
        .unwrap()
        .psnr_db;

    let range_ok = (EMBED_PSNR_RANGE.0..=EMBED_PSNR_RANGE.1).contains(&stored);
    let formula_ok = (measured - analytic).abs() <= ANALYTIC_TOL_DB;
    report(
        4,
        range_ok && formula_ok,
        &format!(
            "embed PSNR {stored:.4} dB (clamped), {measured:.9} dB vs analytic {analytic:.9} dB"
        ),
    );
    assert!(range_ok);
    assert!(formula_ok);
}

#[test]
fn criterion_5_transform_correctness() {
    let mut rng = rng(5);
    let mut worst_round_trip = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for i in 0..RANDOM_GRIDS {
        let side = 4 * (1 + i % 8);
        let grid = random_grid(&mut rng, side, side);
        let pyramid = haar_pyramid(&grid).unwrap();
        let spectrum = dct2_forward(&grid);
        worst_round_trip = worst_round_trip
            .max(haar_inverse(&pyramid).unwrap().max_abs_diff(&grid).unwrap())
            .max(dct2_inverse(&spectrum).max_abs_diff(&grid).unwrap());
        worst_parseval = worst_parseval
            .max(rel_diff(pyramid.energy(), grid.energy()))
            .max(rel_diff(spectrum.coeffs.energy(), grid.energy()));
    }
    let hand = haar_forward_level(&Image::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap()).unwrap();
    let hand_vals = [
        hand.ll.get(0, 0),
        hand.hl.get(0, 0),
        hand.lh.get(0, 0),
        hand.hh.get(0, 0),
    ];
    let hand_ok = hand_vals == [5.0, -1.0, -2.0, 0.0];

    let ok = worst_round_trip <= ROUND_TRIP_TOL && worst_parseval <= PARSEVAL_TOL && hand_ok;
    report(
        5,
        ok,
        &format!(
            "{RANDOM_GRIDS} grids: round trip {worst_round_trip:.1e}, Parseval {worst_parseval:.1e}; \
             2x2 Haar {hand_vals:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_tv_machinery() {
    let mut rng = rng(6);
    let (eps, h) = (1e-2, 1e-4);
    let mut worst_grad = 0.0f64;
    for _ in 0..20 {
        let grid = random_grid(&mut rng, 8, 8);
        let analytic = tv_gradient(&grid, eps);
        let scale = analytic.pixels().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..grid.len() {
            let mut up = grid.clone();
            let mut down = grid.clone();
            up.pixels_mut()[k] += h;
            down.pixels_mut()[k] -= h;
            let fd = (tv_value(&up, eps) - tv_value(&down, eps)) / (2.0 * h);
            worst_grad = worst_grad.max((analytic.pixels()[k] - fd).abs() / scale);
        }
    }

    let pair = tv_value(&Image::new(2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap(), 0.0);

    let img = cameraman();
    let plan = plan_measurements(img.width(), 2000, 15000, 7).unwrap();
    let measured = acquire(&img, &plan).unwrap();
    let mut worst_residual = 0.0f64;
    reconstruct_with_progress(&measured, &SolverConfig::default(), |p| {
        worst_residual = worst_residual.max(p.residual)
    })
    .unwrap();

    let full = acquire(
        &img,
        &plan_measurements(img.width(), img.len(), 0, 7).unwrap(),
    )
    .unwrap();
    let full_db = psnr(
        &img,
        &reconstruct(&full, &SolverConfig::default()).unwrap().image,
    )
    .unwrap()
    .psnr_db;

    let ok = worst_grad <= GRADIENT_TOL
        && pair == 2.0
        && worst_residual <= RESIDUAL_TOL
        && full_db >= FULL_SAMPLING_DB;
    report(
        6,
        ok,
        &format!(
            "gradient err / max |grad| {worst_grad:.1e}; TV([0 1; 0 1]) = {pair}; max residual \
             {worst_residual:.1e}; full sampling {full_db:.2} dB"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_detector_statistics() {
    let img = cameraman();
    let config = SolverConfig::default();
    let trials: Vec<(bool, f64, f64)> = (0..TRIALS)
        .into_par_iter()
        .map(|t| {
            let (wm_seed, sel_seed) = (100 + t, 200 + t);
            let key = WatermarkKey::for_image(wm_seed, &img).unwrap();
            let wrong = wrong_seed_range(1000, 100, wm_seed);
            let plan = plan_measurements(img.width(), TRIAL_ROW.0, TRIAL_ROW.1, sel_seed).unwrap();

            let marked = watermark_image(&img, &key, 7.0).unwrap();
            let rec = reconstruct(&acquire(&marked, &plan).unwrap(), &config).unwrap();
            let hit = detect(&rec.image, &key, &wrong).unwrap();

            let clean = reconstruct(&acquire(&img, &plan).unwrap(), &config).unwrap();
            let miss = detect(&clean.image, &key, &wrong).unwrap();
            (
                hit.decision,
                hit.separation.unwrap_or(f64::NAN),
                miss.separation.unwrap_or(f64::NEG_INFINITY),
            )
        })
        .collect();

    let detected = trials.iter().filter(|t| t.0).count();
    let quiet = trials.iter().filter(|t| t.2 < SEPARATION_LIMIT).count();
    let max_clean = trials.iter().map(|t| t.2).fold(f64::NEG_INFINITY, f64::max);
    let mut hit_sep: Vec<f64> = trials.iter().map(|t| t.1).collect();
    hit_sep.sort_by(f64::total_cmp);
    let ok = detected == TRIALS as usize && quiet == TRIALS as usize;
    report(
        7,
        ok,
        &format!(
            "watermarked detected {detected}/{TRIALS} (separation min {:.2}, median {:.2}); \
             unwatermarked separation < {SEPARATION_LIMIT} in {quiet}/{TRIALS} (max {max_clean:.2})",
            hit_sep[0],
            hit_sep[hit_sep.len() / 2]
        ),
    );
    assert_eq!(quiet, TRIALS as usize, "unwatermarked separation too high");
    assert_eq!(detected, TRIALS as usize, "watermark missed");
}

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = RunManifest {
        csv_path: Some(dir.path().join("table.csv")),
        json_path: Some(dir.path().join("outcome.json")),
        ..RunManifest::new(CAMERAMAN)
    };
    let manifest_path = dir.path().join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_vec(&manifest).unwrap()).unwrap();

    let once = || {
        let cli = Cli::try_parse_from([
            "wavemark",
            "experiment",
            "--manifest",
            manifest_path.to_str().unwrap(),
        ])
        .unwrap();
        assert_eq!(run(cli).unwrap(), 0);
        let csv = std::fs::read(manifest.csv_path.as_ref().unwrap()).unwrap();
        let json = std::fs::read(manifest.json_path.as_ref().unwrap()).unwrap();
        std::fs::remove_file(manifest.csv_path.as_ref().unwrap()).unwrap();
        std::fs::remove_file(manifest.json_path.as_ref().unwrap()).unwrap();
        (csv, json)
    };
    let (csv_a, json_a) = once();
    let (csv_b, json_b) = once();
    let ok = csv_a == csv_b && json_a == json_b;
    report(
        8,
        ok,
        &format!(
            "CSV {} bytes identical: {}; JSON {} bytes identical: {}",
            csv_a.len(),
            csv_a == csv_b,
            json_a.len(),
            json_a == json_b
        ),
    );
    assert_eq!(TABLE_ROWS.len(), manifest.rows.len());
    assert!(ok);
}
