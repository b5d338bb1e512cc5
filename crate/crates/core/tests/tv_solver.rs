mod common;

use common::{cameraman, random_grid, rng};
use proptest::prelude::*;
use wavemark::cs_attack::{acquire, plan_measurements};
use wavemark::image::{psnr, Image};
use wavemark::tv_solver::*;
use wavemark::Error;

fn central_difference(grid: &Image, eps: f64, h: f64) -> Image {
    let mut out = Image::zeros(grid.width(), grid.height());
    let mut probe = grid.clone();
    for i in 0..grid.len() {
        let orig = probe.pixels()[i];
        probe.pixels_mut()[i] = orig + h;
        let up = tv_value(&probe, eps);
        probe.pixels_mut()[i] = orig - h;
        let down = tv_value(&probe, eps);
        probe.pixels_mut()[i] = orig;
        out.pixels_mut()[i] = (up - down) / (2.0 * h);
    }
    out
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut r = rng(21);
    for _ in 0..20 {
        let g = random_grid(&mut r, 8, 8);
        let analytic = tv_gradient(&g, 1e-2);
        let numeric = central_difference(&g, 1e-2, 1e-4);
        let scale = analytic.pixels().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = analytic.max_abs_diff(&numeric).unwrap() / scale;
        assert!(err < 1e-5, "relative error {err}");
    }
}

proptest! {
    #[test]
    fn smoothing_bounds(values in prop::collection::vec(-50.0f64..50.0, 36), eps in 0.0f64..2.0) {
        let g = Image::new(6, 6, values).unwrap();
        let plain = tv_value(&g, 0.0);
        let smooth = tv_value(&g, eps);
        prop_assert!(plain <= smooth + 1e-9);
        prop_assert!(smooth <= plain + eps * 36.0 + 1e-9);
    }
}

fn attacked_cameraman(v1: usize, v2: usize) -> wavemark::cs_attack::MeasurementSet {
    let plan = plan_measurements(256, v1, v2, 7).unwrap();
    acquire(&cameraman(), &plan).unwrap()
}

#[test]
fn every_projection_is_measurement_consistent() {
    let m = attacked_cameraman(2000, 15000);
    for method in [SolverMethod::PrimalDual, SolverMethod::ProjectedGradient] {
        let cfg = SolverConfig {
            max_iterations: 60,
            stop_tolerance: 0.0,
            ..SolverConfig::for_method(method)
        };
        let mut worst = 0.0f64;
        let mut calls = 0;
        let res = reconstruct_with_progress(&m, &cfg, |p| {
            worst = worst.max(p.residual);
            calls += 1;
        })
        .unwrap();
        assert_eq!(calls, 60);
        assert!(worst <= 1e-9, "{method:?}: {worst}");
        assert!(res.data_residual <= 1e-9);
    }
}

#[test]
fn reconstruction_descends_and_is_mostly_monotone() {
    let m = attacked_cameraman(1000, 17000);
    for method in [SolverMethod::PrimalDual, SolverMethod::ProjectedGradient] {
        let res = reconstruct(&m, &SolverConfig::for_method(method)).unwrap();
        assert!(res.final_tv <= res.initial_tv, "{method:?}");
        assert!(
            res.monotone_fraction() >= 0.95,
            "{method:?}: {}",
            res.monotone_fraction()
        );
        assert!(res.iterations_used >= WARMUP_ITERATIONS && res.iterations_used <= 300);
        assert!(res.image.pixels().iter().all(|v| (0.0..=255.0).contains(v)));
    }
}

#[test]
fn reconstruction_is_deterministic() {
    let m = attacked_cameraman(2000, 12000);
    let cfg = SolverConfig {
        max_iterations: 40,
        ..SolverConfig::default()
    };
    let a = reconstruct(&m, &cfg).unwrap();
    let b = reconstruct(&m, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn full_measurements_are_reproduced_exactly() {
    let img = cameraman();
    let m = acquire(&img, &plan_measurements(256, 65536, 0, 0).unwrap()).unwrap();
    let res = reconstruct(&m, &SolverConfig::default()).unwrap();
    assert!(res.image.max_abs_diff(&img).unwrap() < 1e-6);
    assert!(psnr(&img, &res.image).unwrap().psnr_db >= 60.0);
}

#[test]
fn invalid_config_is_rejected() {
    let m = attacked_cameraman(10, 10);
    let cfg = SolverConfig {
        smoothing_epsilon: 0.0,
        ..SolverConfig::default()
    };
    assert!(matches!(
        reconstruct(&m, &cfg),
        Err(Error::InvalidConfig(_))
    ));
}
