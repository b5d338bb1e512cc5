//! Total-variation reconstruction from partial DCT measurements.
//!
//! Solves `min TV(x)` subject to the kept DCT coefficients of `x` equalling
//! the measurements. Because the measurement operator is a row subset of an
//! orthonormal transform, projecting onto the constraint set is exact:
//! transform, overwrite the kept coefficients, transform back.
//!
//! Two iterations are available:
//!
//! * [`SolverMethod::PrimalDual`] (default): Chambolle-Pock primal-dual
//!   steps on the Huber-smoothed isotropic TV with the exact projection as
//!   the primal proximal map.
//! * [`SolverMethod::ProjectedGradient`]: gradient descent on the
//!   epsilon-smoothed TV followed by the projection, with step halving
//!   whenever a step would raise the TV.
//!
//! Differences are forward differences with zero difference past the last
//! row/column.

use serde::{Deserialize, Serialize};

use crate::cs_attack::MeasurementSet;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::transforms::Dct2d;

/// Mean intensity assumed for the DC term when it was not measured.
pub const MID_GRAY: f64 = 127.5;

/// Largest measurement residual tolerated after a projection before the run
/// is declared diverged.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

/// Iterations always run before the relative-TV stopping test applies.
pub const WARMUP_ITERATIONS: usize = 10;

const MAX_BACKTRACKS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    PrimalDual,
    ProjectedGradient,
}

impl SolverMethod {
    pub fn default_step(self) -> f64 {
        match self {
            SolverMethod::PrimalDual => 3.0,
            SolverMethod::ProjectedGradient => 0.2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub max_iterations: usize,
    /// Primal step for primal-dual, descent step for projected gradient
    /// (pixel-intensity units).
    pub step_size: f64,
    pub smoothing_epsilon: f64,
    /// Stop once the relative change of the TV between iterations drops
    /// below this value (checked after [`WARMUP_ITERATIONS`]).
    pub stop_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::for_method(SolverMethod::PrimalDual)
    }
}

impl SolverConfig {
    pub fn for_method(method: SolverMethod) -> Self {
        SolverConfig {
            method,
            max_iterations: 300,
            step_size: method.default_step(),
            smoothing_epsilon: 1e-3,
            stop_tolerance: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !positive(self.step_size) {
            return Err(Error::InvalidConfig(format!(
                "step_size {} must be positive",
                self.step_size
            )));
        }
        if !positive(self.smoothing_epsilon) {
            return Err(Error::InvalidConfig(format!(
                "smoothing_epsilon {} must be positive",
                self.smoothing_epsilon
            )));
        }
        if !(self.stop_tolerance.is_finite() && self.stop_tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "stop_tolerance {} must be nonnegative",
                self.stop_tolerance
            )));
        }
        Ok(())
    }
}

/// Per-iteration state passed to the progress callback.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Progress {
    pub iteration: usize,
    /// Smoothed TV of the projected iterate.
    pub tv: f64,
    /// Max abs deviation of the kept DCT coefficients from the measurements.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    /// Final iterate clamped to `[0, 255]`.
    pub image: Image,
    pub iterations_used: usize,
    pub initial_tv: f64,
    pub final_tv: f64,
    /// Measurement residual of the final iterate before clamping.
    pub data_residual: f64,
    /// Smoothed TV after each iteration's projection.
    pub tv_history: Vec<f64>,
}

impl ReconstructionResult {
    /// Fraction of iterations whose TV did not exceed the previous one.
    pub fn monotone_fraction(&self) -> f64 {
        if self.tv_history.is_empty() {
            return 1.0;
        }
        let mut prev = self.initial_tv;
        let mut ok = 0;
        for &tv in &self.tv_history {
            if tv <= prev {
                ok += 1;
            }
            prev = tv;
        }
        ok as f64 / self.tv_history.len() as f64
    }
}

/// Forward differences `(dx, dy)`: `dx` along rows (`b[i+1][j] - b[i][j]`),
/// `dy` along columns (`b[i][j+1] - b[i][j]`), zero past the last row/column.
pub fn discrete_gradient(grid: &Image) -> (Image, Image) {
    let (w, h) = (grid.width(), grid.height());
    let mut dx = vec![0.0; w * h];
    let mut dy = vec![0.0; w * h];
    forward_diff(grid.pixels(), w, h, &mut dx, &mut dy);
    (
        Image::new(w, h, dx).expect("same shape"),
        Image::new(w, h, dy).expect("same shape"),
    )
}

/// `sum sqrt(dx^2 + dy^2 + eps^2)`; with `eps = 0` the plain isotropic TV.
pub fn tv_value(grid: &Image, smoothing_epsilon: f64) -> f64 {
    let (w, h) = (grid.width(), grid.height());
    let mut dx = vec![0.0; w * h];
    let mut dy = vec![0.0; w * h];
    forward_diff(grid.pixels(), w, h, &mut dx, &mut dy);
    smoothed_tv(&dx, &dy, smoothing_epsilon)
}

/// Analytic gradient of [`tv_value`] with respect to every pixel.
pub fn tv_gradient(grid: &Image, smoothing_epsilon: f64) -> Image {
    let (w, h) = (grid.width(), grid.height());
    let mut ws = Workspace::new(w, h);
    let mut out = vec![0.0; w * h];
    ws.tv_gradient(grid.pixels(), smoothing_epsilon, &mut out);
    Image::new(w, h, out).expect("same shape")
}

fn forward_diff(x: &[f64], w: usize, h: usize, dx: &mut [f64], dy: &mut [f64]) {
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            dx[i] = if r + 1 < h { x[i + w] - x[i] } else { 0.0 };
            dy[i] = if c + 1 < w { x[i + 1] - x[i] } else { 0.0 };
        }
    }
}

/// Negative adjoint of [`forward_diff`]: `<grad x, p> = -<x, div p>`.
fn divergence(px: &[f64], py: &[f64], w: usize, h: usize, out: &mut [f64]) {
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let mut v = 0.0;
            if r + 1 < h {
                v += px[i];
            }
            if r > 0 {
                v -= px[i - w];
            }
            if c + 1 < w {
                v += py[i];
            }
            if c > 0 {
                v -= py[i - 1];
            }
            out[i] = v;
        }
    }
}

fn smoothed_tv(dx: &[f64], dy: &[f64], eps: f64) -> f64 {
    let e2 = eps * eps;
    dx.iter()
        .zip(dy)
        .map(|(a, b)| (a * a + b * b + e2).sqrt())
        .sum()
}

struct Workspace {
    w: usize,
    h: usize,
    dx: Vec<f64>,
    dy: Vec<f64>,
}

impl Workspace {
    fn new(w: usize, h: usize) -> Self {
        Workspace {
            w,
            h,
            dx: vec![0.0; w * h],
            dy: vec![0.0; w * h],
        }
    }

    fn tv(&mut self, x: &[f64], eps: f64) -> f64 {
        forward_diff(x, self.w, self.h, &mut self.dx, &mut self.dy);
        smoothed_tv(&self.dx, &self.dy, eps)
    }

    fn tv_gradient(&mut self, x: &[f64], eps: f64, out: &mut [f64]) {
        let (w, h) = (self.w, self.h);
        forward_diff(x, w, h, &mut self.dx, &mut self.dy);
        let e2 = eps * eps;
        for i in 0..w * h {
            let m = (self.dx[i] * self.dx[i] + self.dy[i] * self.dy[i] + e2).sqrt();
            if m > 0.0 {
                self.dx[i] /= m;
                self.dy[i] /= m;
            }
        }
        divergence(&self.dx, &self.dy, w, h, out);
        out.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Exact projection onto `{x : kept DCT coefficients of x = measurements}`.
struct Projector {
    n: usize,
    dct: Dct2d,
    kept: Vec<usize>,
    values: Vec<f64>,
    buf: Vec<f64>,
}

impl Projector {
    fn new(measurements: &MeasurementSet) -> Self {
        let plan = measurements.plan();
        let n = plan.grid_side();
        Projector {
            n,
            dct: Dct2d::new(n, n),
            kept: plan
                .kept_indices()
                .iter()
                .map(|&(r, c)| r * n + c)
                .collect(),
            values: measurements.values().to_vec(),
            buf: vec![0.0; n * n],
        }
    }

    /// Zero-filled estimate: measured coefficients, zeros elsewhere; an
    /// unmeasured DC term is set to mid-gray instead of zero.
    fn initial_estimate(&self) -> Vec<f64> {
        let mut spec = vec![0.0; self.n * self.n];
        for (&i, &v) in self.kept.iter().zip(&self.values) {
            spec[i] = v;
        }
        if !self.kept.contains(&0) {
            spec[0] = MID_GRAY * self.n as f64;
        }
        self.dct.inverse_in_place(&mut spec);
        spec
    }

    fn project(&mut self, x: &mut [f64]) {
        self.dct.forward_in_place(x);
        for (&i, &v) in self.kept.iter().zip(&self.values) {
            x[i] = v;
        }
        self.dct.inverse_in_place(x);
    }

    fn residual(&mut self, x: &[f64]) -> f64 {
        self.buf.copy_from_slice(x);
        self.dct.forward_in_place(&mut self.buf);
        self.kept
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| (self.buf[i] - v).abs())
            .fold(0.0, f64::max)
    }
}

pub fn reconstruct(
    measurements: &MeasurementSet,
    config: &SolverConfig,
) -> Result<ReconstructionResult> {
    reconstruct_with_progress(measurements, config, |_| {})
}

pub fn reconstruct_with_progress(
    measurements: &MeasurementSet,
    config: &SolverConfig,
    mut on_iteration: impl FnMut(&Progress),
) -> Result<ReconstructionResult> {
    config.validate()?;
    let plan = measurements.plan();
    if plan.kept_indices().len() != measurements.values().len() {
        return Err(Error::LengthMismatch {
            expected: plan.kept_indices().len(),
            actual: measurements.values().len(),
        });
    }
    let n = plan.grid_side();
    let eps = config.smoothing_epsilon;
    let mut proj = Projector::new(measurements);
    let mut ws = Workspace::new(n, n);

    let mut x = proj.initial_estimate();
    let initial_tv = ws.tv(&x, eps);
    let mut tv_history = Vec::with_capacity(config.max_iterations);
    let mut prev_tv = initial_tv;

    let mut step = Stepper::new(config.method, n, config.step_size, &x);
    let mut iterations_used = 0;
    for iteration in 1..=config.max_iterations {
        step.advance(&mut x, &mut proj, &mut ws, eps, prev_tv);
        let tv = ws.tv(&x, eps);
        let residual = proj.residual(&x);
        if !tv.is_finite() || residual.is_nan() || residual > RESIDUAL_LIMIT {
            return Err(Error::SolverDiverged {
                iteration,
                reason: format!("tv = {tv:e}, measurement residual = {residual:e}"),
            });
        }
        on_iteration(&Progress {
            iteration,
            tv,
            residual,
        });
        tv_history.push(tv);
        iterations_used = iteration;
        let rel_change = (prev_tv - tv).abs() / prev_tv.max(f64::MIN_POSITIVE);
        prev_tv = tv;
        if iteration >= WARMUP_ITERATIONS && rel_change < config.stop_tolerance {
            break;
        }
    }

    let data_residual = proj.residual(&x);
    let image = Image::new(n, n, x).expect("square grid").clamped();
    Ok(ReconstructionResult {
        image,
        iterations_used,
        initial_tv,
        final_tv: prev_tv,
        data_residual,
        tv_history,
    })
}

enum Stepper {
    PrimalDual {
        tau: f64,
        sigma: f64,
        px: Vec<f64>,
        py: Vec<f64>,
        x_bar: Vec<f64>,
        x_prev: Vec<f64>,
        div: Vec<f64>,
    },
    Gradient {
        step: f64,
        grad: Vec<f64>,
        trial: Vec<f64>,
    },
}

impl Stepper {
    fn new(method: SolverMethod, n: usize, step_size: f64, x0: &[f64]) -> Self {
        let len = n * n;
        match method {
            SolverMethod::PrimalDual => Stepper::PrimalDual {
                tau: step_size,
                // ||grad||^2 <= 8 for 2D forward differences.
                sigma: 1.0 / (8.0 * step_size),
                px: vec![0.0; len],
                py: vec![0.0; len],
                x_bar: x0.to_vec(),
                x_prev: vec![0.0; len],
                div: vec![0.0; len],
            },
            SolverMethod::ProjectedGradient => Stepper::Gradient {
                step: step_size,
                grad: vec![0.0; len],
                trial: vec![0.0; len],
            },
        }
    }

    fn advance(
        &mut self,
        x: &mut [f64],
        proj: &mut Projector,
        ws: &mut Workspace,
        eps: f64,
        current_tv: f64,
    ) {
        match self {
            Stepper::PrimalDual {
                tau,
                sigma,
                px,
                py,
                x_bar,
                x_prev,
                div,
            } => {
                let (w, h) = (ws.w, ws.h);
                forward_diff(x_bar, w, h, &mut ws.dx, &mut ws.dy);
                let shrink = 1.0 / (1.0 + *sigma * eps);
                for i in 0..w * h {
                    let a = (px[i] + *sigma * ws.dx[i]) * shrink;
                    let b = (py[i] + *sigma * ws.dy[i]) * shrink;
                    let norm = (a * a + b * b).sqrt().max(1.0);
                    px[i] = a / norm;
                    py[i] = b / norm;
                }
                divergence(px, py, w, h, div);
                x_prev.copy_from_slice(x);
                for (xi, d) in x.iter_mut().zip(div.iter()) {
                    *xi += *tau * d;
                }
                proj.project(x);
                for ((xb, &xn), &xo) in x_bar.iter_mut().zip(x.iter()).zip(x_prev.iter()) {
                    *xb = 2.0 * xn - xo;
                }
            }
            Stepper::Gradient { step, grad, trial } => {
                ws.tv_gradient(x, eps, grad);
                for attempt in 0..=MAX_BACKTRACKS {
                    for ((t, &xi), &g) in trial.iter_mut().zip(x.iter()).zip(grad.iter()) {
                        *t = xi - *step * g;
                    }
                    proj.project(trial);
                    let tv = ws.tv(trial, eps);
                    if tv <= current_tv || attempt == MAX_BACKTRACKS || !tv.is_finite() {
                        break;
                    }
                    *step *= 0.5;
                }
                x.copy_from_slice(trial);
            }
        }
    }
}
