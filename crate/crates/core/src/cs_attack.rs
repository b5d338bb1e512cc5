//! Compressive-sensing attack: keep a subset of the orthonormal 2D DCT
//! coefficients of an `N x N` image.
//!
//! The kept set is a low-frequency zigzag prefix of `v1` positions plus
//! `v2` positions drawn uniformly without replacement from the remaining
//! ones. The implied measurement operator is a row subset of the
//! orthonormal DCT, so its rows are orthonormal.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::transforms::{dct2_forward, zigzag_indices};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPlan {
    grid_side: usize,
    v1_count: usize,
    v2_count: usize,
    selection_seed: u64,
    kept_indices: Vec<(usize, usize)>,
}

impl MeasurementPlan {
    pub fn grid_side(&self) -> usize {
        self.grid_side
    }

    pub fn v1_count(&self) -> usize {
        self.v1_count
    }

    pub fn v2_count(&self) -> usize {
        self.v2_count
    }

    pub fn selection_seed(&self) -> u64 {
        self.selection_seed
    }

    pub fn kept_indices(&self) -> &[(usize, usize)] {
        &self.kept_indices
    }

    pub fn total(&self) -> usize {
        self.v1_count + self.v2_count
    }

    /// Row-major `N x N` mask of kept frequency positions.
    pub fn mask(&self) -> Vec<bool> {
        let n = self.grid_side;
        let mut mask = vec![false; n * n];
        for &(r, c) in &self.kept_indices {
            mask[r * n + c] = true;
        }
        mask
    }
}

pub fn plan_measurements(
    grid_side: usize,
    v1_count: usize,
    v2_count: usize,
    selection_seed: u64,
) -> Result<MeasurementPlan> {
    if grid_side == 0 || !grid_side.is_multiple_of(4) {
        return Err(Error::Dimension(format!(
            "grid side must be a positive multiple of 4, got {grid_side}"
        )));
    }
    let cells = grid_side * grid_side;
    if v1_count.checked_add(v2_count).is_none_or(|t| t > cells) {
        return Err(Error::InvalidArgument(format!(
            "v1 + v2 = {v1_count} + {v2_count} exceeds {cells} coefficients"
        )));
    }
    let mut order = zigzag_indices(grid_side);
    let mut rng = ChaCha20Rng::seed_from_u64(selection_seed);
    let (drawn, _) = order[v1_count..].partial_shuffle(&mut rng, v2_count);
    let drawn = drawn.to_vec();
    order.truncate(v1_count);
    order.extend(drawn);
    Ok(MeasurementPlan {
        grid_side,
        v1_count,
        v2_count,
        selection_seed,
        kept_indices: order,
    })
}

/// Percentage of the `N^2` coefficients that the plan keeps.
pub fn measurement_fraction(plan: &MeasurementPlan) -> f64 {
    100.0 * plan.total() as f64 / (plan.grid_side * plan.grid_side) as f64
}

/// Measured DCT values aligned with `plan.kept_indices()`.
///
/// Serialized without the index list; deserialization rebuilds the plan
/// from `(grid_side, v1_count, v2_count, selection_seed)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementFile", into = "MeasurementFile")]
pub struct MeasurementSet {
    plan: MeasurementPlan,
    values: Vec<f64>,
}

impl MeasurementSet {
    pub fn new(plan: MeasurementPlan, values: Vec<f64>) -> Result<Self> {
        if values.len() != plan.kept_indices.len() {
            return Err(Error::LengthMismatch {
                expected: plan.kept_indices.len(),
                actual: values.len(),
            });
        }
        Ok(MeasurementSet { plan, values })
    }

    pub fn plan(&self) -> &MeasurementPlan {
        &self.plan
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Serialize, Deserialize)]
struct MeasurementFile {
    grid_side: usize,
    v1_count: usize,
    v2_count: usize,
    selection_seed: u64,
    values: Vec<f64>,
}

impl From<MeasurementSet> for MeasurementFile {
    fn from(m: MeasurementSet) -> Self {
        MeasurementFile {
            grid_side: m.plan.grid_side,
            v1_count: m.plan.v1_count,
            v2_count: m.plan.v2_count,
            selection_seed: m.plan.selection_seed,
            values: m.values,
        }
    }
}

impl TryFrom<MeasurementFile> for MeasurementSet {
    type Error = Error;

    fn try_from(f: MeasurementFile) -> Result<Self> {
        let plan = plan_measurements(f.grid_side, f.v1_count, f.v2_count, f.selection_seed)?;
        MeasurementSet::new(plan, f.values)
    }
}

/// `v = A x`: DCT coefficients of `image` at the plan's kept positions.
pub fn acquire(image: &Image, plan: &MeasurementPlan) -> Result<MeasurementSet> {
    let n = plan.grid_side;
    if image.width() != n || image.height() != n {
        return Err(Error::Dimension(format!(
            "plan is for {n}x{n}, image is {}x{}",
            image.width(),
            image.height()
        )));
    }
    let spectrum = dct2_forward(image);
    let values = plan
        .kept_indices
        .iter()
        .map(|&(r, c)| spectrum.get(r, c))
        .collect();
    MeasurementSet::new(plan.clone(), values)
}
