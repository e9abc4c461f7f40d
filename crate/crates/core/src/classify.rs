//! Separability scan of the sphere surface: the only product state should be
//! the north pole.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::BlochAngles;
use crate::error::{Error, Result};
use crate::precision::{to_f64, PrecisionPolicy};
use crate::purity::BlockEvaluator;

pub const INTERIOR_DISCLAIMER: &str =
    "only pure states on the sphere surface were scanned; mixed states in the interior are untested";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub k: usize,
    pub l: usize,
    pub theta_points: usize,
    pub phi_points: usize,
    /// Smallest S₂ over grid points with θ > 0, and where it occurs.
    pub min_s2_off_pole: Option<f64>,
    pub min_s2_at: Option<(f64, f64)>,
    /// Every grid point with θ > 0 has S₂ strictly positive.
    pub entangled_off_pole: bool,
    /// Largest S₂ over grid points at θ = 0, if the pole is on the grid.
    pub max_s2_at_pole: Option<f64>,
    pub class4_consistent: bool,
    pub disclaimer: &'static str,
}

pub fn classify(
    k: usize,
    l: usize,
    theta_grid: &[f64],
    phi_grid: &[f64],
    policy: &PrecisionPolicy,
) -> Result<ClassifyReport> {
    if theta_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::InvalidInput("classify grids must be non-empty".into()));
    }
    let evaluator = BlockEvaluator::new(k, l, policy)?;
    let points: Vec<(f64, f64)> = theta_grid
        .iter()
        .flat_map(|&t| phi_grid.iter().map(move |&p| (t, p)))
        .collect();
    // (θ, φ, S₂ as a double, S₂ > 0 at full precision)
    let values = points
        .par_iter()
        .map(|&(theta, phi)| {
            let v = evaluator.evaluate(&BlochAngles::new(theta, phi)?)?;
            let positive = v.renyi2().is_positive() && !v.renyi2().is_zero();
            Ok((theta, phi, v.renyi2_f64(), positive))
        })
        .collect::<Result<Vec<_>>>()?;

    let off_pole: Vec<_> = values.iter().filter(|v| v.0 > 0.0).collect();
    let pole: Vec<_> = values.iter().filter(|v| v.0 == 0.0).collect();
    let min = off_pole
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .map(|v| (v.2, (v.0, v.1)));
    let entangled_off_pole = off_pole.iter().all(|v| v.3);
    let max_s2_at_pole = pole.iter().map(|v| v.2).reduce(f64::max);
    let pole_separable = pole.iter().all(|v| !v.3 && v.2 == 0.0);

    Ok(ClassifyReport {
        k,
        l,
        theta_points: theta_grid.len(),
        phi_points: phi_grid.len(),
        min_s2_off_pole: min.map(|m| m.0),
        min_s2_at: min.map(|m| m.1),
        entangled_off_pole,
        max_s2_at_pole,
        class4_consistent: entangled_off_pole && !pole.is_empty() && pole_separable,
        disclaimer: INTERIOR_DISCLAIMER,
    })
}

/// S₂ at the south pole, the state |1̄⟩.
pub fn south_pole_entropy(k: usize, l: usize, policy: &PrecisionPolicy) -> Result<f64> {
    let v = BlockEvaluator::new(k, l, policy)?.evaluate(&BlochAngles::new(PI, 0.0)?)?;
    Ok(to_f64(v.renyi2()))
}
