use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bloch::BlochAngles;
use crate::error::{Error, Result};
use crate::precision::PrecisionPolicy;
use crate::purity::purity_block;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    /// S₂ = αL + S_γ
    TwoTerm,
    /// S₂ = αL + S_γ + c/L
    ThreeTerm,
}

impl FitMode {
    fn unknowns(self) -> usize {
        match self {
            FitMode::TwoTerm => 2,
            FitMode::ThreeTerm => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub alpha: f64,
    pub s_gamma: f64,
    /// Coefficient of 1/L, three-term mode only.
    pub inverse_l: Option<f64>,
    /// Largest absolute residual over the fitted points.
    pub residual: f64,
    pub fit_mode: FitMode,
}

/// Least-squares fit of the exact block entropy against L at fixed angles.
pub fn extract_sgamma(
    k: usize,
    angles: &BlochAngles,
    l_values: &[usize],
    mode: FitMode,
    policy: &PrecisionPolicy,
) -> Result<FitResult> {
    let distinct: BTreeSet<usize> = l_values.iter().copied().collect();
    if distinct.len() < mode.unknowns() {
        return Err(Error::InsufficientPoints {
            needed: mode.unknowns(),
            got: distinct.len(),
        });
    }
    let ls: Vec<usize> = distinct.into_iter().collect();
    let s2 = ls
        .iter()
        .map(|&l| Ok(purity_block(k, l, angles, policy)?.renyi2_f64()))
        .collect::<Result<Vec<f64>>>()?;

    let n = ls.len();
    let x = DMatrix::from_fn(n, mode.unknowns(), |i, j| {
        let l = ls[i] as f64;
        match j {
            0 => l,
            1 => 1.0,
            _ => 1.0 / l,
        }
    });
    let y = DVector::from_vec(s2);
    let beta = x
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("least-squares solve failed: {e}")))?;
    let residual = (&y - &x * &beta).amax();
    Ok(FitResult {
        alpha: beta[0],
        s_gamma: beta[1],
        inverse_l: (mode == FitMode::ThreeTerm).then(|| beta[2]),
        residual,
        fit_mode: mode,
    })
}
