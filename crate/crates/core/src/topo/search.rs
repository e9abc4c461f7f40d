use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use astro_float::BigFloat;
use serde::Serialize;

use crate::bloch::BlochAngles;
use crate::error::Result;
use crate::precision::{to_f64, Hp, PrecisionPolicy};
use crate::purity::BlockEvaluator;

/// Grid intervals of the pre-scan that brackets the maximum.
pub const MAX_PRESCAN: usize = 128;

/// Points of the φ grid used by [`phi_variation`].
pub const PHI_POINTS: usize = 64;

const THETA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyMax {
    pub theta_max: f64,
    pub s2_max: f64,
}

fn cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(x) if x < 0 => Ordering::Less,
        Some(x) if x > 0 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

/// Position and height of the largest S₂ along θ at fixed φ.
///
/// A uniform pre-scan picks the best interior grid point; golden-section
/// search then refines inside its two neighbouring intervals. Comparisons use
/// the full-precision entropy, so the flat top of the curve stays resolved.
pub fn find_entropy_max(
    k: usize,
    l: usize,
    phi: f64,
    policy: &PrecisionPolicy,
) -> Result<EntropyMax> {
    let evaluator = BlockEvaluator::new(k, l, policy)?;
    let s2 = |theta: f64| -> Result<BigFloat> {
        Ok(evaluator
            .evaluate(&BlochAngles::new(theta.clamp(0.0, PI), phi)?)?
            .renyi2()
            .clone())
    };
    let step = PI / MAX_PRESCAN as f64;

    let mut best_j = 1;
    let mut best = s2(step)?;
    for j in 2..MAX_PRESCAN {
        let v = s2(j as f64 * step)?;
        if cmp(&v, &best) == Ordering::Greater {
            best = v;
            best_j = j;
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best_j - 1) as f64 * step, (best_j + 1) as f64 * step);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = s2(x1)?;
    let mut f2 = s2(x2)?;
    while b - a > THETA_TOL {
        if cmp(&f1, &f2) == Ordering::Less {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = s2(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = s2(x1)?;
        }
    }
    let theta_max = 0.5 * (a + b);
    let top = s2(theta_max)?;
    // The refined point never reports less than the pre-scan found.
    let (theta_max, top) = if cmp(&top, &best) == Ordering::Less {
        (best_j as f64 * step, best)
    } else {
        (theta_max, top)
    };
    Ok(EntropyMax {
        theta_max,
        s2_max: to_f64(&top),
    })
}

/// max_φ S₂ − min_φ S₂ over φ_j = 2πj/64 at fixed θ.
pub fn phi_variation(k: usize, l: usize, theta: f64, policy: &PrecisionPolicy) -> Result<f64> {
    let evaluator = BlockEvaluator::new(k, l, policy)?;
    let values = (0..PHI_POINTS)
        .map(|j| {
            let phi = TAU * j as f64 / PHI_POINTS as f64;
            Ok(evaluator
                .evaluate(&BlochAngles::new(theta, phi)?)?
                .renyi2()
                .clone())
        })
        .collect::<Result<Vec<BigFloat>>>()?;
    let max = values.iter().max_by(|a, b| cmp(a, b)).expect("non-empty grid");
    let min = values.iter().min_by(|a, b| cmp(a, b)).expect("non-empty grid");
    let hp = Hp::new(policy);
    Ok(to_f64(&hp.sub(max, min)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::toric_angles;

    #[test]
    fn maximum_moves_right_with_block_size() {
        let p = PrecisionPolicy::default();
        let m2 = find_entropy_max(20, 2, 0.0, &p).unwrap();
        let m4 = find_entropy_max(20, 4, 0.0, &p).unwrap();
        assert!(m4.theta_max > m2.theta_max);
        let at_toric = BlockEvaluator::new(20, 2, &p)
            .unwrap()
            .evaluate(&toric_angles(399))
            .unwrap()
            .renyi2_f64();
        assert!(m2.s2_max >= at_toric);
        // Regression value from the exact evaluator.
        assert!((m2.theta_max - 2.970_803_907_487).abs() < 1e-9);
        assert!((m2.s2_max - 7.009_872_645_598_550).abs() < 1e-12);
    }

    #[test]
    fn phi_dependence() {
        let p = PrecisionPolicy::default();
        assert_eq!(phi_variation(5, 1, 0.0, &p).unwrap(), 0.0);
        assert!(phi_variation(20, 10, PI / 2.0, &p).unwrap() <= 1e-9);
        assert!(phi_variation(4, 1, PI / 2.0, &p).unwrap() > 0.0);
    }
}
