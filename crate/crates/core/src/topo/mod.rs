//! Asymptotic forms of the block purity, the expansion around the toric
//! point, and the area-law diagnostics built on the exact evaluator.

mod fit;
mod search;

pub use fit::{extract_sgamma, FitMode, FitResult};
pub use search::{find_entropy_max, phi_variation, EntropyMax, MAX_PRESCAN, PHI_POINTS};

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::bloch::BlochAngles;
use crate::error::{Error, Result};
use crate::precision::{Hp, PrecisionPolicy};
use crate::purity::{half_angle_trig, PurityValue};

/// s⁴·2^{-4L+1} + 2s²c²·2^{-L²-4L+1} + c⁴, the k → ∞ limit of the block purity.
pub fn approx_large_k(l: usize, angles: &BlochAngles, policy: &PrecisionPolicy) -> PurityValue {
    approx(l, angles, policy, true)
}

/// s⁴·2^{-4L+1} + c⁴, dropping the middle term as well.
pub fn approx_large_l(l: usize, angles: &BlochAngles, policy: &PrecisionPolicy) -> PurityValue {
    approx(l, angles, policy, false)
}

fn approx(l: usize, angles: &BlochAngles, policy: &PrecisionPolicy, middle: bool) -> PurityValue {
    let mut hp = Hp::new(policy);
    let (s, c) = half_angle_trig(&mut hp, angles.theta());
    let (s2, c2) = (hp.sqr(&s), hp.sqr(&c));
    let l = l as i64;
    let mut purity = hp.add(
        &hp.mul(&hp.sqr(&s2), &hp.pow2(-4 * l + 1)),
        &hp.sqr(&c2),
    );
    if middle {
        let t = hp.mul(&hp.mul(&s2, &c2), &hp.pow2(-l * l - 4 * l + 2));
        purity = hp.add(&purity, &t);
    }
    PurityValue::from_purity(&mut hp, purity)
}

/// ε = cos⁴(θ/2), the distance from the toric point in the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    epsilon: f64,
}

impl Perturbation {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon = {epsilon} lies outside (0, 1)"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// θ = 2 arccos(ε^{1/4}), φ = 0.
pub fn epsilon_to_theta(p: &Perturbation) -> BlochAngles {
    let theta = 2.0 * p.epsilon.sqrt().sqrt().acos();
    BlochAngles::new(theta, 0.0).expect("arccos lands in [0, pi/2]")
}

/// S₂ ≈ 4L − 1 + 2√ε / ln 2, kept as its two parts since the correction is
/// far below the resolution of a double next to the area term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbedEntropy {
    pub area: f64,
    pub correction: f64,
    /// Set when ε ≥ 2^{-4L}, outside the regime of the expansion.
    pub condition_violated: bool,
}

impl PerturbedEntropy {
    pub fn value(&self) -> f64 {
        self.area + self.correction
    }
}

pub fn perturbed_entropy(l: usize, p: &Perturbation) -> PerturbedEntropy {
    let threshold = crate::precision::ldexp(1.0, -4 * l as i64);
    PerturbedEntropy {
        area: (4 * l) as f64 - 1.0,
        correction: 2.0 * p.epsilon.sqrt() / LN_2,
        condition_violated: p.epsilon >= threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::toric_angles;
    use crate::precision::{ldexp, to_f64};
    use crate::purity::purity_block;
    use std::f64::consts::PI;

    fn angles(theta: f64) -> BlochAngles {
        BlochAngles::new(theta, 0.0).unwrap()
    }

    #[test]
    fn approximation_endpoints() {
        let p = PrecisionPolicy::default();
        assert_eq!(approx_large_k(1, &angles(0.0), &p).purity_f64(), 1.0);
        assert_eq!(approx_large_l(10, &angles(0.0), &p).purity_f64(), 1.0);
        assert_eq!(approx_large_k(10, &angles(PI), &p).purity_f64(), ldexp(1.0, -39));
        assert_eq!(approx_large_l(10, &angles(PI), &p).purity_f64(), ldexp(1.0, -39));
    }

    #[test]
    fn large_k_form_near_toric_point() {
        let p = PrecisionPolicy::default();
        let t = toric_angles(399);
        let exact = purity_block(20, 10, &t, &p).unwrap().purity_f64();
        let approx = approx_large_k(10, &t, &p).purity_f64();
        assert!((approx / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn large_l_form_deep_in_perturbative_regime() {
        let p = PrecisionPolicy::default();
        let t = epsilon_to_theta(&Perturbation::new(1e-20).unwrap());
        let exact = purity_block(30, 6, &t, &p).unwrap().purity_f64();
        let approx = approx_large_l(6, &t, &p).purity_f64();
        assert!((approx / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn epsilon_round_trip() {
        let quarter = epsilon_to_theta(&Perturbation::new(0.25).unwrap());
        assert!((quarter.theta() - PI / 2.0).abs() < 1e-15);
        let tiny = epsilon_to_theta(&Perturbation::new(1e-20).unwrap());
        assert!((tiny.theta() - (PI - 2e-5)).abs() < 1e-14);
        for eps in [1e-30, 1e-12, 0.3, 0.9] {
            let t = epsilon_to_theta(&Perturbation::new(eps).unwrap());
            // θ is a double, so cos(θ/2) carries an absolute error near 1e-16.
            let tol = 1e-14 / eps.powf(0.25);
            assert!(((t.theta() / 2.0).cos().powi(4) / eps - 1.0).abs() < tol);
        }
        assert!(Perturbation::new(1.0).is_err());
        assert!(Perturbation::new(0.0).is_err());
    }

    #[test]
    fn perturbed_entropy_examples() {
        let e = perturbed_entropy(10, &Perturbation::new(1e-30).unwrap());
        assert_eq!(e.area, 39.0);
        assert!((e.correction - 2.885390081777927e-15).abs() < 1e-27);
        assert!(!e.condition_violated);
        assert!(perturbed_entropy(2, &Perturbation::new(0.01).unwrap()).condition_violated);
    }

    #[test]
    fn perturbed_entropy_against_exact() {
        let policy = PrecisionPolicy::default();
        let pert = Perturbation::new(1e-20).unwrap();
        let exact = purity_block(30, 6, &epsilon_to_theta(&pert), &policy).unwrap();
        let hp = Hp::new(&policy);
        let e = perturbed_entropy(6, &pert);
        let excess = hp.sub(exact.renyi2(), &hp.from_f64(e.area));
        let delta = to_f64(&excess) - e.correction;
        assert!(delta.abs() <= 1e-12, "delta = {delta}");
    }
}
