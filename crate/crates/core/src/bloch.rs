//! Points on the Bloch sphere spanned by the product state |0̄⟩ and the
//! toric-code ground state, plus the (a, b) decomposition of a point over
//! {|0̄⟩, |Ψ₀⟩}.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest log2|G| for which (a, b) are formed in double precision.
pub const MAX_COEFFICIENT_LOG2_G: u64 = 60;

/// `theta` in [0, π]; `phi` reduced into [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    theta: f64,
    phi: f64,
}

impl BlochAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "angles must be finite, got theta={theta}, phi={phi}"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidInput(format!(
                "theta = {theta} lies outside [0, pi]"
            )));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Same point with a different azimuth.
    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        Self::new(self.theta, phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    /// |0̄⟩ = |0⟩^⊗n, the north pole.
    ProductZero,
    /// |1̄⟩, the normalized sum over g ≠ 𝕀, the south pole.
    OrthogonalOne,
    /// |Ψ₀⟩ at (θ₀, 0).
    ToricGround,
    /// |Ψ̄₀⟩, antipode of |Ψ₀⟩.
    ToricAntipode,
}

impl NamedState {
    pub fn angles(&self, log2_g: u64) -> BlochAngles {
        let theta0 = toric_angles(log2_g).theta;
        let (theta, phi) = match self {
            NamedState::ProductZero => (0.0, 0.0),
            NamedState::OrthogonalOne => (PI, 0.0),
            NamedState::ToricGround => (theta0, 0.0),
            NamedState::ToricAntipode => (PI - theta0, PI),
        };
        BlochAngles { theta, phi }
    }
}

/// (θ₀, 0) with θ₀ = 2 arccos(|G|^{-1/2}).
pub fn toric_angles(log2_g: u64) -> BlochAngles {
    let theta = if log2_g > 1000 {
        // arccos(x) = π/2 - x + O(x³)
        PI - 2.0 * inv_sqrt_pow2(log2_g)
    } else {
        2.0 * inv_sqrt_pow2(log2_g).acos()
    };
    BlochAngles { theta, phi: 0.0 }
}

/// `2^{-e/2}`.
pub(crate) fn inv_sqrt_pow2(e: u64) -> f64 {
    let half = crate::precision::ldexp(1.0, -((e / 2) as i64));
    if e % 2 == 1 {
        half * std::f64::consts::FRAC_1_SQRT_2
    } else {
        half
    }
}

/// Amplitudes of a point in the {|0̄⟩, |1̄⟩} basis.
pub fn two_level_amplitudes(angles: &BlochAngles) -> (Complex64, Complex64) {
    let half = angles.theta / 2.0;
    (
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), angles.phi),
    )
}

/// Amplitudes of a point over the non-orthogonal pair {|0̄⟩, |Ψ₀⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionCoefficients {
    pub a: Complex64,
    pub b: Complex64,
}

impl SuperpositionCoefficients {
    /// ‖a|0̄⟩ + b|Ψ₀⟩‖² given ⟨0̄|Ψ₀⟩ = |G|^{-1/2}.
    pub fn norm_sqr(&self, log2_g: u64) -> f64 {
        let g = (log2_g as f64).exp2();
        (self.a + self.b / g.sqrt()).norm_sqr() + self.b.norm_sqr() * (1.0 - 1.0 / g)
    }
}

pub fn coefficients(angles: &BlochAngles, log2_g: u64) -> Result<SuperpositionCoefficients> {
    if log2_g > MAX_COEFFICIENT_LOG2_G {
        return Err(Error::ScaleTooLarge {
            what: "log2|G| for double-precision coefficients",
            value: log2_g as usize,
            limit: MAX_COEFFICIENT_LOG2_G as usize,
        });
    }
    if log2_g == 0 {
        return Err(Error::InvalidInput("|G| = 1 has no |1̄⟩ state".into()));
    }
    let g = (log2_g as f64).exp2();
    let half = angles.theta / 2.0;
    let (s, c) = half.sin_cos();
    let phase = Complex64::from_polar(1.0, angles.phi);
    let a = Complex64::new(c, 0.0) - phase * (s / (g - 1.0).sqrt());
    let b = phase * (s * (g / (g - 1.0)).sqrt());
    Ok(SuperpositionCoefficients { a, b })
}
