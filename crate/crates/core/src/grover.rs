//! Grover kernel K = (2|Ψ₀⟩⟨Ψ₀| − 𝕀)O restricted to span{|0̄⟩, |1̄⟩}.
//!
//! In that plane O = diag(−1, 1) and |Ψ₀⟩ = (sin θ̃/2, cos θ̃/2), so K is the
//! rotation [[cos θ̃, sin θ̃], [−sin θ̃, cos θ̃]] turning states toward |0̄⟩.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bloch::inv_sqrt_pow2;
use crate::error::{Error, Result};
use crate::precision::{to_bigint, to_f64, Hp, PrecisionPolicy};

/// Beyond this many steps `apply_kernel` rotates by mθ̃ directly.
pub const MAX_MATRIX_STEPS: i64 = 1_000_000;

/// Relative-phase tolerance for `fractional_power`.
pub const PLANE_TOL: f64 = 1e-9;

const SERIES_THRESHOLD: u64 = 100;

type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelState {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl TwoLevelState {
    pub fn new(amp0: Complex64, amp1: Complex64) -> Self {
        Self { amp0, amp1 }
    }

    pub fn real(x0: f64, x1: f64) -> Self {
        Self::new(Complex64::new(x0, 0.0), Complex64::new(x1, 0.0))
    }

    /// |0̄⟩.
    pub fn product_zero() -> Self {
        Self::real(1.0, 0.0)
    }

    /// |Ψ₀⟩.
    pub fn toric_ground(params: &GroverParams) -> Self {
        Self::real(params.sin_half(), params.cos_half())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        (self.amp0 - other.amp0)
            .norm()
            .max((self.amp1 - other.amp1).norm())
    }

    /// Componentwise distance after aligning the global phase of `other`.
    pub fn max_deviation_up_to_phase(&self, other: &Self) -> f64 {
        let ov = other.inner(self);
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let aligned = Self::new(other.amp0 * phase, other.amp1 * phase);
        self.max_deviation(&aligned)
    }

    fn apply(&self, m: &Mat2) -> Self {
        Self::new(
            self.amp0 * m[0][0] + self.amp1 * m[0][1],
            self.amp0 * m[1][0] + self.amp1 * m[1][1],
        )
    }
}

/// |G| and the base angle θ̃ = 2 arcsin(|G|^{-1/2}).
#[derive(Debug, Clone)]
pub struct GroverParams {
    log2_g: u64,
    theta_tilde: f64,
    theta_tilde_hp: BigFloat,
    policy: PrecisionPolicy,
}

impl GroverParams {
    pub fn new(log2_g: u64, policy: &PrecisionPolicy) -> Result<Self> {
        if log2_g == 0 {
            return Err(Error::InvalidInput("|G| must be at least 2".into()));
        }
        let mut hp = Hp::new(policy);
        let x = hp.sqrt(&hp.pow2(-(log2_g as i64)));
        let half = if log2_g > SERIES_THRESHOLD {
            asin_series(&hp, &x)
        } else {
            hp.asin(&x)
        };
        let theta_tilde_hp = hp.scale(&half, 2);
        Ok(Self {
            log2_g,
            theta_tilde: to_f64(&theta_tilde_hp),
            theta_tilde_hp,
            policy: *policy,
        })
    }

    pub fn log2_g(&self) -> u64 {
        self.log2_g
    }

    pub fn theta_tilde(&self) -> f64 {
        self.theta_tilde
    }

    pub fn theta_tilde_hp(&self) -> &BigFloat {
        &self.theta_tilde_hp
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    /// sin(θ̃/2) = |G|^{-1/2}.
    pub fn sin_half(&self) -> f64 {
        inv_sqrt_pow2(self.log2_g)
    }

    /// cos(θ̃/2) = √(1 − 1/|G|).
    pub fn cos_half(&self) -> f64 {
        (1.0 - crate::precision::ldexp(1.0, -(self.log2_g as i64))).sqrt()
    }

    /// K built literally as (2|Ψ₀⟩⟨Ψ₀| − 𝕀) · diag(−1, 1).
    pub fn kernel_matrix(&self) -> Mat2 {
        let (s, c) = (self.sin_half(), self.cos_half());
        let r = [[2.0 * s * s - 1.0, 2.0 * s * c], [2.0 * s * c, 2.0 * c * c - 1.0]];
        [[-r[0][0], r[0][1]], [-r[1][0], r[1][1]]]
    }
}

/// arcsin x = Σ c_n x^{2n+1}, c_n / c_{n-1} = (2n−1)² / (2n(2n+1)).
fn asin_series(hp: &Hp, x: &BigFloat) -> BigFloat {
    let x2 = hp.sqr(x);
    let mut term = x.clone();
    let mut sum = x.clone();
    let cutoff = -(hp.bits() as i64) - 8;
    let lead = crate::precision::exponent(x).unwrap_or(0);
    for n in 1u64.. {
        term = hp.mul(&term, &x2);
        term = hp.scale(&term, (2 * n - 1) * (2 * n - 1));
        term = hp.div(&term, &hp.from_u64(2 * n * (2 * n + 1)));
        sum = hp.add(&sum, &term);
        match crate::precision::exponent(&term) {
            Some(e) if e - lead > cutoff => {}
            _ => break,
        }
    }
    sum
}

fn rotation(angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    [[c, s], [-s, c]]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Nearest rotation [[a, b], [−b, a]] with a² + b² = 1; keeps long products
/// from drifting off the unit circle.
fn to_rotation(m: &Mat2) -> Mat2 {
    let a = 0.5 * (m[0][0] + m[1][1]);
    let b = 0.5 * (m[0][1] - m[1][0]);
    let r = a.hypot(b);
    [[a / r, b / r], [-b / r, a / r]]
}

fn mat_pow(base: &Mat2, mut n: u64) -> Mat2 {
    let mut acc = [[1.0, 0.0], [0.0, 1.0]];
    let mut b = to_rotation(base);
    while n > 0 {
        if n & 1 == 1 {
            acc = to_rotation(&mat_mul(&acc, &b));
        }
        b = to_rotation(&mat_mul(&b, &b));
        n >>= 1;
    }
    acc
}

/// sin and cos of `factor · θ̃ / 2` evaluated at full precision.
fn half_multiple_trig(params: &GroverParams, factor: &BigInt) -> (BigFloat, BigFloat) {
    let mut hp = Hp::new(&params.policy);
    let n = hp.from_biguint(factor.magnitude());
    let mut angle = hp.div(&hp.mul(&n, &params.theta_tilde_hp), &hp.from_u64(2));
    if factor.is_negative() {
        angle = angle.neg();
    }
    (hp.sin(&angle), hp.cos(&angle))
}

/// K^m applied to `state`; negative `m` applies K^{-1} = Kᵀ.
pub fn apply_kernel(state: &TwoLevelState, params: &GroverParams, m: i64) -> TwoLevelState {
    if m == 0 {
        return *state;
    }
    if m.unsigned_abs() > MAX_MATRIX_STEPS as u64 {
        return rotate_by_steps(state, params, &BigInt::from(m));
    }
    let power = mat_pow(&params.kernel_matrix(), m.unsigned_abs());
    let matrix = if m < 0 { transpose(&power) } else { power };
    state.apply(&matrix)
}

/// K^m as one rotation by mθ̃, for step counts of any size.
pub fn rotate_by_steps(state: &TwoLevelState, params: &GroverParams, m: &BigInt) -> TwoLevelState {
    let (s, c) = half_multiple_trig(params, &(m * 2));
    let (s, c) = (to_f64(&s), to_f64(&c));
    state.apply(&[[c, s], [-s, c]])
}

/// K^m|Ψ₀⟩ = (sin((2m+1)θ̃/2), cos((2m+1)θ̃/2)).
pub fn closed_form_iterate(params: &GroverParams, m: i64) -> TwoLevelState {
    let (s, c) = half_multiple_trig(params, &(BigInt::from(m) * 2 + 1));
    TwoLevelState::real(to_f64(&s), to_f64(&c))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalIterations {
    pub m_star: BigInt,
    pub success_prob: f64,
    /// log2(1 − success_prob), kept separately because it underflows doubles.
    pub log2_failure: f64,
}

/// m* = round(π/(2θ̃) − 1/2), clamped at zero.
pub fn optimal_iterations(params: &GroverParams) -> OptimalIterations {
    let m_star = nearest_step(params);
    let (s, c) = half_multiple_trig(params, &(&m_star * 2 + 1));
    let mut hp = Hp::new(&params.policy);
    OptimalIterations {
        success_prob: to_f64(&hp.sqr(&s)),
        log2_failure: log2_of_square(&mut hp, &c),
        m_star,
    }
}

fn nearest_step(params: &GroverParams) -> BigInt {
    let mut hp = Hp::new(&params.policy);
    let pi = hp.pi();
    let q = hp.div(&pi, &hp.scale(&params.theta_tilde_hp, 2));
    let q = hp.sub(&q, &hp.from_f64(0.5));
    let m = to_bigint(&hp.round(&q)).unwrap_or_default();
    m.max(BigInt::zero())
}

fn log2_of_square(hp: &mut Hp, x: &BigFloat) -> f64 {
    let sq = hp.sqr(x);
    if sq.is_zero() {
        f64::NEG_INFINITY
    } else {
        to_f64(&hp.log2(&sq))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversePreparation {
    pub m: BigInt,
    pub infidelity: f64,
    pub log2_infidelity: f64,
}

/// Number of K^{-1} steps taking |0̄⟩ closest to |Ψ₀⟩.
///
/// K^{-m}|0̄⟩ sits at angle π/2 − mθ̃ in the (sin, cos) parametrization, so the
/// infidelity with |Ψ₀⟩ is cos²((2m+1)θ̃/2).
pub fn inverse_prepare(params: &GroverParams) -> InversePreparation {
    let centre = nearest_step(params);
    let mut hp = Hp::new(&params.policy);
    let mut best: Option<(BigInt, BigFloat)> = None;
    for delta in -1i64..=1 {
        let m = &centre + delta;
        if m.is_negative() {
            continue;
        }
        let (_, c) = half_multiple_trig(params, &(&m * 2 + 1));
        let inf = hp.sqr(&c);
        let better = match &best {
            None => true,
            Some((_, b)) => inf < *b,
        };
        if better {
            best = Some((m, inf));
        }
    }
    let (m, inf) = best.expect("at least one candidate step");
    let log2_infidelity = if inf.is_zero() {
        f64::NEG_INFINITY
    } else {
        to_f64(&hp.log2(&inf))
    };
    InversePreparation {
        m,
        infidelity: to_f64(&inf),
        log2_infidelity,
    }
}

/// K^t for real t, defined on states of the real X-Z plane.
pub fn fractional_power(
    params: &GroverParams,
    exponent: f64,
    state: &TwoLevelState,
) -> Result<TwoLevelState> {
    let (lead, other) = if state.amp0.norm() >= state.amp1.norm() {
        (state.amp0, state.amp1)
    } else {
        (state.amp1, state.amp0)
    };
    if lead.norm() == 0.0 {
        return Err(Error::InvalidInput("zero state".into()));
    }
    let unphase = lead.conj() / lead.norm();
    if other.norm() > PLANE_TOL {
        let rel = (other * unphase).arg();
        let off = rel.abs().min(std::f64::consts::PI - rel.abs());
        if off > PLANE_TOL {
            return Err(Error::NotInPlane { phase: rel });
        }
    }
    let x0 = (state.amp0 * unphase).re;
    let x1 = (state.amp1 * unphase).re;
    let rotated = TwoLevelState::real(x0, x1).apply(&rotation(exponent * params.theta_tilde));
    let phase = unphase.conj();
    Ok(TwoLevelState::new(rotated.amp0 * phase, rotated.amp1 * phase))
}

impl OptimalIterations {
    /// `m_star` as a machine integer when it fits.
    pub fn m_star_i64(&self) -> Option<i64> {
        self.m_star.to_i64()
    }
}
