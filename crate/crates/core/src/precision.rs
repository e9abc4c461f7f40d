//! Arbitrary-precision plumbing over `astro-float`.
//!
//! Closed-form evaluators work with [`BigFloat`] values carrying a fixed binary
//! precision; exact integer polynomials are built with `num-bigint` and rounded
//! into the floating stage only once.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default binary precision of the floating stage.
pub const DEFAULT_BITS: usize = 256;

/// Smallest precision accepted by [`PrecisionPolicy::new`].
pub const MIN_BITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    bits: usize,
}

impl PrecisionPolicy {
    pub fn new(bits: usize) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidInput(format!(
                "precision of {bits} bits is below the minimum of {MIN_BITS}"
            )));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self { bits: DEFAULT_BITS }
    }
}

/// Evaluation context: precision, rounding mode and the constant cache that
/// astro-float needs for transcendental functions.
pub struct Hp {
    p: usize,
    rm: RoundingMode,
    cc: Consts,
}

impl Hp {
    pub fn new(policy: &PrecisionPolicy) -> Self {
        Self::with_bits(policy.bits())
    }

    pub fn with_bits(bits: usize) -> Self {
        Self {
            p: bits,
            rm: RoundingMode::ToEven,
            cc: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn bits(&self) -> usize {
        self.p
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_word(0, self.p)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_word(1, self.p)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    pub fn from_u64(&self, x: u64) -> BigFloat {
        BigFloat::from_word(x, self.p)
    }

    /// `2^e`, exact.
    pub fn pow2(&self, e: i64) -> BigFloat {
        let mut x = self.one();
        // 1 is stored as 0.1b * 2^1.
        x.set_exponent((e + 1) as i32);
        x
    }

    /// Rounds an exact integer into the floating stage.
    pub fn from_biguint(&self, n: &BigUint) -> BigFloat {
        let digits = n.to_u64_digits();
        if digits.is_empty() {
            return self.zero();
        }
        let exp = 64 * digits.len() as i32;
        let mut x = BigFloat::from_words(&digits, Sign::Pos, exp);
        // Widening cannot fail; narrowing rounds to nearest.
        let _ = x.set_precision(self.p, self.rm);
        x
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, self.rm)
    }

    pub fn ln2(&mut self) -> BigFloat {
        self.cc.ln_2(self.p, self.rm)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, self.rm)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, self.rm)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, self.rm)
    }

    pub fn sqr(&self, a: &BigFloat) -> BigFloat {
        a.mul(a, self.p, self.rm)
    }

    pub fn scale(&self, a: &BigFloat, k: u64) -> BigFloat {
        a.mul(&BigFloat::from_word(k, self.p), self.p, self.rm)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, self.rm)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.p, self.rm, &mut self.cc)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.p, self.rm, &mut self.cc)
    }

    pub fn acos(&mut self, a: &BigFloat) -> BigFloat {
        a.acos(self.p, self.rm, &mut self.cc)
    }

    pub fn asin(&mut self, a: &BigFloat) -> BigFloat {
        a.asin(self.p, self.rm, &mut self.cc)
    }

    /// Nearest integer, ties to even.
    pub fn round(&self, a: &BigFloat) -> BigFloat {
        a.round(0, self.rm)
    }

    pub fn log2(&mut self, a: &BigFloat) -> BigFloat {
        a.log2(self.p, self.rm, &mut self.cc)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, self.rm, &mut self.cc)
    }
}

/// Nearest `f64` to `x`; saturates to 0 / infinity outside the double range.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0);
    let v = ldexp(top as f64, exp as i64 - 64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Exact conversion of an integer-valued float; `None` for NaN, infinities
/// and values with a fractional part.
pub fn to_bigint(x: &BigFloat) -> Option<BigInt> {
    if x.is_zero() {
        return Some(BigInt::zero());
    }
    let (words, _, sign, exp, _) = x.as_raw_parts()?;
    // value = M * 2^(exp - 64 W), M the mantissa read as an integer.
    let mantissa = BigUint::from_slice(
        &words
            .iter()
            .flat_map(|w| [*w as u32, (*w >> 32) as u32])
            .collect::<Vec<u32>>(),
    );
    let shift = exp as i64 - 64 * words.len() as i64;
    let magnitude = if shift >= 0 {
        mantissa << shift as usize
    } else {
        let drop = (-shift) as usize;
        if (&mantissa & ((BigUint::one() << drop) - BigUint::one())) != BigUint::zero() {
            return None;
        }
        mantissa >> drop
    };
    let n = BigInt::from(magnitude);
    Some(if sign == Sign::Neg { -n } else { n })
}

/// `x * 2^e` without intermediate overflow or underflow.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Binary exponent `e` with `x = m * 2^e`, `0.5 <= |m| < 1`; `None` for zero.
pub fn exponent(x: &BigFloat) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.exponent().map(i64::from)
    }
}
