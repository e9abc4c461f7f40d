//! Exact/high-precision evaluation of tr(ρ_A²) and the 2-Rényi entropy for
//! every point of the sphere.
//!
//! Two routes are provided. [`purity_general`] assembles the ten-term
//! expression in (a, b) for an arbitrary region given its group exponents.
//! [`purity_block`] evaluates the four-term specialization for an `L x L`
//! block, where every power-of-two polynomial is an exact big integer and only
//! the final combination with the trigonometric factors is rounded.

use std::f64::consts::PI;

use astro_float::BigFloat;
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::BlochAngles;
use crate::error::{Error, Result};
use crate::lattice::{block_sigma, RegionCombinatorics};
use crate::precision::{exponent, to_f64, Hp, PrecisionPolicy};

/// Significant bits that must survive cancellation in the final sum.
pub const MIN_SURVIVING_BITS: f64 = 10.0;

/// Rounding slack, in bits, charged against each term of a sum.
const GUARD_BITS: usize = 8;

/// tr(ρ_A²) together with log2 of it and S₂ in bits.
#[derive(Debug, Clone)]
pub struct PurityValue {
    purity: BigFloat,
    log2_purity: BigFloat,
    renyi2: BigFloat,
}

impl PurityValue {
    pub fn purity(&self) -> &BigFloat {
        &self.purity
    }

    pub fn log2_purity(&self) -> &BigFloat {
        &self.log2_purity
    }

    /// S₂ = -log₂ tr(ρ_A²).
    pub fn renyi2(&self) -> &BigFloat {
        &self.renyi2
    }

    pub fn purity_f64(&self) -> f64 {
        to_f64(&self.purity)
    }

    pub fn log2_purity_f64(&self) -> f64 {
        to_f64(&self.log2_purity)
    }

    pub fn renyi2_f64(&self) -> f64 {
        to_f64(&self.renyi2)
    }

    /// Wraps an already-evaluated purity.
    pub(crate) fn from_purity(hp: &mut Hp, purity: BigFloat) -> Self {
        let log2_purity = hp.log2(&purity);
        let mut renyi2 = log2_purity.neg();
        if renyi2.is_zero() {
            renyi2 = hp.zero();
        }
        Self {
            purity,
            log2_purity,
            renyi2,
        }
    }
}

/// sin(θ/2), cos(θ/2) at working precision, exact at the poles.
pub(crate) fn half_angle_trig(hp: &mut Hp, theta: f64) -> (BigFloat, BigFloat) {
    if theta == 0.0 {
        return (hp.zero(), hp.one());
    }
    if theta == PI {
        return (hp.one(), hp.zero());
    }
    let half = hp.from_f64(theta / 2.0);
    (hp.sin(&half), hp.cos(&half))
}

fn phi_trig(hp: &mut Hp, phi: f64) -> (BigFloat, BigFloat) {
    if phi == 0.0 {
        return (hp.one(), hp.zero());
    }
    let x = hp.from_f64(phi);
    (hp.cos(&x), hp.sin(&x))
}

/// Sums `terms`, checking how many significant bits survive cancellation.
fn checked_sum(hp: &Hp, terms: &[BigFloat]) -> Result<(BigFloat, BigFloat)> {
    let mut sum = hp.zero();
    let mut sum_abs = hp.zero();
    for t in terms {
        sum = hp.add(&sum, t);
        sum_abs = hp.add(&sum_abs, &t.abs());
    }
    let bits = hp.bits();
    let surviving = match (exponent(&sum), exponent(&sum_abs)) {
        _ if sum.is_negative() => f64::NEG_INFINITY,
        (Some(e_sum), Some(e_abs)) => (bits - GUARD_BITS) as f64 - (e_abs - e_sum) as f64,
        _ => f64::NEG_INFINITY,
    };
    if surviving < MIN_SURVIVING_BITS {
        return Err(Error::PrecisionTooLow { bits, surviving });
    }
    Ok((sum, sum_abs))
}

/// Clamps a purity that exceeds 1 by no more than the rounding bound.
fn clamp_unit(hp: &Hp, purity: BigFloat, sum_abs: &BigFloat) -> BigFloat {
    let one = hp.one();
    if purity.cmp(&one) == Some(1) {
        let excess = hp.sub(&purity, &one);
        let bound = hp.mul(sum_abs, &hp.pow2(-((hp.bits() - GUARD_BITS) as i64)));
        if excess.cmp(&bound) != Some(1) {
            return one;
        }
    }
    purity
}

fn pow2_int(e: u64) -> BigUint {
    BigUint::one() << e
}

/// Exact integer ingredients of the block formula, rounded once into the
/// floating stage as the three ratios multiplying the trigonometric factors.
#[derive(Debug, Clone)]
pub struct BlockEvaluator {
    k: usize,
    l: usize,
    policy: PrecisionPolicy,
    /// (2^{2k²-4L-1} - (2^{L²+1}-1)(2^{k²-L²-4L+1}-1)) / (2^{k²-1}-1)²
    quartic: BigFloat,
    /// (2^{L²}-1)(2^{k²-L²-4L}-1) / (2^{k²-1}-1)^{3/2}
    cross: BigFloat,
    /// (2^{L²} + 2^{k²-L²-4L} - 2) / (2^{k²-1}-1)
    mixed: BigFloat,
}

impl BlockEvaluator {
    pub fn new(k: usize, l: usize, policy: &PrecisionPolicy) -> Result<Self> {
        let sigma = block_sigma(k, l)?;
        let kk = (k * k) as u64;
        let (sa, sb) = (sigma.sigma_a, sigma.sigma_b);
        let one = BigUint::one();

        let lead = BigInt::from(pow2_int(2 * kk - 4 * l as u64 - 1));
        let sub = BigInt::from((pow2_int(sa + 1) - &one) * (pow2_int(sb + 1) - &one));
        let numerator1 = lead - sub;
        if numerator1.sign() != Sign::Plus {
            return Err(Error::InvalidInput(format!(
                "leading block numerator is not positive for k={k}, L={l}"
            )));
        }
        let numerator1 = numerator1.abs().to_biguint().expect("positive");
        let denom = pow2_int(kk - 1) - &one;
        let numerator2 = (pow2_int(sa) - &one) * (pow2_int(sb) - &one);
        let numerator3 = pow2_int(sa) + pow2_int(sb) - BigUint::from(2u8);

        let hp = Hp::new(policy);
        let d = hp.from_biguint(&denom);
        let d_sq = hp.from_biguint(&(&denom * &denom));
        // n·√n with √n at working precision.
        let d_three_halves = hp.mul(&d, &hp.sqrt(&d));
        Ok(Self {
            k,
            l,
            policy: *policy,
            quartic: hp.div(&hp.from_biguint(&numerator1), &d_sq),
            cross: hp.div(&hp.from_biguint(&numerator2), &d_three_halves),
            mixed: hp.div(&hp.from_biguint(&numerator3), &d),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn evaluate(&self, angles: &BlochAngles) -> Result<PurityValue> {
        let mut hp = Hp::new(&self.policy);
        let (s, c) = half_angle_trig(&mut hp, angles.theta());
        let (cos_phi, _) = phi_trig(&mut hp, angles.phi());
        let s2 = hp.sqr(&s);
        let c2 = hp.sqr(&c);
        let s3c = hp.mul(&hp.mul(&s2, &s), &c);

        let t_quartic = hp.mul(&hp.sqr(&s2), &self.quartic);
        let t_cross = hp.scale(&hp.mul(&hp.mul(&cos_phi, &s3c), &self.cross), 4);
        let t_mixed = hp.scale(&hp.mul(&hp.mul(&s2, &c2), &self.mixed), 2);
        let t_pole = hp.sqr(&c2);

        let (sum, sum_abs) = checked_sum(&hp, &[t_quartic, t_cross, t_mixed, t_pole])?;
        let purity = clamp_unit(&hp, sum, &sum_abs);
        Ok(PurityValue::from_purity(&mut hp, purity))
    }
}

/// tr(ρ_A²) for the `L x L` block on the `k x k` torus.
pub fn purity_block(
    k: usize,
    l: usize,
    angles: &BlochAngles,
    policy: &PrecisionPolicy,
) -> Result<PurityValue> {
    BlockEvaluator::new(k, l, policy)?.evaluate(angles)
}

#[derive(Clone)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

impl Cx {
    fn real(re: BigFloat, hp: &Hp) -> Self {
        Self { re, im: hp.zero() }
    }

    fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    fn add(&self, o: &Cx, hp: &Hp) -> Cx {
        Cx {
            re: hp.add(&self.re, &o.re),
            im: hp.add(&self.im, &o.im),
        }
    }

    fn sub(&self, o: &Cx, hp: &Hp) -> Cx {
        Cx {
            re: hp.sub(&self.re, &o.re),
            im: hp.sub(&self.im, &o.im),
        }
    }

    fn mul(&self, o: &Cx, hp: &Hp) -> Cx {
        Cx {
            re: hp.sub(&hp.mul(&self.re, &o.re), &hp.mul(&self.im, &o.im)),
            im: hp.add(&hp.mul(&self.re, &o.im), &hp.mul(&self.im, &o.re)),
        }
    }

    fn scale(&self, x: &BigFloat, hp: &Hp) -> Cx {
        Cx {
            re: hp.mul(&self.re, x),
            im: hp.mul(&self.im, x),
        }
    }

    fn norm_sqr(&self, hp: &Hp) -> BigFloat {
        hp.add(&hp.sqr(&self.re), &hp.sqr(&self.im))
    }
}

/// tr(ρ_A²) for any region from its group exponents, via the ten-term
/// expression in the amplitudes (a, b) over {|0̄⟩, |Ψ₀⟩}.
///
/// a and b are assembled from θ, φ and exact powers of two at working
/// precision, so nothing underflows at large |G|. The imaginary part of the
/// sum must cancel to within 2^{-bits/2}.
pub fn purity_general(
    comb: &RegionCombinatorics,
    angles: &BlochAngles,
    policy: &PrecisionPolicy,
) -> Result<PurityValue> {
    if comb.log2_g == 0 {
        return Err(Error::InvalidInput("|G| = 1 has no |1̄⟩ state".into()));
    }
    let mut hp = Hp::new(policy);
    let (s, c) = half_angle_trig(&mut hp, angles.theta());
    let (cos_phi, sin_phi) = phi_trig(&mut hp, angles.phi());
    let phase = Cx {
        re: cos_phi,
        im: sin_phi,
    };

    let g_minus_one = hp.from_biguint(&(pow2_int(comb.log2_g) - BigUint::one()));
    let inv_sqrt_g_minus_one = hp.div(&hp.one(), &hp.sqrt(&g_minus_one));
    let sqrt_g = hp.sqrt(&hp.pow2(comb.log2_g as i64));
    let inv_sqrt_g = hp.sqrt(&hp.pow2(-(comb.log2_g as i64)));
    let inv_g = hp.pow2(-(comb.log2_g as i64));
    let inv_f = hp.pow2(-(comb.log2_f as i64));
    let d_a = hp.pow2(comb.log2_da as i64);
    let da_over_f = hp.pow2(comb.log2_da as i64 - comb.log2_f as i64);

    // a = cos(θ/2) - e^{iφ} sin(θ/2)/√(|G|-1),  b = e^{iφ} sin(θ/2) √|G|/√(|G|-1)
    let a = Cx::real(c, &hp).sub(&phase.scale(&hp.mul(&s, &inv_sqrt_g_minus_one), &hp), &hp);
    let b = phase.scale(&hp.mul(&hp.mul(&s, &sqrt_g), &inv_sqrt_g_minus_one), &hp);

    let a2 = a.norm_sqr(&hp);
    let b2 = b.norm_sqr(&hp);
    let a_conj_b = a.conj().mul(&b, &hp);
    let a_b_conj = a.mul(&b.conj(), &hp);
    let two = hp.from_u64(2);
    let a2b2 = hp.mul(&a2, &b2);
    let mixed_scale = hp.mul(&da_over_f, &inv_sqrt_g);

    let terms: [Cx; 10] = [
        Cx::real(hp.sqr(&a2), &hp),
        Cx::real(hp.mul(&hp.sqr(&b2), &da_over_f), &hp),
        a_conj_b.mul(&a_conj_b, &hp).scale(&inv_g, &hp),
        a_b_conj.mul(&a_b_conj, &hp).scale(&inv_g, &hp),
        Cx::real(hp.mul(&hp.mul(&two, &a2b2), &inv_f), &hp),
        a_conj_b.scale(&hp.mul(&hp.mul(&two, &a2), &inv_sqrt_g), &hp),
        a_b_conj.scale(&hp.mul(&hp.mul(&two, &a2), &inv_sqrt_g), &hp),
        a_conj_b.scale(&hp.mul(&hp.mul(&two, &b2), &mixed_scale), &hp),
        a_b_conj.scale(&hp.mul(&hp.mul(&two, &b2), &mixed_scale), &hp),
        // 2|a|²|b|² ⟨φ_A|φ_A⟩ / |G| with ⟨φ_A|φ_A⟩ = d_A.
        Cx::real(hp.mul(&hp.mul(&hp.mul(&two, &a2b2), &d_a), &inv_g), &hp),
    ];

    let mut total = Cx::real(hp.zero(), &hp);
    for t in &terms {
        total = total.add(t, &hp);
    }
    let tolerance = hp.pow2(-(policy.bits() as i64 / 2));
    if total.im.abs().cmp(&tolerance) == Some(1) {
        return Err(Error::NonRealResidue {
            residue: to_f64(&total.im.abs()),
        });
    }
    let reals: Vec<BigFloat> = terms.into_iter().map(|t| t.re).collect();
    let (sum, sum_abs) = checked_sum(&hp, &reals)?;
    let purity = clamp_unit(&hp, sum, &sum_abs);
    Ok(PurityValue::from_purity(&mut hp, purity))
}

/// One `theta,phi,S2` row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub phi: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    pub log2_purity: f64,
}

/// S₂ over the product grid `theta_grid x phi_grid`, row-major in θ.
pub fn sweep(
    k: usize,
    l: usize,
    theta_grid: &[f64],
    phi_grid: &[f64],
    policy: &PrecisionPolicy,
) -> Result<Vec<SweepRow>> {
    if theta_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::InvalidInput("sweep grids must be non-empty".into()));
    }
    let evaluator = BlockEvaluator::new(k, l, policy)?;
    let points: Vec<(f64, f64)> = theta_grid
        .iter()
        .flat_map(|&t| phi_grid.iter().map(move |&p| (t, p)))
        .collect();
    points
        .par_iter()
        .map(|&(theta, phi)| {
            let value = evaluator.evaluate(&BlochAngles::new(theta, phi)?)?;
            Ok(SweepRow {
                theta,
                phi,
                s2: value.renyi2_f64(),
                log2_purity: value.log2_purity_f64(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::toric_angles;
    use crate::lattice::{subset_combinatorics, SubsetSpec, TorusLattice};

    fn angles(theta: f64, phi: f64) -> BlochAngles {
        BlochAngles::new(theta, phi).unwrap()
    }

    #[test]
    fn product_state_is_pure() {
        let p = PrecisionPolicy::default();
        let v = purity_block(3, 1, &angles(0.0, 0.0), &p).unwrap();
        assert_eq!(v.purity_f64(), 1.0);
        assert_eq!(v.renyi2_f64(), 0.0);
        let comb = subset_combinatorics(
            &TorusLattice::new(2).unwrap(),
            &SubsetSpec::Star(0, 0).resolve(&TorusLattice::new(2).unwrap()).unwrap(),
        )
        .unwrap();
        let v = purity_general(&comb, &angles(0.0, 2.0), &p).unwrap();
        assert_eq!(v.purity_f64(), 1.0);
        assert!(v.renyi2().is_zero());
    }

    #[test]
    fn toric_point_small_block() {
        let p = PrecisionPolicy::default();
        let v = purity_block(3, 1, &toric_angles(8), &p).unwrap();
        assert!((v.purity_f64() - 0.125).abs() < 1e-15);
        assert!((v.renyi2_f64() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn toric_point_paper_scale() {
        let p = PrecisionPolicy::default();
        let v = purity_block(20, 10, &toric_angles(399), &p).unwrap();
        assert!((v.renyi2_f64() - 39.0).abs() < 1e-9);
    }

    #[test]
    fn star_subset_toric_point() {
        let lattice = TorusLattice::new(2).unwrap();
        let star = SubsetSpec::Star(0, 0).resolve(&lattice).unwrap();
        let comb = subset_combinatorics(&lattice, &star).unwrap();
        let v = purity_general(&comb, &toric_angles(3), &PrecisionPolicy::default()).unwrap();
        assert!((v.purity_f64() - 0.5).abs() < 1e-14);
        assert!((v.renyi2_f64() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn block_and_general_routes_agree() {
        let p = PrecisionPolicy::default();
        for (k, l) in [(3, 1), (4, 2), (6, 3), (20, 10)] {
            let comb = RegionCombinatorics::from_sigma(&block_sigma(k, l).unwrap()).unwrap();
            let eval = BlockEvaluator::new(k, l, &p).unwrap();
            for (theta, phi) in [(0.3, 0.0), (1.2, 2.5), (2.9, 4.0), (PI, 1.0)] {
                let x = eval.evaluate(&angles(theta, phi)).unwrap();
                let y = purity_general(&comb, &angles(theta, phi), &p).unwrap();
                let hp = Hp::new(&p);
                let diff = hp.sub(x.purity(), y.purity()).abs();
                let tol = hp.pow2(-(p.bits() as i64 - 16));
                assert!(diff.cmp(&tol) != Some(1), "k={k} L={l} θ={theta}");
            }
        }
    }

    #[test]
    fn phi_reflection_symmetry() {
        // 2π - φ is rounded in f64, so agreement is at input resolution.
        let eval = BlockEvaluator::new(4, 1, &PrecisionPolicy::default()).unwrap();
        for phi in [0.4, 1.7, 3.0] {
            let x = eval.evaluate(&angles(1.9, phi)).unwrap().renyi2_f64();
            let y = eval.evaluate(&angles(1.9, 2.0 * PI - phi)).unwrap().renyi2_f64();
            assert!((x - y).abs() < 1e-14, "{x} vs {y}");
        }
    }

    #[test]
    fn low_precision_policy_still_accurate_at_the_pole() {
        let p = PrecisionPolicy::new(64).unwrap();
        let v = purity_block(20, 10, &angles(PI, 0.0), &p).unwrap();
        assert!(v.renyi2_f64() > 38.0 && v.renyi2_f64() < 40.0);
    }

    #[test]
    fn sweep_is_row_major() {
        let p = PrecisionPolicy::default();
        let rows = sweep(3, 1, &[0.0, 1.0], &[0.0, 1.0, 2.0], &p).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[1].theta, rows[1].phi), (0.0, 1.0));
        assert_eq!((rows[3].theta, rows[3].phi), (1.0, 0.0));
        assert_eq!(rows[0].s2, 0.0);
        let single = sweep(20, 10, &[0.0], &[0.0], &p).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].s2, 0.0);
        assert!(sweep(3, 1, &[], &[0.0], &p).is_err());
    }

    #[test]
    fn invalid_block_is_rejected() {
        let p = PrecisionPolicy::default();
        assert!(matches!(
            purity_block(2, 1, &angles(1.0, 0.0), &p),
            Err(Error::BlockTooLarge { .. })
        ));
    }
}
