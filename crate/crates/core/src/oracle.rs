//! Brute-force ground truth on small tori.
//!
//! The star group, the ground state and every point of the sphere are built
//! explicitly over the `2k²` spins, and reduced density matrices are formed by
//! direct partial trace. Nothing here uses the closed forms; it is the
//! reference the closed forms are checked against.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::bloch::BlochAngles;
use crate::error::{Error, Result};
use crate::lattice::{subset_combinatorics, Link, RegionCombinatorics, TorusLattice};

/// Largest torus for which the full group is enumerated (2^15 elements).
pub const MAX_GROUP_K: usize = 4;
/// Largest torus for which states are built and traced.
pub const MAX_STATE_K: usize = 3;
/// Largest region for a dense reduced density matrix.
pub const MAX_SUBSET_LINKS: usize = 12;

/// σ_x string over the links, bit `i` = link index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliXMask(pub u64);

/// σ_z string over the links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliZMask(pub u64);

impl PauliXMask {
    pub fn weight(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn compose(&self, other: &PauliXMask) -> PauliXMask {
        PauliXMask(self.0 ^ other.0)
    }
}

impl PauliZMask {
    pub fn weight(&self) -> u32 {
        self.0.count_ones()
    }
}

fn lattice_for_masks(k: usize) -> Result<TorusLattice> {
    let lattice = TorusLattice::new(k)?;
    if lattice.n_links() > 64 {
        return Err(Error::ScaleTooLarge {
            what: "links for 64-bit Pauli masks",
            value: lattice.n_links(),
            limit: 64,
        });
    }
    Ok(lattice)
}

fn links_to_bits(lattice: &TorusLattice, links: &[Link]) -> u64 {
    links
        .iter()
        .fold(0u64, |m, l| m | 1 << l.index(lattice.k()))
}

fn subset_bits(lattice: &TorusLattice, subset: &BTreeSet<Link>) -> Result<u64> {
    if let Some(l) = subset.iter().find(|l| !lattice.contains(l)) {
        return Err(Error::InvalidInput(format!(
            "link {l} lies outside the {0}x{0} torus",
            lattice.k()
        )));
    }
    Ok(subset.iter().fold(0u64, |m, l| m | 1 << l.index(lattice.k())))
}

/// A_s for every vertex, row-major.
pub fn star_masks(k: usize) -> Result<Vec<PauliXMask>> {
    let lattice = lattice_for_masks(k)?;
    Ok((0..lattice.n_stars())
        .map(|s| {
            let (x, y) = lattice.vertex(s);
            PauliXMask(links_to_bits(&lattice, &lattice.star_links(x, y)))
        })
        .collect())
}

/// B_p for every face, row-major by lower-left corner.
pub fn plaquette_masks(k: usize) -> Result<Vec<PauliZMask>> {
    let lattice = lattice_for_masks(k)?;
    Ok((0..lattice.n_stars())
        .map(|p| {
            let (x, y) = lattice.vertex(p);
            PauliZMask(links_to_bits(&lattice, &lattice.plaquette_links(x, y)))
        })
        .collect())
}

/// Every element of G, the span of all stars but the last, in Gray-code order
/// starting from the identity.
pub fn build_group(k: usize) -> Result<Vec<PauliXMask>> {
    if k > MAX_GROUP_K {
        return Err(Error::ScaleTooLarge {
            what: "k for explicit group enumeration",
            value: k,
            limit: MAX_GROUP_K,
        });
    }
    let stars = star_masks(k)?;
    let generators = &stars[..stars.len() - 1];
    let size = 1usize << generators.len();
    let mut out = Vec::with_capacity(size);
    let mut current = PauliXMask(0);
    out.push(current);
    for i in 1..size {
        current = current.compose(&generators[i.trailing_zeros() as usize]);
        out.push(current);
    }
    Ok(out)
}

/// Sparse amplitudes keyed by the computational-basis bitstring of the links.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseStateVector {
    k: usize,
    entries: BTreeMap<u64, Complex64>,
}

impl SparseStateVector {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_links(&self) -> usize {
        2 * self.k * self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<u64, Complex64> {
        &self.entries
    }

    pub fn amplitude(&self, basis: u64) -> Complex64 {
        self.entries.get(&basis).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &SparseStateVector) -> Complex64 {
        self.entries
            .iter()
            .map(|(b, a)| a.conj() * other.amplitude(*b))
            .sum()
    }

    pub fn apply_x(&self, mask: PauliXMask) -> SparseStateVector {
        SparseStateVector {
            k: self.k,
            entries: self.entries.iter().map(|(b, a)| (b ^ mask.0, *a)).collect(),
        }
    }

    pub fn apply_z(&self, mask: PauliZMask) -> SparseStateVector {
        SparseStateVector {
            k: self.k,
            entries: self
                .entries
                .iter()
                .map(|(b, a)| {
                    let sign = if (b & mask.0).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    (*b, a * sign)
                })
                .collect(),
        }
    }

    /// Largest componentwise |difference|.
    pub fn max_deviation(&self, other: &SparseStateVector) -> f64 {
        let keys: BTreeSet<u64> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        keys.into_iter()
            .map(|b| (self.amplitude(b) - other.amplitude(b)).norm())
            .fold(0.0, f64::max)
    }
}

fn check_state_k(k: usize) -> Result<()> {
    if k > MAX_STATE_K {
        return Err(Error::ScaleTooLarge {
            what: "k for explicit states",
            value: k,
            limit: MAX_STATE_K,
        });
    }
    Ok(())
}

/// |Ψ₀⟩ = |G|^{-1/2} Σ_g g|0…0⟩.
pub fn ground_state(k: usize) -> Result<SparseStateVector> {
    check_state_k(k)?;
    let group = build_group(k)?;
    let amp = Complex64::new(1.0 / (group.len() as f64).sqrt(), 0.0);
    Ok(SparseStateVector {
        k,
        entries: group.iter().map(|g| (g.0, amp)).collect(),
    })
}

/// cos(θ/2)|0̄⟩ + e^{iφ} sin(θ/2)|1̄⟩ written out over the support of G.
pub fn bloch_state(k: usize, angles: &BlochAngles) -> Result<SparseStateVector> {
    check_state_k(k)?;
    let group = build_group(k)?;
    let half = angles.theta() / 2.0;
    let rest = Complex64::from_polar(half.sin() / ((group.len() - 1) as f64).sqrt(), angles.phi());
    let mut entries = BTreeMap::new();
    for g in &group {
        let amp = if g.0 == 0 {
            Complex64::new(half.cos(), 0.0)
        } else {
            rest
        };
        if amp != Complex64::new(0.0, 0.0) {
            entries.insert(g.0, amp);
        }
    }
    Ok(SparseStateVector { k, entries })
}

/// Dense ρ_A, rows indexed by the bits of A in increasing link order.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    pub links: Vec<Link>,
    pub matrix: DMatrix<Complex64>,
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = &self.matrix - self.matrix.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

/// Packs the bits of `basis` selected by `positions` into a dense index.
fn gather(basis: u64, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &p)| acc | (((basis >> p) & 1) as usize) << i)
}

/// ρ_A = tr_B |ψ⟩⟨ψ|, grouping support strings by their restriction to B.
pub fn reduced_density(state: &SparseStateVector, subset: &BTreeSet<Link>) -> Result<ReducedDensity> {
    if subset.len() > MAX_SUBSET_LINKS {
        return Err(Error::SubsetTooLarge {
            size: subset.len(),
            limit: MAX_SUBSET_LINKS,
        });
    }
    let lattice = TorusLattice::new(state.k)?;
    let a_bits = subset_bits(&lattice, subset)?;
    let positions: Vec<usize> = subset.iter().map(|l| l.index(state.k)).collect();
    let dim = 1usize << subset.len();

    let mut by_b: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
    for (&basis, &amp) in &state.entries {
        by_b.entry(basis & !a_bits)
            .or_default()
            .push((gather(basis, &positions), amp));
    }
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for group in by_b.values() {
        for &(i, ai) in group {
            for &(j, aj) in group {
                matrix[(i, j)] += ai * aj.conj();
            }
        }
    }
    Ok(ReducedDensity {
        links: subset.iter().copied().collect(),
        matrix,
    })
}

/// tr(ρ_A²) by explicit construction and partial trace.
pub fn oracle_purity(k: usize, subset: &BTreeSet<Link>, angles: &BlochAngles) -> Result<f64> {
    let state = bloch_state(k, angles)?;
    Ok(reduced_density(&state, subset)?.purity())
}

/// Group exponents counted by enumerating G.
pub fn enumerated_combinatorics(k: usize, subset: &BTreeSet<Link>) -> Result<RegionCombinatorics> {
    let lattice = lattice_for_masks(k)?;
    let a_bits = subset_bits(&lattice, subset)?;
    let n = lattice.n_links();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let b_bits = all & !a_bits;
    let group = build_group(k)?;
    let d_a = group.iter().filter(|g| g.0 & b_bits == 0).count();
    let d_b = group.iter().filter(|g| g.0 & a_bits == 0).count();
    let log2 = |n: usize| n.trailing_zeros() as u64;
    Ok(RegionCombinatorics {
        log2_g: log2(group.len()),
        log2_da: log2(d_a),
        log2_db: log2(d_b),
        log2_f: log2(group.len() / d_b),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundReport {
    pub k: usize,
    /// max over s, p and components of |A_s ψ - ψ| and |B_p ψ - ψ|.
    pub max_deviation: f64,
    pub energy: f64,
    pub expected_energy: f64,
}

impl GroundReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation <= tol && (self.energy - self.expected_energy).abs() <= tol
    }
}

pub fn star_expectation(state: &SparseStateVector, star: PauliXMask) -> f64 {
    state.inner(&state.apply_x(star)).re
}

pub fn plaquette_expectation(state: &SparseStateVector, plaquette: PauliZMask) -> f64 {
    state.inner(&state.apply_z(plaquette)).re
}

/// Checks that |Ψ₀⟩ is stabilized by every A_s and B_p, i.e. has energy -2k².
pub fn verify_ground(k: usize) -> Result<GroundReport> {
    verify_stabilized(&ground_state(k)?)
}

/// Stabilizer deviations and energy of an arbitrary explicit state.
pub fn verify_stabilized(state: &SparseStateVector) -> Result<GroundReport> {
    let k = state.k;
    let stars = star_masks(k)?;
    let plaquettes = plaquette_masks(k)?;
    let mut max_deviation: f64 = 0.0;
    let mut energy = 0.0;
    for s in &stars {
        max_deviation = max_deviation.max(state.apply_x(*s).max_deviation(state));
        energy -= star_expectation(state, *s);
    }
    for p in &plaquettes {
        max_deviation = max_deviation.max(state.apply_z(*p).max_deviation(state));
        energy -= plaquette_expectation(state, *p);
    }
    Ok(GroundReport {
        k,
        max_deviation,
        energy,
        expected_energy: -2.0 * (k * k) as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check_name: String,
    pub deviation: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, deviation: f64, tol: f64) -> Self {
        Self {
            check_name: name.into(),
            deviation,
            pass: deviation <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub k: usize,
    pub subset_size: usize,
    /// |G_A| = d_A
    pub group_a_size: usize,
    pub f: f64,
    pub projector_trace: f64,
    pub checks: Vec<Check>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Tolerance of the dense-algebra identity checks.
pub const IDENTITY_TOL: f64 = 1e-10;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Verifies the algebra of ρ_A⁰, |0_A⟩ and |φ_A⟩ = Σ_{g∈G_A} g_A|0_A⟩ that
/// the closed forms rest on, including the projector structure of
/// P_A = (f/d_A) ρ_A⁰.
pub fn verify_appendix_identities(k: usize, subset: &BTreeSet<Link>) -> Result<IdentityReport> {
    let lattice = TorusLattice::new(k)?;
    let rho = reduced_density(&ground_state(k)?, subset)?;
    let dim = rho.dim();
    let a_bits = subset_bits(&lattice, subset)?;
    let positions: Vec<usize> = subset.iter().map(|l| l.index(k)).collect();

    let group = build_group(k)?;
    let group_a: HashSet<u64> = group.iter().filter(|g| g.0 & !a_bits == 0).map(|g| g.0).collect();
    let d_b = group.iter().filter(|g| g.0 & a_bits == 0).count();
    let d_a = group_a.len();
    let f = group.len() as f64 / d_b as f64;
    let ratio = d_a as f64 / f;

    let zero = DVector::<Complex64>::from_fn(dim, |i, _| if i == 0 { 1.0.into() } else { 0.0.into() });
    let mut phi = DVector::<Complex64>::zeros(dim);
    for g in &group_a {
        phi[gather(*g, &positions)] += Complex64::new(1.0, 0.0);
    }
    let m = &rho.matrix;
    let tol = IDENTITY_TOL;
    let mut checks = Vec::new();

    checks.push(Check::new("hermitian", rho.hermiticity_error(), tol));
    checks.push(Check::new("phi_norm", (phi.dotc(&phi).re - d_a as f64).abs(), tol));
    checks.push(Check::new("phi_zero_overlap", (phi.dotc(&zero) - Complex64::new(1.0, 0.0)).norm(), tol));
    checks.push(Check::new("rho0_square", max_abs(&(m * m - m * Complex64::new(ratio, 0.0))), tol));
    checks.push(Check::new("rho0_trace", (rho.trace() - Complex64::new(1.0, 0.0)).norm(), tol));
    checks.push(Check::new("rho0_zero_zero", (zero.dotc(&(m * &zero)).re - 1.0 / f).abs(), tol));
    checks.push(Check::new(
        "rho0_zero_phi",
        (zero.dotc(&(m * &phi)) - Complex64::new(d_a as f64 / f, 0.0)).norm(),
        tol,
    ));
    let applied = m * &zero - &phi * Complex64::new(1.0 / f, 0.0);
    checks.push(Check::new("rho0_on_zero", applied.iter().map(|z| z.norm()).fold(0.0, f64::max), tol));

    let projector = m * Complex64::new(1.0 / ratio, 0.0);
    checks.push(Check::new("projector_idempotent", max_abs(&(&projector * &projector - &projector)), tol));
    let projector_trace = projector.trace().re;
    checks.push(Check::new("projector_trace", (projector_trace - f / d_a as f64).abs(), tol));

    // Spectrum: f/d_A eigenvalues equal to d_A/f, the rest zero.
    let rank = (f / d_a as f64).round() as usize;
    let ev = rho.eigenvalues();
    let spectrum_dev = ev
        .iter()
        .rev()
        .enumerate()
        .map(|(i, &e)| if i < rank { (e - ratio).abs() } else { e.abs() })
        .fold(0.0, f64::max);
    checks.push(Check::new("eigen_spectrum", spectrum_dev, tol));
    checks.push(Check::new("positive_semidefinite", (-ev.first().copied().unwrap_or(0.0)).max(0.0), tol));

    let gf2 = subset_combinatorics(&lattice, subset)?;
    let enumerated = enumerated_combinatorics(k, subset)?;
    checks.push(Check::new("gf2_exponents", if gf2 == enumerated { 0.0 } else { 1.0 }, 0.0));

    Ok(IdentityReport {
        k,
        subset_size: subset.len(),
        group_a_size: d_a,
        f,
        projector_trace,
        checks,
    })
}
