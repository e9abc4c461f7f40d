//! Single-point comparison of the closed forms against the brute-force oracle.

use serde::Serialize;

use crate::bloch::BlochAngles;
use crate::error::Result;
use crate::lattice::{subset_combinatorics, SubsetSpec, TorusLattice};
use crate::oracle::{
    bloch_state, enumerated_combinatorics, oracle_purity, verify_appendix_identities,
    verify_stabilized, Check,
};
use crate::precision::PrecisionPolicy;
use crate::purity::{purity_block, purity_general};

pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub k: usize,
    pub subset_size: usize,
    pub theta: f64,
    pub phi: f64,
    pub oracle_purity: f64,
    pub general_purity: f64,
    pub block_purity: Option<f64>,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn verify_point(
    k: usize,
    spec: &SubsetSpec,
    angles: &BlochAngles,
    policy: &PrecisionPolicy,
) -> Result<VerifyReport> {
    let lattice = TorusLattice::new(k)?;
    let subset = spec.resolve(&lattice)?;
    let tol = VERIFY_TOL;
    let mut checks = Vec::new();

    let derived = subset_combinatorics(&lattice, &subset)?;
    let counted = enumerated_combinatorics(k, &subset)?;
    let gap = [
        (derived.log2_g, counted.log2_g),
        (derived.log2_da, counted.log2_da),
        (derived.log2_db, counted.log2_db),
        (derived.log2_f, counted.log2_f),
    ]
    .iter()
    .map(|(a, b)| a.abs_diff(*b) as f64)
    .fold(0.0, f64::max);
    checks.push(Check::new("group_exponents", gap, 0.0));

    let state = bloch_state(k, angles)?;
    checks.push(Check::new("state_norm", (state.norm_sqr() - 1.0).abs(), tol));
    let oracle = oracle_purity(k, &subset, angles)?;
    let general = purity_general(&derived, angles, policy)?.purity_f64();
    checks.push(Check::new("general_vs_oracle", (general - oracle).abs(), tol));
    let block = match spec {
        SubsetSpec::Block(l) => {
            let b = purity_block(k, *l, angles, policy)?.purity_f64();
            checks.push(Check::new("block_vs_oracle", (b - oracle).abs(), tol));
            checks.push(Check::new("block_vs_general", (b - general).abs(), tol));
            Some(b)
        }
        _ => None,
    };

    let ground = verify_stabilized(&crate::oracle::ground_state(k)?)?;
    checks.push(Check::new("ground_stabilizers", ground.max_deviation, tol));
    checks.push(Check::new(
        "ground_energy",
        (ground.energy - ground.expected_energy).abs(),
        tol,
    ));
    for c in verify_appendix_identities(k, &subset)?.checks {
        checks.push(Check {
            check_name: format!("identity:{}", c.check_name),
            ..c
        });
    }

    Ok(VerifyReport {
        k,
        subset_size: subset.len(),
        theta: angles.theta(),
        phi: angles.phi(),
        oracle_purity: oracle,
        general_purity: general,
        block_purity: block,
        checks,
    })
}
