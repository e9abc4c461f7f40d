use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("block of side {l} does not fit the {k}x{k} torus (need k >= L + 2 and k^2 - L^2 - 4L >= 0)")]
    BlockTooLarge { k: usize, l: usize },

    #[error("{what} = {value} exceeds the supported limit {limit}")]
    ScaleTooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("only {surviving:.1} significant bits survive cancellation at {bits}-bit precision")]
    PrecisionTooLow { bits: usize, surviving: f64 },

    #[error("imaginary residue {residue:e} in the assembled purity exceeds tolerance")]
    NonRealResidue { residue: f64 },

    #[error("fit needs at least {needed} L values, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("state does not lie in the real X-Z plane (relative phase {phase:.3e} rad)")]
    NotInPlane { phase: f64 },

    #[error("subset of {size} links exceeds the dense reduced-density limit of {limit}")]
    SubsetTooLarge { size: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the floating stage rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::PrecisionTooLow { .. } | Error::NonRealResidue { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
