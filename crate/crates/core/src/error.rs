//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operands live on different bases")]
    BasisMismatch,

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid quantum number: {0}")]
    InvalidQuantumNumber(String),

    #[error("state norm deviates from 1 by {0:.3e}")]
    NormDeficit(f64),

    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    TraceDeficit(f64),

    #[error("eigenvalue {value:.6e} is below the -1e-9 noise floor")]
    NegativeEigenvalue { value: f64 },

    #[error("Gram-Schmidt breakdown: residual norm {0:.3e}")]
    GramSchmidtBreakdown(f64),

    #[error("ladder norm mismatch: computed {computed:.12e}, analytic {analytic:.12e}")]
    LadderNormMismatch { computed: f64, analytic: f64 },

    #[error("multiplicity overflows u128 for N = {0}")]
    MultiplicityOverflow(u32),

    #[error("step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integration exceeded the step budget at t = {t:.6e}")]
    StepBudgetExceeded { t: f64 },

    #[error("no steady state: residual {residual:.3e} at t = {time:.3e}")]
    NonConvergence { residual: f64, time: f64 },

    #[error("N = {n} exceeds the oracle cap of {cap} particles")]
    OracleCap { n: u32, cap: u32 },

    #[error("pyramid cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
