//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("matrix is not symmetric: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { defect: f64, tol: f64 },

    #[error("matrix is not symmetric unitary: {what} defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetricUnitary {
        what: &'static str,
        defect: f64,
        tol: f64,
    },

    #[error("matrix is not anti-Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotAntiHermitian { defect: f64, tol: f64 },

    #[error("matrices do not commute: commutator norm {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotCommuting { defect: f64, tol: f64 },

    #[error("eigensolver failed to converge: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ConvergenceFailure { residual: f64, tol: f64 },

    #[error("matrix is rank deficient: smallest singular value {sigma_min:.3e}")]
    RankDeficient { sigma_min: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tuple is not closed: product residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotClosed { residual: f64, tol: f64 },

    #[error(
        "intertwiner is not symmetric (defect {defect:.3e}) and no class has pairwise distinct angles"
    )]
    NonSymmetricIntertwiner { defect: f64 },

    #[error("pair tuple is not biclosed: residuals ({u_residual:.3e}, {v_residual:.3e}) exceed tolerance {tol:.3e}")]
    NotBiclosed {
        u_residual: f64,
        v_residual: f64,
        tol: f64,
    },

    #[error("pair tuple is not a fixed point of alpha: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotAlphaFixed { defect: f64, tol: f64 },

    #[error("finite-difference step {h:.3e} outside the supported range [{lo:.1e}, {hi:.1e}]")]
    StepOutOfRange { h: f64, lo: f64, hi: f64 },

    #[error("tangent realization failed: least-squares residual {residual:.3e} exceeds {tol:.3e}")]
    TangentRealizationFailure { residual: f64, tol: f64 },

    #[error("matrix entries must be finite")]
    NonFiniteEntries,

    #[error("unknown configuration key: {0}")]
    UnknownConfigKey(String),

    #[error("invalid value for configuration key {key}: {reason}")]
    InvalidConfigValue { key: String, reason: String },

    #[error("malformed input: {0}")]
    Malformed(String),
}
