//! Error type shared across the crate.

use crate::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("derivative order {requested} exceeds available order {available}")]
    DerivativeOrder { requested: u32, available: u32 },

    #[error("function is not compactly supported")]
    NotCompactlySupported,

    #[error("function must be real-valued on the real axis")]
    NotRealValued,

    #[error("composition target must vanish on a neighbourhood of the value at infinity {a0}")]
    CompositionSupport { a0: C64 },

    #[error("pole must lie off the real axis (Im zeta = {im})")]
    PoleOnRealAxis { im: f64 },

    #[error("matrix entries must be finite")]
    NonFiniteMatrix,

    #[error("matrix must be square and non-empty")]
    NotSquare,

    #[error("operator dimensions differ within the tuple")]
    DimensionMismatch,

    #[error("schur residual {residual:.3e} exceeds bound {bound:.3e}")]
    SchurResidual { residual: f64, bound: f64 },

    #[error("spectrum is not real: eigenvalue {eigenvalue} has |Im| = {im:.3e} > {tol:.3e}")]
    SpectrumNotReal { eigenvalue: C64, im: f64, tol: f64 },

    #[error("resolvent point {z} lies within {dist:.3e} of the spectrum")]
    SingularResolvent { z: C64, dist: f64 },

    #[error("resolvent residual {residual:.3e} exceeds {bound:.3e}")]
    ResolventResidual { residual: f64, bound: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("eigenvector condition number {cond:.3e} exceeds {limit:.3e}; oracle declined")]
    OracleDeclined { cond: f64, limit: f64 },

    #[error("tuple is not commuting (max commutator norm {norm:.3e})")]
    NotCommuting { norm: f64 },

    #[error("simultaneous triangularization failed after {attempts} attempts (residual {residual:.3e})")]
    JointTriangularization { attempts: u32, residual: f64 },

    #[error("quadrature did not converge: estimate {estimate:.3e} > tolerance {tol:.3e} after {nodes} nodes")]
    Convergence { estimate: f64, tol: f64, nodes: u64 },

    #[error("node budget {budget} exhausted (estimate {estimate:.3e}, tolerance {tol:.3e})")]
    BudgetExhausted { budget: u64, estimate: f64, tol: f64 },

    #[error("extension dbar decay order {decay} too low for resolvent growth exponent {growth:.2}")]
    DecayGrowthMismatch { decay: u32, growth: f64 },

    #[error("laurent tail bound {bound:.3e} exceeds tolerance {tol:.3e}; increase the truncation order")]
    LaurentTail { bound: f64, tol: f64 },

    #[error("homomorphism value Op(omega_z) is singular at z = {z}")]
    HomomorphismSingular { z: C64 },

    #[error("recovered operator depends on z: difference {diff:.3e} > {tol:.3e}")]
    ZDependence { diff: f64, tol: f64 },

    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
