//! Dense complex small-matrix numerics.
//!
//! Everything in this module is sized for the 2×2–6×6 generators that appear
//! in the four-level problem (plus the 8×8 companion matrices of
//! [`polyroots`]); none of it is meant for large-n work. The eigensolver
//! reduces to upper Hessenberg form and runs an explicitly shifted QR
//! iteration, which is robust at this size and keeps the crate free of
//! LAPACK bindings.

mod eig;
mod expm;
mod matrix;
mod poly;

pub use eig::{eig, eigenvalues, EigenSystem};
pub use expm::expm_action;
pub use matrix::ComplexMatrix;
pub use poly::polyroots;

use core::fmt;

/// Threshold on the eigenvector-matrix condition estimate beyond which an
/// eigendecomposition is reported as near defective. Past ~1e8 a spectral
/// evaluation of `exp(-Mt)` loses roughly eight digits; callers fall back to
/// [`expm_action`].
pub const NEAR_DEFECTIVE_CONDITION: f64 = 1e8;

/// Errors from the matrix kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatError {
    /// The eigenvector matrix is too ill-conditioned to trust (condition
    /// estimate above [`NEAR_DEFECTIVE_CONDITION`], a residual above the
    /// contract bound, or a stalled QR iteration). Spectral evaluation
    /// should fall back to [`expm_action`].
    NearDefective,
    /// An input or intermediate value overflowed or was not finite.
    NonFinite,
    /// The polynomial has no non-constant coefficients.
    DegreeZero,
}

impl fmt::Display for MatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatError::NearDefective => write!(f, "eigenvector matrix is near defective"),
            MatError::NonFinite => write!(f, "non-finite value encountered"),
            MatError::DegreeZero => write!(f, "polynomial has degree zero"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MatError {}
