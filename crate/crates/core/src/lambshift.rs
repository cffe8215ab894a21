//! Recover the 2s–2p₁/₂ detuning `Δ₃` from a measured mean dark period.
//!
//! Solving `T_D(Δ₃) = t_d` with the closed form
//! `T_D = Δ₃² |α(Δ₃)|² / (Ω² γ B(Δ₃))` leads to a real polynomial equation
//! of sixth degree in `Δ₃`: with `c(x) = x² α(x)` a complex cubic with real
//! coefficient parts, the equation is
//!
//! ```text
//! P(x) = |c(x)|² − t_d Ω² γ x² B(x) = 0
//! ```
//!
//! where `B` is the quadratic bracket of the `Re λ₂` formula. Since ħ|Δ₃| is
//! essentially the Lamb shift when the laser sits on the 2p₁/₂ resonance,
//! a dark-period measurement plus this inversion is a Lamb-shift detection.
//!
//! The equation may have several genuine real solutions (the forward map is
//! not injective), so all admissible candidates are reported and branch
//! selection is left to the experimenter.

use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::atom::AtomParams;
use crate::kato;
use crate::matkernel::{polyroots, MatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// `omega = 0`: `T_D` does not depend on `Δ₃` at all.
    ZeroOmega,
    /// No real root survives the window and forward-residual filters
    /// (also the outcome for unphysical `t_d ≤ 0`).
    NoAdmissibleRoot,
    /// Root finding failed in the kernel.
    Mat(MatError),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroOmega => write!(f, "omega must be nonzero to invert T_D"),
            Error::NoAdmissibleRoot => write!(f, "no admissible delta3 root found"),
            Error::Mat(e) => write!(f, "root finding failed: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

impl From<MatError> for Error {
    fn from(e: MatError) -> Self {
        Error::Mat(e)
    }
}

/// Everything `T_D(Δ₃)` depends on except `Δ₃` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InversionKnowns {
    pub gamma: f64,
    pub delta2: f64,
    pub delta4: f64,
    pub omega: f64,
    pub omega_l: f64,
}

impl From<&AtomParams> for InversionKnowns {
    fn from(p: &AtomParams) -> Self {
        Self {
            gamma: p.gamma,
            delta2: p.delta2,
            delta4: p.delta4,
            omega: p.omega,
            omega_l: p.omega_l,
        }
    }
}

impl InversionKnowns {
    fn params_with_delta3(&self, delta3: f64) -> AtomParams {
        AtomParams {
            gamma: self.gamma,
            delta2: self.delta2,
            delta3,
            delta4: self.delta4,
            omega: self.omega,
            omega_l: self.omega_l,
        }
    }
}

/// The sixth-degree polynomial whose roots are the `Δ₃` with
/// `T_D(Δ₃) = t_d`.
///
/// Coefficients are kept in the dimensionless variable `x̃ = Δ₃/γ` (which
/// keeps them within a few orders of magnitude of unity even for SI-scale
/// input); [`TdPolynomial::eval`] and [`TdPolynomial::roots`] convert at the
/// boundary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TdPolynomial {
    /// Ascending coefficients in `x̃ = Δ₃/γ`; degree 6, leading coefficient
    /// `= (γ/Δ₄)²`, nonzero.
    pub coeffs: [f64; 7],
    pub gamma: f64,
}

impl TdPolynomial {
    /// Evaluate at a physical `Δ₃` (rad/s).
    pub fn eval(&self, delta3: f64) -> f64 {
        let x = delta3 / self.gamma;
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// All complex roots, converted back to rad/s.
    pub fn roots(&self) -> Result<Vec<num_complex::Complex64>, Error> {
        let roots = polyroots(&self.coeffs)?;
        Ok(roots.into_iter().map(|r| r * self.gamma).collect())
    }
}

fn convolve<const N: usize>(a: &[f64], b: &[f64]) -> [f64; N] {
    let mut out = [0.0; N];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Assemble the inversion polynomial for a measured mean dark period `t_d`
/// (seconds).
pub fn td_polynomial(td: f64, knowns: &InversionKnowns) -> Result<TdPolynomial, Error> {
    if knowns.omega == 0.0 {
        return Err(Error::ZeroOmega);
    }
    let g = knowns.gamma;
    // Work in units of gamma.
    let d2 = knowns.delta2 / g;
    let d4 = knowns.delta4 / g;
    let om = knowns.omega / g;
    let oml = knowns.omega_l / g;
    let td = td * g;
    let oml2 = oml * oml;

    // c(x) = x² α(x): real and imaginary parts are cubics in x.
    let cr = [
        -oml2 / 4.0 - oml2 * d2 / (2.0 * d4),
        -d2 + 3.0 * oml2 / (4.0 * d4) + 1.0 / (4.0 * d4),
        1.0 + d2 / d4,
        -1.0 / d4,
    ];
    let ci = [
        -3.0 * oml2 / (8.0 * d4),
        -0.5 * (1.0 + d2 / d4),
        1.0 / d4,
        0.0,
    ];
    // N(x) = |c(x)|², degree 6.
    let mut n: [f64; 7] = convolve::<7>(&cr, &cr);
    let ci_sq = convolve::<7>(&ci, &ci);
    for (ni, ci2) in n.iter_mut().zip(ci_sq.iter()) {
        *ni += ci2;
    }
    // x² B(x), degree 4, with B the Re λ₂ bracket.
    let b = [
        1.0 + 3.0 / (4.0 * d4 * d4) + 2.0 * d2 * d2 / (d4 * d4),
        -2.0 / d4 - 4.0 * d2 / (d4 * d4),
        3.0 / (d4 * d4),
    ];
    let scale = td * om * om;
    let mut coeffs = n;
    for (i, &bi) in b.iter().enumerate() {
        coeffs[i + 2] -= scale * bi;
    }
    Ok(TdPolynomial { coeffs, gamma: g })
}

/// A real root of the inversion polynomial that passes the forward check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Candidate {
    /// Candidate `Δ₃`, rad/s.
    pub delta3: f64,
    /// `|T_D(Δ₃) − t_d| / t_d` recomputed through the forward formula.
    pub forward_residual: f64,
    /// Whether the root lies in the physically admissible window
    /// `|Ω_L| < |Δ₃| < |Δ₄|`.
    pub admissible: bool,
}

/// Outcome of [`invert_td`]: every real root with forward residual ≤ 1e-6,
/// flagged by window admissibility. No silent branch selection.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InversionResult {
    pub candidates: Vec<Candidate>,
}

impl InversionResult {
    /// The admissible `Δ₃` values, rad/s.
    pub fn admissible(&self) -> Vec<f64> {
        self.candidates
            .iter()
            .filter(|c| c.admissible)
            .map(|c| c.delta3)
            .collect()
    }
}

const FORWARD_RESIDUAL_TOL: f64 = 1e-6;

/// Solve `T_D(Δ₃) = t_d` for `Δ₃`.
///
/// Roots of [`td_polynomial`] are kept when `|Im| ≤ 1e-6 |root|` and the
/// forward-recomputed `T_D` agrees with `t_d` to 1e-6 relative; the window
/// `|Ω_L| < |Δ₃| < |Δ₄|` sets the admissibility flag. All admissible
/// candidates are returned.
pub fn invert_td(td: f64, knowns: &InversionKnowns) -> Result<InversionResult, Error> {
    let poly = td_polynomial(td, knowns)?;
    let mut candidates = Vec::new();
    for root in poly.roots()? {
        if root.im.abs() > 1e-6 * root.norm() {
            continue;
        }
        let delta3 = root.re;
        if delta3 == 0.0 || Float::abs(delta3) >= Float::abs(knowns.delta4) {
            continue;
        }
        let params = knowns.params_with_delta3(delta3);
        let forward = match kato::re_lambda2(&params) {
            Ok(rl2) if rl2 > 0.0 => 1.0 / (2.0 * rl2),
            _ => continue,
        };
        let residual = Float::abs(forward - td) / td;
        if !(residual <= FORWARD_RESIDUAL_TOL) {
            continue;
        }
        let admissible = Float::abs(delta3) > Float::abs(knowns.omega_l);
        candidates.push(Candidate {
            delta3,
            forward_residual: residual,
            admissible,
        });
    }
    candidates.sort_by(|a, b| a.delta3.partial_cmp(&b.delta3).unwrap());
    if candidates.iter().any(|c| c.admissible) {
        Ok(InversionResult { candidates })
    } else {
        Err(Error::NoAdmissibleRoot)
    }
}
