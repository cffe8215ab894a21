//! Closed-form period statistics from second-order perturbation theory.
//!
//! With `Ω/Δ₃` and `Ω_L/Δ₄` as the two small parameters, the slow eigenvalue
//! `λ₂` of the generator acquires a small real part that sets the mean dark
//! period `T_D = (2 Re λ₂)⁻¹`, while the long-time tail of `P₀(t)` fixes the
//! dark-period probability `p = P₀(T₀)` and with it the mean light period
//! `T_L = τ_L / p`. The numeric eigensolve ([`lambda2_exact`]) is the
//! correctness oracle for every formula here.

use core::fmt;
use num_complex::Complex64;
use num_traits::Float;

use crate::atom::AtomParams;
use crate::matkernel::ComplexMatrix;
use crate::nophoton::{self, build_cache_from_matrix, SpectralCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// `delta3` or `delta4` vanishes; the perturbative formulas divide by both.
    ZeroDetuning,
    /// `omega = 0`: the dark period is infinite, the closed forms degenerate.
    DegenerateRegime,
    /// The long-time form of `P₀` requires `t ≥ 10/γ`.
    TooEarly,
    NegativeTime,
    /// Numerical failure in an underlying evaluation.
    Numeric(nophoton::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroDetuning => write!(f, "delta3 and delta4 must be nonzero"),
            Error::DegenerateRegime => write!(f, "omega = 0 makes the dark period infinite"),
            Error::TooEarly => write!(f, "long-time form requires t >= 10/gamma"),
            Error::NegativeTime => write!(f, "time must be nonnegative"),
            Error::Numeric(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

impl From<nophoton::Error> for Error {
    fn from(e: nophoton::Error) -> Self {
        match e {
            nophoton::Error::NegativeTime => Error::NegativeTime,
            other => Error::Numeric(other),
        }
    }
}

/// The closed-form period statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClosedFormPredictions {
    /// Dimensionless projector coefficient α.
    pub alpha: Complex64,
    /// Perturbative `Re λ₂`, s⁻¹.
    pub re_lambda2: f64,
    /// Zeroth-order fast eigenvalue `γ/2 − iΔ₄`, s⁻¹.
    pub lambda3_zeroth: Complex64,
    /// Mean time between photons inside a light period, s.
    pub tau_l: f64,
    /// Mean dark period `T_D = (2 Re λ₂)⁻¹`, s.
    pub t_dark: f64,
    /// Mean light period `T_L = τ_L / p`, s.
    pub t_light: f64,
    /// Dark-period probability `p = P₀(T₀)`.
    pub p_dark: f64,
    /// Threshold `T₀` separating in-period photon gaps from dark periods, s.
    pub t0: f64,
}

fn check_detunings(p: &AtomParams) -> Result<(), Error> {
    if p.delta3 == 0.0 || p.delta4 == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok(())
}

/// The complex number α entering the slow-mode projector.
pub fn alpha(p: &AtomParams) -> Result<Complex64, Error> {
    check_detunings(p)?;
    let (g, d2, d3, d4, oml) = (p.gamma, p.delta2, p.delta3, p.delta4, p.omega_l);
    let oml2 = oml * oml;
    let re = 1.0 - d3 / d4 - oml2 / (4.0 * d3 * d3) - d2 / d3
        + 3.0 * oml2 / (4.0 * d3 * d4)
        + g * g / (4.0 * d3 * d4)
        + d2 / d4
        - oml2 * d2 / (2.0 * d3 * d3 * d4);
    let im = -(g / (2.0 * d3) - g / d4
        + 3.0 * oml2 * g / (8.0 * d3 * d3 * d4)
        + g * d2 / (2.0 * d3 * d4));
    Ok(Complex64::new(re, im))
}

/// Second-order real part of the slow eigenvalue, s⁻¹.
pub fn re_lambda2(p: &AtomParams) -> Result<f64, Error> {
    let a = alpha(p)?;
    let (g, d2, d3, d4, om) = (p.gamma, p.delta2, p.delta3, p.delta4, p.omega);
    let bracket = 1.0 - 2.0 * d3 / d4 + 3.0 * d3 * d3 / (d4 * d4) - 4.0 * d2 * d3 / (d4 * d4)
        + 3.0 * g * g / (4.0 * d4 * d4)
        + 2.0 * d2 * d2 / (d4 * d4);
    Ok(om * om * g / (2.0 * d3 * d3) * bracket / a.norm_sqr())
}

/// Zeroth-order fast eigenvalue `λ₃⁽⁰⁾ ≈ γ/2 − iΔ₄`.
pub fn lambda3_zeroth(p: &AtomParams) -> Complex64 {
    Complex64::new(p.gamma / 2.0, -p.delta4)
}

/// Long-time form of `P₀(t)` (`t ≫ γ⁻¹`, enforced as `t ≥ 10/γ`):
/// `e^{−2Reλ₂ t}` times the slow-mode weight.
pub fn p0_longtime(p: &AtomParams, t: f64) -> Result<f64, Error> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime);
    }
    if t < 10.0 / p.gamma {
        return Err(Error::TooEarly);
    }
    let a = alpha(p)?;
    let rl2 = re_lambda2(p)?;
    let (g, d2, d3, d4, om, oml) = (p.gamma, p.delta2, p.delta3, p.delta4, p.omega, p.omega_l);
    let lin = 1.0 - 3.0 * d3 / d4 + 2.0 * d2 / d4;
    let bracket = lin * lin + 9.0 * g * g / (4.0 * d4 * d4);
    let weight = om * om * oml * oml / (4.0 * Float::powi(d3, 4)) * bracket / a.norm_sqr();
    Ok(Float::exp(-2.0 * rl2 * t) * weight)
}

/// The two-level conditional generator `Λ₁⁽⁰⁾` governing `P₀` at short
/// times: `[[0, iΩ_L/2], [iΩ_L/2, γ/2 − iΔ₂]]`.
pub fn two_level_generator(p: &AtomParams) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 1)] = Complex64::new(0.0, p.omega_l / 2.0);
    m[(1, 0)] = m[(0, 1)];
    m[(1, 1)] = Complex64::new(p.gamma / 2.0, -p.delta2);
    m
}

/// Short-time form of `P₀(t)`: `‖exp(−Λ₁⁽⁰⁾ t)|1⟩‖²` for the two-level
/// generator above (zeroth order in both perturbation parameters).
pub fn p0_shorttime(p: &AtomParams, t: f64) -> Result<f64, Error> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime);
    }
    let cache = build_cache_from_matrix(two_level_generator(p))?;
    Ok(cache.p0(t)?)
}

/// Mean time between photons in a light period:
/// `τ_L = (γ² + 2Ω_L² + 4Δ₂²)/(γ Ω_L²)`, s.
pub fn tau_light(p: &AtomParams) -> f64 {
    let (g, d2, oml) = (p.gamma, p.delta2, p.omega_l);
    (g * g + 2.0 * oml * oml + 4.0 * d2 * d2) / (g * oml * oml)
}

/// All closed-form predictions with the default threshold
/// `T₀ = sqrt(γ⁻¹ · T_D)` (geometric mean of the two time scales).
pub fn predictions(p: &AtomParams) -> Result<ClosedFormPredictions, Error> {
    let t_dark = t_dark(p)?;
    predictions_with_t0(p, Float::sqrt(t_dark / p.gamma))
}

/// Closed-form predictions at an explicit threshold `t0`.
///
/// `t0` must satisfy `γ⁻¹ ≪ t0 ≪ T_D` for `p = P₀(t0)` to be meaningful;
/// the `t ≥ 10/γ` gate of [`p0_longtime`] enforces the lower end. At
/// strongly compressed scale separations note that the fast modes decay at
/// rate ≈ γ/4 under strong driving, so `t0` should also sit several
/// `4/γ` lifetimes above the light-period scale.
pub fn predictions_with_t0(p: &AtomParams, t0: f64) -> Result<ClosedFormPredictions, Error> {
    let t_dark = t_dark(p)?;
    let p_dark = p0_longtime(p, t0)?;
    let tau_l = tau_light(p);
    Ok(ClosedFormPredictions {
        alpha: alpha(p)?,
        re_lambda2: re_lambda2(p)?,
        lambda3_zeroth: lambda3_zeroth(p),
        tau_l,
        t_dark,
        t_light: tau_l / p_dark,
        p_dark,
        t0,
    })
}

fn t_dark(p: &AtomParams) -> Result<f64, Error> {
    if p.omega == 0.0 {
        return Err(Error::DegenerateRegime);
    }
    let rl2 = re_lambda2(p)?;
    Ok(1.0 / (2.0 * rl2))
}

/// The numerically exact slow eigenvalue: the eigenvalue of `M` with the
/// smallest real part. Oracle for [`re_lambda2`].
pub fn lambda2_exact(cache: &SpectralCache) -> Complex64 {
    cache.eigenvalues()[0]
}
