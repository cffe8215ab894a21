//! Photon-counting statistics of a laser-driven Lyman-α transition in a
//! static electric field.
//!
//! A hydrogen-like ion driven on the 2p₁/₂ → 1s₁/₂ resonance emits an
//! interrupted stream of fluorescence photons once a weak static electric
//! field couples the 2p and metastable 2s levels: long stretches of steady
//! emission (light periods) separated by macroscopic dark periods whose mean
//! duration is set by the 2s–2p₁/₂ splitting. This crate implements the
//! reduced four-level description of that process:
//!
//! - [`matkernel`] — dense complex small-matrix numerics (eigendecomposition,
//!   matrix-exponential action, polynomial roots) used as oracles everywhere,
//! - [`atom`] — the physical parameter set and the conditional generator `M`,
//! - [`nophoton`] — the no-photon probability `P₀(t)`, the waiting-time
//!   density, and deterministic inverse-CDF interval sampling,
//! - [`kato`] — closed-form period statistics (α, Re λ₂, τ_L, T_D, T_L, p, T₀)
//!   from second-order perturbation theory,
//! - [`jumps`] — renewal-process Monte Carlo and empirical period statistics,
//! - [`ratemodel`] — the emission-free-subensemble rate-equation model,
//! - [`lambshift`] — inversion of the mean dark-period duration for the
//!   2s–2p detuning via a sixth-degree polynomial.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature for embedded use. All frequencies are angular (rad/s).

#![cfg_attr(not(feature = "std"), no_std)]
// Negated comparisons (`!(t >= 0.0)`) are used on purpose: they reject NaN,
// which `t < 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod atom;
pub mod jumps;
pub mod kato;
pub mod lambshift;
pub mod matkernel;
pub mod nophoton;
pub mod ratemodel;

pub use num_complex::Complex64;
