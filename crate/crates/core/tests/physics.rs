//! Cross-module consistency: the perturbative closed forms against the
//! numeric eigensolve, and the spectral evolution against the
//! matrix-exponential oracle, over randomized in-regime parameter sweeps.

use lyjump_core::atom::{dressed_hc3, generator, AtomParams};
use lyjump_core::kato;
use lyjump_core::matkernel::{eigenvalues, expm_action, ComplexMatrix};
use lyjump_core::nophoton::build_cache;
use lyjump_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random parameters comfortably inside the perturbative regime flags
/// (`|Ω| ≤ 0.2|Ω_L|`, `|Ω_L| < |Δ₃|`), γ = 1.
fn random_in_regime(rng: &mut ChaCha8Rng) -> AtomParams {
    let delta3: f64 = -rng.gen_range(9.0..30.0);
    let delta4 = delta3 * rng.gen_range(5.0..16.0);
    let omega_l = rng.gen_range(0.1..0.4) * delta3.abs();
    let omega = rng.gen_range(0.02..0.12) * omega_l;
    let delta2 = rng.gen_range(-0.25..0.25);
    AtomParams::new(1.0, delta2, delta3, delta4, omega, omega_l).unwrap()
}

#[test]
fn perturbative_re_lambda2_tracks_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4A70);
    for _ in 0..100 {
        let p = random_in_regime(&mut rng);
        assert!(p.in_perturbative_regime());
        let cache = build_cache(&p).unwrap();
        // No-photon probability cannot grow: every decay rate nonnegative.
        for lambda in cache.eigenvalues() {
            assert!(lambda.re >= -1e-12 * p.gamma, "negative decay rate {lambda}");
        }
        let exact = kato::lambda2_exact(&cache).re;
        let formula = kato::re_lambda2(&p).unwrap();
        let rel = ((formula - exact) / formula).abs();
        let bound = 3.0 * (p.omega / p.delta3).powi(2) + 3.0 * (p.omega_l / p.delta4).powi(2);
        assert!(
            rel <= bound,
            "rel dev {rel:.3e} > bound {bound:.3e} at {p:?}"
        );
    }
}

#[test]
fn spectral_p0_matches_expm_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE16);
    let e1 = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    for _ in 0..100 {
        let p = random_in_regime(&mut rng);
        let cache = build_cache(&p).unwrap();
        let t = rng.gen_range(0.0..60.0);
        let psi = expm_action(&generator(&p), &e1, t).unwrap();
        let oracle: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let spectral = cache.p0(t).unwrap();
        assert!(
            (spectral - oracle).abs() <= 1e-8,
            "t={t}: spectral {spectral} vs expm {oracle}"
        );
    }
}

#[test]
fn dressed_basis_matches_truncated_generator_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD2E5);
    for _ in 0..100 {
        let p = random_in_regime(&mut rng);
        let full = generator(&p);
        let mut trunc = ComplexMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                trunc[(i, j)] = full[(i, j)];
            }
        }
        let a = eigenvalues(&dressed_hc3(&p)).unwrap();
        let b = eigenvalues(&trunc).unwrap();
        let scale = 1.0 + trunc.frobenius_norm();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!(
                (x - y).norm() <= 1e-10 * scale,
                "dressed {x} vs truncated {y} (scale {scale})"
            );
        }
    }
}

#[test]
fn sampled_mean_interval_matches_survival_integral() {
    // The mean interval is ∫₀^∞ P₀ dt; trapezoid quadrature over the
    // spectral form plus the analytic slow tail is the oracle.
    let p = AtomParams::desk_scale();
    let cache = build_cache(&p).unwrap();
    let slow = cache.eigenvalues()[0].re;
    let t_cut = 8.0 / (2.0 * slow);
    let n_grid = 400_000;
    let mut integral = 0.0;
    let mut prev = cache.p0(0.0).unwrap();
    for i in 1..=n_grid {
        let t = t_cut * i as f64 / n_grid as f64;
        let cur = cache.p0(t).unwrap();
        integral += 0.5 * (prev + cur) * (t_cut / n_grid as f64);
        prev = cur;
    }
    // Beyond t_cut only the slow mode survives.
    let slow_weight: f64 = cache.modes().unwrap()[0].iter().map(|z| z.norm_sqr()).sum();
    integral += slow_weight * (-2.0 * slow * t_cut).exp() / (2.0 * slow);

    let traj = lyjump_core::jumps::simulate(&cache, 300_000, 0xFEED).unwrap();
    let mean = traj.duration() / traj.intervals().len() as f64;
    assert!(
        ((mean - integral) / integral).abs() < 0.01,
        "MC mean {mean} vs quadrature {integral}"
    );
}
