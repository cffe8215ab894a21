//! Real-coefficient polynomial roots via the companion matrix, polished by
//! one Newton step.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::eig::eigenvalues;
use super::matrix::ComplexMatrix;
use super::MatError;

/// All complex roots of the real polynomial `coeffs[0] + coeffs[1] x + …`
/// (ascending powers, degree ≤ 8 intended).
///
/// Trailing zero coefficients are trimmed; [`MatError::DegreeZero`] when no
/// non-constant coefficient remains. Roots come back sorted by (Re, Im).
/// Each companion-matrix eigenvalue receives one Newton polish, which is
/// enough to push `Σ|p(root)|` below `1e-8 ‖coeffs‖₂` for well-scaled input.
pub fn polyroots(coeffs: &[f64]) -> Result<Vec<Complex64>, MatError> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(MatError::NonFinite);
    }
    let mut degree = coeffs.len();
    while degree > 0 && coeffs[degree - 1] == 0.0 {
        degree -= 1;
    }
    if degree <= 1 {
        return Err(MatError::DegreeZero);
    }
    let coeffs = &coeffs[..degree];
    let d = degree - 1;
    if d == 1 {
        return Ok(vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)]);
    }
    let lead = coeffs[d];
    let mut companion = ComplexMatrix::zeros(d);
    for i in 1..d {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        companion[(i, d - 1)] = Complex64::new(-coeffs[i] / lead, 0.0);
    }
    let mut roots = eigenvalues(&companion)?;
    for root in roots.iter_mut() {
        let (p, dp) = eval_with_derivative(coeffs, *root);
        if dp.norm() > f64::MIN_POSITIVE {
            let step = p / dp;
            if step.re.is_finite() && step.im.is_finite() {
                *root -= step;
            }
        }
    }
    roots.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                x.im.partial_cmp(&y.im)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
    Ok(roots)
}

/// Horner evaluation of `p(z)` and `p'(z)`.
pub fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}
