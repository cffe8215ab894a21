//! Complex dense eigendecomposition: balance, Givens Hessenberg reduction,
//! explicitly shifted QR on the Hessenberg form, eigenvectors by triangular
//! back-substitution from the Schur factorization.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use super::matrix::ComplexMatrix;
use super::{MatError, NEAR_DEFECTIVE_CONDITION};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Residual contract of [`eig`]: `‖A v_k − λ_k v_k‖ ≤ RESIDUAL_BOUND · ‖A‖`.
pub const RESIDUAL_BOUND: f64 = 1e-10;

/// Result of [`eig`].
///
/// Eigenvalues are sorted by ascending real part, ties broken by ascending
/// imaginary part; `vectors` holds the matching unit-norm right eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: ComplexMatrix,
    /// 1-norm condition estimate of the eigenvector matrix (≥ 1).
    pub condition: f64,
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with real `c`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    /// Rotation with `G · (f, g)ᵀ = (r, 0)ᵀ`.
    fn annihilate(f: Complex64, g: Complex64) -> (Self, Complex64) {
        let af = f.norm();
        let ag = g.norm();
        if ag == 0.0 {
            return (Self { c: 1.0, s: ZERO }, f);
        }
        if af == 0.0 {
            return (
                Self {
                    c: 0.0,
                    s: g.conj() / ag,
                },
                Complex64::new(ag, 0.0),
            );
        }
        let h = af.hypot(ag);
        let c = af / h;
        let s = (f / af) * (g.conj() / h);
        let r = (f / af) * h;
        (Self { c, s }, r)
    }

    fn apply_pair_left(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (x * self.c + self.s * y, -self.s.conj() * x + y * self.c)
    }

    /// Right-multiplication by `G†` on a column pair.
    fn apply_pair_right(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (x * self.c + self.s.conj() * y, -self.s * x + y * self.c)
    }
}

/// Apply `G` to rows `(i, j)` of `m`, columns `col_lo..`.
fn rotate_rows(m: &mut ComplexMatrix, g: &Givens, i: usize, j: usize, col_lo: usize) {
    for k in col_lo..m.dim() {
        let (a, b) = g.apply_pair_left(m[(i, k)], m[(j, k)]);
        m[(i, k)] = a;
        m[(j, k)] = b;
    }
}

/// Apply `G†` to columns `(i, j)` of `m`, rows `..row_hi`.
fn rotate_cols(m: &mut ComplexMatrix, g: &Givens, i: usize, j: usize, row_hi: usize) {
    for k in 0..row_hi {
        let (a, b) = g.apply_pair_right(m[(k, i)], m[(k, j)]);
        m[(k, i)] = a;
        m[(k, j)] = b;
    }
}

/// Parlett–Reinsch balancing: returns the diagonal scale `d` (powers of two)
/// with `a ← D⁻¹ A D` applied in place.
fn balance(a: &mut ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut d = vec![1.0f64; n];
    const RADIX: f64 = 2.0;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].norm();
                    row += a[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            while col < row / RADIX {
                col *= RADIX;
                row /= RADIX;
                f *= RADIX;
            }
            while col >= row * RADIX {
                col /= RADIX;
                row *= RADIX;
                f /= RADIX;
            }
            if col + row < 0.95 * total && f != 1.0 {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            return d;
        }
    }
}

/// Reduce to upper Hessenberg via Givens similarity; accumulates the
/// transformation into `u` when provided (`a = U H U†` afterwards).
fn hessenberg(a: &mut ComplexMatrix, mut u: Option<&mut ComplexMatrix>) {
    let n = a.dim();
    for j in 0..n.saturating_sub(2) {
        for i in j + 2..n {
            if a[(i, j)] == ZERO {
                continue;
            }
            let (g, r) = Givens::annihilate(a[(j + 1, j)], a[(i, j)]);
            a[(j + 1, j)] = r;
            a[(i, j)] = ZERO;
            rotate_rows(a, &g, j + 1, i, j + 1);
            rotate_cols(a, &g, j + 1, i, n);
            if let Some(u) = u.as_deref_mut() {
                rotate_cols(u, &g, j + 1, i, n);
            }
        }
    }
}

/// Wilkinson shift from the trailing 2×2 block `[[a, b], [c, d]]`: the
/// eigenvalue of the block closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det.scale(4.0)).sqrt();
    let r1 = (tr + disc).scale(0.5);
    let r2 = (tr - disc).scale(0.5);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Shifted QR on an upper Hessenberg matrix. On success `h` is upper
/// triangular (the Schur form) and `a = U h U†` for the accumulated `u`.
fn schur_in_place(
    h: &mut ComplexMatrix,
    mut u: Option<&mut ComplexMatrix>,
) -> Result<(), MatError> {
    let n = h.dim();
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iters_at_hi = 0usize;
    loop {
        // Deflate any negligible subdiagonal.
        let mut lo = hi;
        while lo > 0 {
            let off = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let tol = eps * if local > 0.0 { local } else { scale };
            if off <= tol {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            if hi == 0 {
                return Ok(());
            }
            hi -= 1;
            iters_at_hi = 0;
            continue;
        }
        iters_at_hi += 1;
        if iters_at_hi > 40 {
            return Err(MatError::NearDefective);
        }
        let shift = if iters_at_hi.is_multiple_of(12) {
            // Exceptional shift to break rare symmetric stalls.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        // Explicit shifted QR sweep on the active block: the shift is added
        // and removed on the block diagonal only, which commutes with the
        // block-internal rotations.
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations: Vec<(usize, Givens)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (g, r) = Givens::annihilate(h[(i, i)], h[(i + 1, i)]);
            h[(i, i)] = r;
            h[(i + 1, i)] = ZERO;
            rotate_rows(h, &g, i, i + 1, i + 1);
            rotations.push((i, g));
        }
        for (i, g) in &rotations {
            rotate_cols(h, g, *i, *i + 1, n);
            if let Some(u) = u.as_deref_mut() {
                rotate_cols(u, g, *i, *i + 1, n);
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
        if !h.is_finite() {
            return Err(MatError::NonFinite);
        }
    }
}

/// Eigenvalues only (no eigenvectors, no conditioning check), sorted by
/// ascending real part, ties by ascending imaginary part.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>, MatError> {
    if !a.is_finite() {
        return Err(MatError::NonFinite);
    }
    let mut work = a.clone();
    balance(&mut work);
    hessenberg(&mut work, None);
    schur_in_place(&mut work, None)?;
    let mut vals: Vec<Complex64> = (0..a.dim()).map(|i| work[(i, i)]).collect();
    sort_complex(&mut vals);
    Ok(vals)
}

fn sort_complex(vals: &mut [Complex64]) {
    vals.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                x.im.partial_cmp(&y.im)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
}

/// Full eigendecomposition of a small dense complex matrix.
///
/// Intended for n ≤ 6 (the kernel's residual contract is only exercised
/// there). Fails with [`MatError::NearDefective`] when the eigenvector
/// matrix condition exceeds [`NEAR_DEFECTIVE_CONDITION`] or the residual
/// contract `‖A v − λ v‖ ≤ 1e-10 ‖A‖` cannot be met; callers should then
/// evaluate exponentials through [`super::expm_action`] instead.
pub fn eig(a: &ComplexMatrix) -> Result<EigenSystem, MatError> {
    if !a.is_finite() {
        return Err(MatError::NonFinite);
    }
    let n = a.dim();
    if n == 1 {
        return Ok(EigenSystem {
            eigenvalues: vec![a[(0, 0)]],
            vectors: ComplexMatrix::identity(1),
            condition: 1.0,
        });
    }
    let mut t = a.clone();
    let d = balance(&mut t);
    let mut u = ComplexMatrix::identity(n);
    hessenberg(&mut t, Some(&mut u));
    schur_in_place(&mut t, Some(&mut u))?;

    let lambdas: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;

    // Right eigenvectors of the triangular factor by back-substitution,
    // rotated back through U and the balancing diagonal.
    let mut vectors = ComplexMatrix::zeros(n);
    for k in 0..n {
        let mut y = vec![ZERO; n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - t[(k, k)];
            if den.norm() < small {
                // Clustered eigenvalue: perturb the pivot; the conditioning
                // check below decides whether the result is usable.
                den = Complex64::new(small, 0.0);
            }
            y[i] = -s / den;
        }
        let mut v = u.mul_vec(&y);
        for (vi, di) in v.iter_mut().zip(d.iter()) {
            *vi *= *di;
        }
        let norm = Float::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(MatError::NearDefective);
        }
        for (col, vi) in v.iter().enumerate() {
            vectors[(col, k)] = vi / norm;
        }
    }

    // Sort by (Re, Im) and reorder the columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        lambdas[x]
            .re
            .partial_cmp(&lambdas[y].re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(
                lambdas[x]
                    .im
                    .partial_cmp(&lambdas[y].im)
                    .unwrap_or(core::cmp::Ordering::Equal),
            )
    });
    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| lambdas[k]).collect();
    let mut sorted = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for row in 0..n {
            sorted[(row, dst)] = vectors[(row, src)];
        }
    }

    let condition = sorted.condition_one_norm();
    if !condition.is_finite() || condition > NEAR_DEFECTIVE_CONDITION {
        return Err(MatError::NearDefective);
    }
    let anorm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for (k, lambda) in eigenvalues.iter().enumerate() {
        let mut resid = 0.0f64;
        let col: Vec<Complex64> = (0..n).map(|row| sorted[(row, k)]).collect();
        let av = a.mul_vec(&col);
        for (avi, vi) in av.iter().zip(col.iter()) {
            resid += (avi - lambda * vi).norm_sqr();
        }
        if Float::sqrt(resid) > RESIDUAL_BOUND * anorm {
            return Err(MatError::NearDefective);
        }
    }
    Ok(EigenSystem {
        eigenvalues,
        vectors: sorted,
        condition,
    })
}
