//! Row-major dense complex matrix with the handful of operations the
//! kernel needs.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
use num_complex::Complex64;

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Panics if `data.len() != n * n` or `n == 0`.
    pub fn new(n: usize, data: Vec<Complex64>) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        assert_eq!(data.len(), n * n, "row-major data must have n*n entries");
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(n, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.n {
            let mut s = 0.0;
            for i in 0..self.n {
                s += self[(i, j)].norm();
            }
            worst = worst.max(s);
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        num_traits::Float::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.n, self.data.iter().map(|z| z * factor).collect())
    }

    pub fn mul_mat(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Solve `self * x = b` by LU with partial pivoting. `None` when a pivot
    /// vanishes exactly.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        Lu::factor(self).map(|lu| lu.solve(b))
    }

    /// 1-norm condition estimate via the explicit inverse; `f64::INFINITY`
    /// when singular. Exact enough at kernel sizes.
    pub fn condition_one_norm(&self) -> f64 {
        let lu = match Lu::factor(self) {
            Some(lu) => lu,
            None => return f64::INFINITY,
        };
        let n = self.n;
        let mut inv_norm = 0.0f64;
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            let col = lu.solve(&e);
            e[j] = Complex64::new(0.0, 0.0);
            let s: f64 = col.iter().map(|z| z.norm()).sum();
            inv_norm = inv_norm.max(s);
        }
        self.one_norm() * inv_norm
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting.
struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
}

impl Lu {
    fn factor(a: &ComplexMatrix) -> Option<Self> {
        let n = a.dim();
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_mag = lu[k * n + k].norm();
            for i in k + 1..n {
                let mag = lu[i * n + k].norm();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag == 0.0 {
                return None;
            }
            if best != k {
                for j in 0..n {
                    lu.swap(k * n + j, best * n + j);
                }
                piv.swap(k, best);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        Some(Self { n, lu, piv })
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_round_trip() {
        let a = ComplexMatrix::new(
            3,
            vec![
                c(2.0, 1.0),
                c(0.0, -1.0),
                c(3.0, 0.0),
                c(1.0, 0.0),
                c(4.0, 0.5),
                c(0.0, 0.0),
                c(0.0, 2.0),
                c(1.0, 1.0),
                c(5.0, -2.0),
            ],
        );
        let x = [c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.25)];
        let b = a.mul_vec(&x);
        let got = a.solve(&b).unwrap();
        for (g, want) in got.iter().zip(x.iter()) {
            assert!((g - want).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_has_infinite_condition() {
        let a = ComplexMatrix::new(2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(a.condition_one_norm().is_infinite());
        assert!(a.solve(&[c(1.0, 0.0), c(0.0, 0.0)]).is_none());
    }

    #[test]
    fn identity_condition_is_one() {
        let id = ComplexMatrix::identity(4);
        assert!((id.condition_one_norm() - 1.0).abs() < 1e-14);
    }
}
