//! Dense complex matrices with just the operations the precoding and
//! Monte Carlo layers need: products, Frobenius norms, and a Cholesky-based
//! solver for Hermitian positive-definite systems.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Result};

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Squared Euclidean norm of column `c`.
    pub fn col_norm_sq(&self, c: usize) -> f64 {
        (0..self.rows).map(|r| self[(r, c)].norm_sqr()).sum()
    }

    /// Scales column `c` in place.
    pub fn scale_col(&mut self, c: usize, factor: f64) {
        for r in 0..self.rows {
            self[(r, c)] *= factor;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry magnitude of `self - I`; panics unless square.
    pub fn max_dev_from_identity(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let target = if r == c { Complex64::ONE } else { Complex64::ZERO };
                let dev = (self[(r, c)] - target).norm();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    /// Cholesky factorization of a Hermitian positive-definite matrix,
    /// A = L L^H with L lower triangular. Fails with `SingularChannel` when a
    /// pivot is not strictly positive or the estimated condition number
    /// exceeds `cond_limit` (ratio of extreme Cholesky pivots squared).
    pub fn cholesky(&self, cond_limit: f64) -> Result<CholeskyFactor> {
        assert_eq!(self.rows, self.cols, "Cholesky needs a square matrix");
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut diag = self[(j, j)].re;
            for k in 0..j {
                diag -= l[(j, k)].norm_sqr();
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(Error::SingularChannel);
            }
            let d = libm::sqrt(diag);
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        let mut dmin = f64::INFINITY;
        let mut dmax = 0.0f64;
        for i in 0..n {
            let d = l[(i, i)].re;
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        let cond_estimate = (dmax / dmin) * (dmax / dmin);
        if !cond_estimate.is_finite() || cond_estimate > cond_limit {
            return Err(Error::SingularChannel);
        }
        Ok(CholeskyFactor { l })
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
pub struct CholeskyFactor {
    l: CMatrix,
}

impl CholeskyFactor {
    /// Solves A X = B for X given A = L L^H.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.l.rows();
        assert_eq!(b.rows(), n);
        let mut x = b.clone();
        // forward: L Y = B
        for c in 0..x.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        // backward: L^H X = Y
        for c in 0..x.cols() {
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.l[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        x
    }

    /// Trace of A^{-1}, computed as the squared Frobenius norm of L^{-1}.
    pub fn inverse_trace(&self) -> f64 {
        let n = self.l.rows();
        let inv_l = {
            // forward substitution against the identity
            let mut x = CMatrix::identity(n);
            for c in 0..n {
                for i in 0..n {
                    let mut s = x[(i, c)];
                    for k in 0..i {
                        s -= self.l[(i, k)] * x[(k, c)];
                    }
                    x[(i, c)] = s / self.l[(i, i)].re;
                }
            }
            x
        };
        inv_l.frob_sq()
    }
}
