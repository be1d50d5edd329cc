//! Small dense matrices for logical gates and their comparison up to a
//! global phase.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: alloc::vec![Complex64::default(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { n, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Matrix {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    /// `self ⊗ other`, with `self` acting on the more significant index.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let n = self.n * other.n;
        let mut m = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..other.n {
                    for l in 0..other.n {
                        m[(i * other.n + k, j * other.n + l)] = self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `M^dagger M - I`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Matrix::identity(self.n))
    }

    /// Multiplies by the phase that makes the largest-magnitude entry real
    /// and positive. Ties within `1e-9` go to the first entry in row-major order.
    pub fn canonical_phase(&self) -> Matrix {
        let max = self.data.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let Some(pivot) = self.data.iter().find(|a| a.norm() >= max - 1e-9) else {
            return self.clone();
        };
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        let phase = pivot.conj() / pivot.norm();
        Matrix { n: self.n, data: self.data.iter().map(|a| a * phase).collect() }
    }

    /// Distance to `other` after fixing the global phase of both.
    pub fn residual_up_to_phase(&self, other: &Matrix) -> f64 {
        self.canonical_phase().max_abs_diff(&other.canonical_phase())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        let mut m = Matrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                for j in 0..self.n {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub fn hadamard() -> Matrix {
    let h = re(FRAC_1_SQRT_2);
    Matrix::from_rows(&[&[h, h], &[h, -h]])
}

/// Single-qubit phase `diag(1, e^{i theta})`.
pub fn phase(theta: f64) -> Matrix {
    Matrix::diagonal(&[re(1.0), Complex64::from_polar(1.0, theta)])
}

/// Controlled phase `diag(1, 1, 1, e^{i theta})`.
pub fn controlled_phase(theta: f64) -> Matrix {
    Matrix::diagonal(&[re(1.0), re(1.0), re(1.0), Complex64::from_polar(1.0, theta)])
}

pub fn controlled_r_pi_4() -> Matrix {
    controlled_phase(FRAC_PI_4)
}

pub fn controlled_z() -> Matrix {
    controlled_phase(PI)
}

/// CNOT with the first (more significant) qubit as control.
pub fn cnot() -> Matrix {
    let (o, z) = (re(1.0), re(0.0));
    Matrix::from_rows(&[&[o, z, z, z], &[z, o, z, z], &[z, z, z, o], &[z, z, o, z]])
}
