//! Small dense square matrices.
//!
//! Everything in this crate works on matrices of modest dimension (d up to a
//! few dozen), so a flat row-major `Vec<f64>` with straightforward loops is
//! all that is needed.

use std::ops::{Index, IndexMut};

/// Dense square matrix of `f64`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    d: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(d: usize) -> Self {
        Matrix {
            d,
            data: vec![0.0; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Matrix::zeros(d);
        for i in 0..d {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Build from nested rows. All rows must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return None;
        }
        let mut data = Vec::with_capacity(d * d);
        for r in rows {
            data.extend_from_slice(r);
        }
        Some(Matrix { d, data })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// (m + mᵀ)/2.
    pub fn symmetrized(&self) -> Matrix {
        let mut s = Matrix::zeros(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                s[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        s
    }

    pub fn scale(&self, a: f64) -> Matrix {
        Matrix {
            d: self.d,
            data: self.data.iter().map(|v| v * a).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.d, other.d);
        Matrix {
            d: self.d,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.d, other.d);
        Matrix {
            d: self.d,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// self ← self + x xᵀ.
    pub fn add_outer(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.d);
        for i in 0..self.d {
            let xi = x[i];
            for j in 0..self.d {
                self[(i, j)] += xi * x[j];
            }
        }
    }

    /// y = self · x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.d);
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.d)
            .map(|i| self.data[i * self.d..(i + 1) * self.d].to_vec())
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.d + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.d + j]
    }
}
