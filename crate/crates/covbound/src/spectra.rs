//! Covariance matrices, eigendecompositions, and the spectral summary
//! quantities (intrinsic dimension r, tail ratios r_ℓ, condition numbers κ_ℓ)
//! that parameterize every tail bound.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Relative tolerance for the PSD check: eigenvalues down to −tol·λ₁ pass.
pub const TOL_PSD: f64 = 1e-10;

/// Eigenvalues at or below this multiple of λ₁ are treated as zero when
/// forming condition numbers.
pub const TOL_ZERO_EIG: f64 = 1e-12;

/// Symmetric positive-semidefinite covariance matrix.
///
/// Construction symmetrizes the input (m ← (m + mᵀ)/2) to absorb round-trip
/// formatting noise, then rejects non-finite entries and matrices whose
/// smallest eigenvalue is below −`TOL_PSD`·λ₁.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    mat: Matrix,
}

impl CovarianceMatrix {
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let sym = m.symmetrized();
        let eigs = symmetric_eigenvalues(&sym);
        let top = eigs[0];
        let min = *eigs.last().expect("d >= 1");
        if min < -TOL_PSD * top.max(0.0) || top < 0.0 {
            return Err(Error::NotPsd { min_eig: min });
        }
        Ok(CovarianceMatrix { mat: sym })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Matrix::from_rows(rows)
            .ok_or_else(|| Error::Parse("matrix rows must be square".into()))?;
        if m.dim() == 0 {
            return Err(Error::Domain("matrix dimension must be at least 1".into()));
        }
        Self::from_matrix(m)
    }

    pub fn identity(d: usize) -> Self {
        CovarianceMatrix {
            mat: Matrix::identity(d),
        }
    }

    /// Diagonal covariance. Entries must be nonnegative.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        if diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if let Some(&neg) = diag.iter().find(|&&v| v < 0.0) {
            return Err(Error::NotPsd { min_eig: neg });
        }
        Ok(CovarianceMatrix {
            mat: Matrix::diagonal(diag),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }
}

/// Eigendecomposition of a symmetric matrix: `values` descending,
/// `vectors.column(k)` the unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Columns are eigenvectors.
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        let d = self.vectors.dim();
        (0..d).map(|i| self.vectors[(i, k)]).collect()
    }

    /// Σ λᵢ vᵢvᵢᵀ.
    pub fn reconstruct(&self) -> Matrix {
        let d = self.vectors.dim();
        let mut out = Matrix::zeros(d);
        for k in 0..d {
            let lk = self.values[k];
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += lk * self.vectors[(i, k)] * self.vectors[(j, k)];
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a covariance matrix, pairs sorted by eigenvalue
/// descending.
pub fn eig_sym(m: &CovarianceMatrix) -> Vec<(f64, Vec<f64>)> {
    let e = symmetric_eigen(m.matrix());
    (0..m.dim()).map(|k| (e.values[k], e.vector(k))).collect()
}

/// Cyclic Jacobi on an arbitrary symmetric matrix (the caller is responsible
/// for symmetry; use `Matrix::symmetrized` first when in doubt).
pub fn symmetric_eigen(m: &Matrix) -> SymEigen {
    jacobi(m, true)
}

/// Eigenvalues only, descending. Skips eigenvector accumulation.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    jacobi(m, false).values
}

fn jacobi(m: &Matrix, with_vectors: bool) -> SymEigen {
    let d = m.dim();
    let mut a = m.clone();
    let mut v = if with_vectors {
        Matrix::identity(d)
    } else {
        Matrix::zeros(0)
    };

    if d > 1 {
        let fro = a.frobenius_norm();
        let stop = (1e-15 * fro).max(f64::MIN_POSITIVE);
        for _sweep in 0..64 {
            let mut off_sq = 0.0;
            for p in 0..d {
                for q in (p + 1)..d {
                    off_sq += a[(p, q)] * a[(p, q)];
                }
            }
            if (2.0 * off_sq).sqrt() <= stop {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    rotate(&mut a, &mut v, p, q, with_vectors);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = if with_vectors {
        let mut sorted = Matrix::zeros(d);
        for (k, &src) in order.iter().enumerate() {
            for i in 0..d {
                sorted[(i, k)] = v[(i, src)];
            }
        }
        sorted
    } else {
        Matrix::zeros(0)
    };
    SymEigen { values, vectors }
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, with_vectors: bool) {
    let d = a.dim();
    let apq = a[(p, q)];
    let scale = a[(p, p)].abs() + a[(q, q)].abs();
    if apq == 0.0 || apq.abs() <= f64::EPSILON * 1e-2 * scale {
        a[(p, q)] = 0.0;
        a[(q, p)] = 0.0;
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    // Smaller-angle root of t² + 2θt − 1 = 0; hypot keeps θ² from overflowing.
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    let app = a[(p, p)];
    let aqq = a[(q, q)];
    a[(p, p)] = app - t * apq;
    a[(q, q)] = aqq + t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..d {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(p, k)] = a[(k, p)];
        a[(k, q)] = s * akp + c * akq;
        a[(q, k)] = a[(k, q)];
    }
    if with_vectors {
        for k in 0..d {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = c * vkp - s * vkq;
            v[(k, q)] = s * vkp + c * vkq;
        }
    }
}

/// Spectral summary of a covariance matrix: eigenvalues λ₁ ≥ … ≥ λ_d ≥ 0 with
/// the scale-free ratios every bound is written in.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    trace: f64,
    r: f64,
    /// Length d+1; `r_tail[ℓ-1]` = Σ_{i=ℓ}^d λᵢ/λ₁, last entry 0.
    r_tail: Vec<f64>,
    /// Length d; `kappa[ℓ-1]` = λ₁/λ_ℓ, +∞ where λ_ℓ is numerically zero.
    kappa: Vec<f64>,
}

impl Spectrum {
    /// Build from raw eigenvalues. Input is sorted descending; negative
    /// entries are rejected, an all-zero list is a degenerate spectrum.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Domain(
                "spectrum needs at least one eigenvalue".into(),
            ));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if let Some(&neg) = eigenvalues.iter().find(|&&v| v < 0.0) {
            return Err(Error::NotPsd { min_eig: neg });
        }
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let top = eigenvalues[0];
        if top <= 0.0 {
            return Err(Error::DegenerateSpectrum);
        }
        let d = eigenvalues.len();

        // Suffix sums keep r == r_tail[1] exactly.
        let mut suffix = vec![0.0; d + 1];
        for i in (0..d).rev() {
            suffix[i] = suffix[i + 1] + eigenvalues[i];
        }
        let trace = suffix[0];
        let r_tail: Vec<f64> = suffix.iter().map(|s| s / top).collect();
        let r = r_tail[0];
        let kappa: Vec<f64> = eigenvalues
            .iter()
            .map(|&l| {
                if l <= TOL_ZERO_EIG * top {
                    f64::INFINITY
                } else {
                    top / l
                }
            })
            .collect();
        Ok(Spectrum {
            eigenvalues,
            trace,
            r,
            r_tail,
            kappa,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// λ_ℓ, 1-based.
    pub fn lambda(&self, ell: usize) -> f64 {
        self.eigenvalues[ell - 1]
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// Intrinsic dimension tr(C)/λ₁.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// r_ℓ = Σ_{i=ℓ}^d λᵢ/λ₁, valid for ℓ in 1..=d+1 (r_{d+1} = 0).
    pub fn r_tail(&self, ell: usize) -> f64 {
        self.r_tail[ell - 1]
    }

    /// κ_ℓ = λ₁/λ_ℓ, +∞ where λ_ℓ is numerically zero; 1-based.
    pub fn kappa(&self, ell: usize) -> f64 {
        self.kappa[ell - 1]
    }
}

/// Spectral summary of `m`. Fails with a degenerate-spectrum error for the
/// zero matrix (λ₁ = 0 leaves r undefined).
pub fn spectrum_of(m: &CovarianceMatrix) -> Result<Spectrum> {
    let mut eigs = symmetric_eigenvalues(m.matrix());
    let top = eigs[0];
    if top <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    // The PSD check allowed a −TOL_PSD·λ₁ slack; clamp that noise away.
    for v in &mut eigs {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Spectrum::from_eigenvalues(eigs)
}

/// Factor L with LLᵀ ≈ m: the Cholesky factor when the matrix is strictly
/// positive definite, the eigendecomposition square root V·diag(√max(λ,0))
/// otherwise.
pub fn cholesky_factor(m: &CovarianceMatrix) -> Matrix {
    let a = m.matrix();
    let d = a.dim();
    let max_diag = (0..d).fold(0.0_f64, |acc, i| acc.max(a[(i, i)].abs()));
    let pivot_floor = 1e-12 * max_diag.max(f64::MIN_POSITIVE);

    let mut l = Matrix::zeros(d);
    let mut ok = true;
    'outer: for i in 0..d {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= pivot_floor {
                    ok = false;
                    break 'outer;
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    if ok {
        return l;
    }

    let e = symmetric_eigen(a);
    let mut root = Matrix::zeros(d);
    for k in 0..d {
        let s = e.values[k].max(0.0).sqrt();
        for i in 0..d {
            root[(i, k)] = e.vectors[(i, k)] * s;
        }
    }
    root
}

/// Random PSD matrix A·Aᵀ/d with standard normal A entries. Used by the
/// oracle battery and the test grids.
pub fn random_psd<R: Rng>(d: usize, rng: &mut R) -> CovarianceMatrix {
    let mut a = Matrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
    }
    let psd = a.matmul(&a.transpose()).scale(1.0 / d as f64);
    CovarianceMatrix::from_matrix(psd).expect("A·Aᵀ is PSD")
}
