//! Dense kernels and the notational operators used throughout the crate.
//!
//! Matrices are `nalgebra::DMatrix<f64>`, which stores entries in
//! column-major order. `vec(A)` is therefore the raw storage slice read as a
//! vector, and every matrix file written by the CLI uses the same order.

use nalgebra::{DMatrix, DVector};

use crate::error::{EilsError, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Kronecker product `A ⊗ B`: block `(i, j)` of the result is `a_ij * B`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            for l in 0..bc {
                let col = j * bc + l;
                for k in 0..br {
                    out[(i * br + k, col)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Stacks the columns of `a` into one vector.
pub fn vec(a: &Matrix) -> Vector {
    Vector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec(v: &Vector, rows: usize, cols: usize) -> Result<Matrix> {
    if v.len() != rows * cols {
        return Err(EilsError::Shape(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(Matrix::from_column_slice(rows, cols, v.as_slice()))
}

/// The vec-permutation matrix `Π_{st}`, kept as an index map.
///
/// For every `s×t` matrix `A`, `Π_{st} vec(A) = vec(A^T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecPerm {
    s: usize,
    t: usize,
    /// `(Π v)[k] = v[source[k]]`
    source: Vec<usize>,
}

impl VecPerm {
    pub fn new(s: usize, t: usize) -> Result<Self> {
        if s == 0 || t == 0 {
            return Err(EilsError::Dimension(format!(
                "vec-permutation needs positive sizes, got {s}x{t}"
            )));
        }
        let mut source = vec![0; s * t];
        for i in 0..s {
            for j in 0..t {
                // A[i,j] sits at i + j*s in vec(A) and at j + i*t in vec(A^T).
                source[j + i * t] = i + j * s;
            }
        }
        Ok(Self { s, t, source })
    }

    pub fn dim(&self) -> usize {
        self.s * self.t
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.dim() {
            return Err(EilsError::Shape(format!(
                "vec-permutation of order {} applied to length {}",
                self.dim(),
                v.len()
            )));
        }
        Ok(Vector::from_iterator(
            self.dim(),
            self.source.iter().map(|&k| v[k]),
        ))
    }

    /// Dense 0/1 matrix. Only meant for tests and small identity checks.
    pub fn to_dense(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for (row, &col) in self.source.iter().enumerate() {
            m[(row, col)] = 1.0;
        }
        m
    }
}

/// Convenience constructor matching the notation `Π_{st}`.
pub fn vec_perm(s: usize, t: usize) -> Result<VecPerm> {
    VecPerm::new(s, t)
}

pub fn hadamard(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.shape() != b.shape() {
        return Err(EilsError::Shape(format!(
            "hadamard of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.component_mul(b))
}

/// Pseudo-reciprocal: `1/c` for `c != 0`, and `1` for `c == 0`.
#[inline]
pub fn ddag(c: f64) -> f64 {
    if c == 0.0 {
        1.0
    } else {
        1.0 / c
    }
}

pub fn ddag_vec(v: &Vector) -> Vector {
    v.map(ddag)
}

pub fn ddag_mat(a: &Matrix) -> Matrix {
    a.map(ddag)
}

/// `|(c^‡)^‡|`: the absolute value with zeros replaced by one.
#[inline]
pub fn ddag2_abs(c: f64) -> f64 {
    // Computed directly: 1/(1/c) can be off by one ulp.
    if c == 0.0 {
        1.0
    } else {
        c.abs()
    }
}

pub fn ddag2_abs_mat(a: &Matrix) -> Matrix {
    a.map(ddag2_abs)
}

pub fn ddag2_abs_vec(v: &Vector) -> Vector {
    v.map(ddag2_abs)
}

/// `a / b := diag(b^‡) a`.
pub fn entrywise_div(a: &Vector, b: &Vector) -> Result<Vector> {
    if a.len() != b.len() {
        return Err(EilsError::Shape(format!(
            "entrywise division of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.zip_map(b, |ai, bi| ai * ddag(bi)))
}

fn to_faer(a: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, f64>) -> Matrix {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Thin singular value decomposition `A = U diag(σ) V^T`, `σ` non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// Thin SVD. Returns `None` if the iteration fails to converge, which only
/// happens for non-finite input.
pub fn svd(a: &Matrix) -> Option<Svd> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Some(Svd { u: Matrix::zeros(m, 0), sigma: Vec::new(), v: Matrix::zeros(n, 0) });
    }
    let f = to_faer(a).thin_svd().ok()?;
    let d = f.S().column_vector();
    Some(Svd {
        u: from_faer(f.U()),
        sigma: (0..m.min(n)).map(|i| d[i]).collect(),
        v: from_faer(f.V()),
    })
}

/// Singular values in non-increasing order. Empty input yields an empty list;
/// non-finite input yields NaNs.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    to_faer(a)
        .singular_values()
        .unwrap_or_else(|_| vec![f64::NAN; a.nrows().min(a.ncols())])
}

/// Spectral norm via a singular value decomposition.
pub fn spectral(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Spectral norm of a symmetric matrix, from its eigenvalues.
pub fn spectral_sym(a: &Matrix) -> f64 {
    sym_eigenvalues(a).iter().fold(0.0_f64, |acc, e| acc.max(e.abs()))
}

/// Eigenvalues of the symmetric part of `a`, ascending.
pub fn sym_eigenvalues(a: &Matrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    to_faer(&symmetrize(a))
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .unwrap_or_else(|_| vec![f64::NAN; a.nrows()])
}

/// Eigen-decomposition of the symmetric part of `a`: ascending eigenvalues
/// and orthonormal eigenvectors as columns.
pub fn sym_eigen(a: &Matrix) -> Option<(Vec<f64>, Matrix)> {
    if a.nrows() == 0 {
        return Some((Vec::new(), Matrix::zeros(0, 0)));
    }
    let e = to_faer(&symmetrize(a)).self_adjoint_eigen(faer::Side::Lower).ok()?;
    let d = e.S().column_vector();
    Some(((0..a.nrows()).map(|i| d[i]).collect(), from_faer(e.U())))
}

pub fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

/// 2-norm condition number `σ_max / σ_min` (infinite when rank deficient).
pub fn cond2(a: &Matrix) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Numerical rank with threshold `tol * σ_max`.
pub fn rank(a: &Matrix, tol: f64) -> usize {
    let sv = singular_values(a);
    let Some(&top) = sv.first() else {
        return 0;
    };
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// Moore-Penrose inverse; singular values below `rtol * σ_max` are dropped.
pub fn pinv(a: &Matrix, rtol: f64) -> Matrix {
    let (m, n) = a.shape();
    let Some(Svd { u, sigma, v }) = svd(a) else {
        return Matrix::from_element(n, m, f64::NAN);
    };
    let top = sigma.first().copied().unwrap_or(0.0);
    let mut out = Matrix::zeros(n, m);
    for (i, &s) in sigma.iter().enumerate() {
        if s > rtol * top && s > 0.0 {
            out += (v.column(i) * u.column(i).transpose()) / s;
        }
    }
    out
}

pub fn frobenius(a: &Matrix) -> f64 {
    a.norm()
}

/// Induced ∞-norm: largest absolute row sum.
pub fn inf_norm(a: &Matrix) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_norm(a: &Matrix) -> f64 {
    a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn vec2(v: &Vector) -> f64 {
    v.norm()
}

pub fn vecinf(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn vec1(v: &Vector) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub(crate) fn ensure_finite(what: &str, data: &[f64]) -> Result<()> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(EilsError::NonFinite(what.to_string()))
    }
}

/// Places the blocks `[a, b, ...]` side by side.
pub fn hstack(blocks: &[&Matrix]) -> Result<Matrix> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    if blocks.iter().any(|b| b.nrows() != rows) {
        return Err(EilsError::Shape("hstack with differing row counts".into()));
    }
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    Ok(out)
}
