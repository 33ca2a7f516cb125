//! The equality-constrained indefinite least squares problem
//!
//! ```text
//!     min_x (b - Ax)^T J (b - Ax)   subject to  Bx = d
//! ```
//!
//! with `J = diag(I_p, -I_q)`. The solution is obtained from the symmetric
//! augmented system
//!
//! ```text
//!     [ 0    0   B ] [ λ  ]   [ d ]
//!     [ 0    J   A ] [ Jr ] = [ b ]
//!     [ B^T  A^T 0 ] [ x  ]   [ 0 ]
//! ```
//!
//! and cross-checked against the closed form
//! `x = M^{-1}B^T N^{-1} d - P^T M^{-1} A^T J b` with `M = A^T J A`,
//! `N = B M^{-1} B^T` and `P = B^T N^{-1} B M^{-1} - I`.

use nalgebra::Cholesky;

use crate::densela::{self, ensure_finite, Matrix, Vector};
use crate::error::{EilsError, Result};

/// `J = diag(I_p, -I_q)`, never stored densely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureMatrix {
    pub p: usize,
    pub q: usize,
}

impl SignatureMatrix {
    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    /// `J = I_m`.
    pub fn identity(m: usize) -> Self {
        Self { p: m, q: 0 }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = v.clone();
        for i in self.p..out.len() {
            out[i] = -out[i];
        }
        out
    }

    /// `J X`: flips the sign of the last `q` rows.
    pub fn apply_rows(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for i in self.p..out.nrows() {
            out.row_mut(i).neg_mut();
        }
        out
    }

    /// `X J`: flips the sign of the last `q` columns.
    pub fn apply_cols(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for j in self.p..out.ncols() {
            out.column_mut(j).neg_mut();
        }
        out
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_diagonal(&Vector::from_fn(self.dim(), |i, _| self.sign(i)))
    }
}

/// Data `(A, B, b, d, J)` of one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct EilsProblem {
    pub a: Matrix,
    pub b: Matrix,
    pub b_vec: Vector,
    pub d: Vector,
    pub j: SignatureMatrix,
}

impl EilsProblem {
    /// Checks dimensional consistency and finiteness.
    ///
    /// Problems without constraints (`s = 0`) are rejected; use
    /// [`crate::special::ils::IlsProblem`] for those.
    pub fn new(a: Matrix, b: Matrix, b_vec: Vector, d: Vector, j: SignatureMatrix) -> Result<Self> {
        let (m, n) = a.shape();
        let s = b.nrows();
        if s == 0 {
            return Err(EilsError::Dimension(
                "no equality constraints (s = 0); solve it as an ILS problem".into(),
            ));
        }
        if b.ncols() != n {
            return Err(EilsError::Shape(format!("A is {m}x{n} but B has {} columns", b.ncols())));
        }
        if b_vec.len() != m {
            return Err(EilsError::Shape(format!("b has length {}, expected {m}", b_vec.len())));
        }
        if d.len() != s {
            return Err(EilsError::Shape(format!("d has length {}, expected {s}", d.len())));
        }
        if j.dim() != m {
            return Err(EilsError::Shape(format!("J has order {}, A has {m} rows", j.dim())));
        }
        if !(m >= n && n >= s) {
            return Err(EilsError::Dimension(format!(
                "need m >= n >= s >= 1, got m={m}, n={n}, s={s}"
            )));
        }
        ensure_finite("A", a.as_slice())?;
        ensure_finite("B", b.as_slice())?;
        ensure_finite("b", b_vec.as_slice())?;
        ensure_finite("d", d.as_slice())?;
        Ok(Self { a, b, b_vec, d, j })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn s(&self) -> usize {
        self.b.nrows()
    }

    /// `A^T J A`.
    pub fn gram(&self) -> Matrix {
        densela::symmetrize(&(self.a.transpose() * self.j.apply_rows(&self.a)))
    }

    /// `‖(A, B, b, d)‖_F`.
    pub fn data_norm(&self) -> f64 {
        (self.a.norm_squared() + self.b.norm_squared() + self.b_vec.norm_squared() + self.d.norm_squared())
            .sqrt()
    }
}

/// Result of checking `rank(B) = s` and positive definiteness of `A^T J A`
/// on the null space of `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rank_b: usize,
    pub s: usize,
    /// Smallest eigenvalue of `Z^T A^T J A Z`; `None` when `N(B) = {0}`.
    pub min_reduced_eig: Option<f64>,
    /// `p >= n - s`, which the assumption implies.
    pub signature_ok: bool,
    pub pass: bool,
}

impl ValidationReport {
    /// Which check failed, for error messages.
    pub fn failure(&self) -> Option<String> {
        if self.pass {
            return None;
        }
        if self.rank_b != self.s {
            return Some(format!("B is rank deficient: rank {} < s = {}", self.rank_b, self.s));
        }
        if !self.signature_ok {
            return Some("p < n - s: A^T J A cannot be positive definite on N(B)".into());
        }
        Some(format!(
            "A^T J A is not positive definite on N(B) (smallest eigenvalue {:.3e})",
            self.min_reduced_eig.unwrap_or(f64::NAN)
        ))
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;

/// Checks the solvability assumption. `tol` is relative to the largest
/// singular value of `B` and to `‖A‖_2^2` respectively.
pub fn validate(prob: &EilsProblem, tol: f64) -> ValidationReport {
    let n = prob.n();
    let s = prob.s();
    let signature_ok = prob.j.p + s >= n;

    // Square padding gives the full set of right singular vectors.
    let mut padded = Matrix::zeros(n, n);
    padded.view_mut((0, 0), (s, n)).copy_from(&prob.b);
    let Some(densela::Svd { sigma, v, .. }) = densela::svd(&padded) else {
        return ValidationReport { rank_b: 0, s, min_reduced_eig: None, signature_ok, pass: false };
    };
    let top = sigma[0];
    let rank_b = sigma.iter().filter(|&&x| x > tol * top).count();

    let min_reduced_eig = if n > s {
        let z = v.columns(s, n - s);
        let reduced = z.transpose() * prob.gram() * z;
        densela::sym_eigenvalues(&reduced).first().copied()
    } else {
        None
    };
    let a2 = densela::spectral(&prob.a).powi(2).max(f64::MIN_POSITIVE);
    let definite = min_reduced_eig.is_none_or(|e| e > tol * a2);

    ValidationReport {
        rank_b,
        s,
        min_reduced_eig,
        signature_ok,
        pass: rank_b == s && signature_ok && definite,
    }
}

/// `(x, r, λ)` with `r = b - Ax`.
#[derive(Debug, Clone, PartialEq)]
pub struct EilsSolution {
    pub x: Vector,
    pub r: Vector,
    pub lambda: Vector,
}

/// Norms of the three block rows of the augmented system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    pub constraint: f64,
    pub residual: f64,
    pub stationarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.constraint.max(self.residual).max(self.stationarity)
    }
}

impl EilsSolution {
    pub fn kkt_residuals(&self, prob: &EilsProblem) -> KktResiduals {
        let jr = prob.j.apply(&self.r);
        KktResiduals {
            constraint: (&prob.b * &self.x - &prob.d).norm(),
            residual: (prob.j.apply(&jr) + &prob.a * &self.x - &prob.b_vec).norm(),
            stationarity: (prob.b.transpose() * &self.lambda + prob.a.transpose() * jr).norm(),
        }
    }
}

/// Coefficient matrix of the augmented system in the unknowns `(λ, J r, x)`.
pub fn augmented_matrix(prob: &EilsProblem) -> Matrix {
    let (m, n, s) = (prob.m(), prob.n(), prob.s());
    let size = s + m + n;
    let mut k = Matrix::zeros(size, size);
    k.view_mut((0, s + m), (s, n)).copy_from(&prob.b);
    for i in 0..m {
        k[(s + i, s + i)] = prob.j.sign(i);
    }
    k.view_mut((s, s + m), (m, n)).copy_from(&prob.a);
    k.view_mut((s + m, 0), (n, s)).copy_from(&prob.b.transpose());
    k.view_mut((s + m, s), (n, m)).copy_from(&prob.a.transpose());
    k
}

const REFINEMENT_STEPS: usize = 2;

/// Solves the augmented system with partially pivoted LU plus two steps of
/// iterative refinement.
pub fn solve_augmented(prob: &EilsProblem) -> Result<EilsSolution> {
    let (m, n, s) = (prob.m(), prob.n(), prob.s());
    let k = augmented_matrix(prob);
    let mut rhs = Vector::zeros(s + m + n);
    rhs.rows_mut(0, s).copy_from(&prob.d);
    rhs.rows_mut(s, m).copy_from(&prob.b_vec);

    let lu = k.clone().lu();
    let violated = || {
        let msg = validate(prob, DEFAULT_TOL)
            .failure()
            .unwrap_or_else(|| "augmented matrix is numerically singular".into());
        EilsError::AssumptionViolated(msg)
    };
    let mut z = lu.solve(&rhs).ok_or_else(violated)?;
    for _ in 0..REFINEMENT_STEPS {
        let res = &rhs - &k * &z;
        match lu.solve(&res) {
            Some(dz) => z += dz,
            None => break,
        }
    }
    if !z.iter().all(|v| v.is_finite()) {
        return Err(violated());
    }
    let lambda = z.rows(0, s).into_owned();
    let jr = z.rows(s, m).into_owned();
    let x = z.rows(s + m, n).into_owned();
    let r = prob.j.apply(&jr);
    Ok(EilsSolution { x, r, lambda })
}

/// Dense blocks shared by the solution formula, the derivative and every
/// condition-number form.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediateFactors {
    /// `M = A^T J A`
    pub m: Matrix,
    /// `N = B M^{-1} B^T`
    pub n: Matrix,
    /// `P = B^T N^{-1} B M^{-1} - I`
    pub p: Matrix,
    pub m_inv: Matrix,
    pub n_inv: Matrix,
    /// `M^{-1} P` (symmetric; equals `P^T M^{-1}`)
    pub g: Matrix,
    /// `M^{-1} B^T N^{-1}`
    pub u: Matrix,
    /// `P^T M^{-1} A^T J`
    pub v: Matrix,
}

fn inverse(a: &Matrix, name: &str) -> Result<Matrix> {
    let inv = a
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| EilsError::AssumptionViolated(format!("{name} is singular")))?;
    ensure_finite(name, inv.as_slice())
        .map_err(|_| EilsError::AssumptionViolated(format!("{name} is singular")))?;
    Ok(inv)
}

impl IntermediateFactors {
    pub fn new(prob: &EilsProblem) -> Result<Self> {
        let m = prob.gram();
        let m_inv = densela::symmetrize(&inverse(&m, "A^T J A")?);
        let n = densela::symmetrize(&(&prob.b * &m_inv * prob.b.transpose()));
        let n_inv = densela::symmetrize(&inverse(&n, "B M^{-1} B^T")?);
        let bt_ninv = prob.b.transpose() * &n_inv;
        let p = &bt_ninv * &prob.b * &m_inv - Matrix::identity(prob.n(), prob.n());
        let g = densela::symmetrize(&(&m_inv * &p));
        let u = &m_inv * &bt_ninv;
        let v = &g * prob.j.apply_cols(&prob.a.transpose());
        Ok(Self { m, n, p, m_inv, n_inv, g, u, v })
    }
}

/// Closed-form solution; also returns the factors it was built from.
pub fn solve_closed_form(prob: &EilsProblem) -> Result<(EilsSolution, IntermediateFactors)> {
    let f = IntermediateFactors::new(prob)?;
    let x = &f.u * &prob.d - &f.v * &prob.b_vec;
    let r = &prob.b_vec - &prob.a * &x;
    let lambda = lagrange_multipliers(prob, &r)?;
    Ok((EilsSolution { x, r, lambda }, f))
}

/// `λ = -(B B^T)^{-1} B A^T J r`.
pub fn lagrange_multipliers(prob: &EilsProblem, r: &Vector) -> Result<Vector> {
    let bbt = &prob.b * prob.b.transpose();
    let chol = Cholesky::new(bbt)
        .ok_or_else(|| EilsError::AssumptionViolated("B B^T is not positive definite".into()))?;
    let rhs = -(&prob.b * (prob.a.transpose() * prob.j.apply(r)));
    Ok(chol.solve(&rhs))
}

/// A perturbation `(ΔA, ΔB, Δb, Δd)` of the problem data.
#[derive(Debug, Clone, PartialEq)]
pub struct DataDelta {
    pub a: Matrix,
    pub b: Matrix,
    pub b_vec: Vector,
    pub d: Vector,
}

impl DataDelta {
    pub fn zeros(m: usize, n: usize, s: usize) -> Self {
        Self {
            a: Matrix::zeros(m, n),
            b: Matrix::zeros(s, n),
            b_vec: Vector::zeros(m),
            d: Vector::zeros(s),
        }
    }

    pub fn zeros_like(prob: &EilsProblem) -> Self {
        Self::zeros(prob.m(), prob.n(), prob.s())
    }

    /// `vec(ΔA, ΔB, Δb, Δd)`, the ordering used by the derivative matrix.
    pub fn to_vec(&self) -> Vector {
        let parts = [self.a.as_slice(), self.b.as_slice(), self.b_vec.as_slice(), self.d.as_slice()];
        Vector::from_iterator(parts.iter().map(|p| p.len()).sum(), parts.into_iter().flatten().copied())
    }

    pub fn from_vec(v: &Vector, m: usize, n: usize, s: usize) -> Result<Self> {
        let total = (n + 1) * (m + s);
        if v.len() != total {
            return Err(EilsError::Shape(format!("perturbation vector has length {}, expected {total}", v.len())));
        }
        let sl = v.as_slice();
        let (a, rest) = sl.split_at(m * n);
        let (b, rest) = rest.split_at(s * n);
        let (bv, d) = rest.split_at(m);
        Ok(Self {
            a: Matrix::from_column_slice(m, n, a),
            b: Matrix::from_column_slice(s, n, b),
            b_vec: Vector::from_column_slice(bv),
            d: Vector::from_column_slice(d),
        })
    }

    pub fn frobenius(&self) -> f64 {
        self.to_vec().norm()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            a: &self.a * alpha,
            b: &self.b * alpha,
            b_vec: &self.b_vec * alpha,
            d: &self.d * alpha,
        }
    }

    /// `prob + alpha * self`.
    pub fn apply_to(&self, prob: &EilsProblem, alpha: f64) -> Result<EilsProblem> {
        EilsProblem::new(
            &prob.a + &self.a * alpha,
            &prob.b + &self.b * alpha,
            &prob.b_vec + &self.b_vec * alpha,
            &prob.d + &self.d * alpha,
            prob.j,
        )
    }
}

/// First-order change of `x` under the data perturbation `delta`:
///
/// ```text
/// M^{-1}B^T N^{-1}(Δd - ΔB x) - P^T M^{-1} A^T J (Δb - ΔA x) - M^{-1}P (ΔB^T λ + ΔA^T J r)
/// ```
pub fn frechet_apply(
    prob: &EilsProblem,
    sol: &EilsSolution,
    f: &IntermediateFactors,
    delta: &DataDelta,
) -> Result<Vector> {
    let (m, n, s) = (prob.m(), prob.n(), prob.s());
    if delta.a.shape() != (m, n)
        || delta.b.shape() != (s, n)
        || delta.b_vec.len() != m
        || delta.d.len() != s
    {
        return Err(EilsError::Shape("perturbation does not match problem shape".into()));
    }
    let jr = prob.j.apply(&sol.r);
    let t1 = &f.u * (&delta.d - &delta.b * &sol.x);
    let t2 = &f.v * (&delta.b_vec - &delta.a * &sol.x);
    let t3 = &f.g * (delta.b.transpose() * &sol.lambda + delta.a.transpose() * jr);
    Ok(t1 - t2 - t3)
}

/// A solved problem together with the dense factors the condition-number
/// routines consume.
#[derive(Debug, Clone)]
pub struct EilsAnalysis {
    pub problem: EilsProblem,
    pub solution: EilsSolution,
    pub factors: IntermediateFactors,
}

impl EilsAnalysis {
    /// Solves through the augmented system and builds the factors.
    pub fn new(problem: EilsProblem) -> Result<Self> {
        let solution = solve_augmented(&problem)?;
        let factors = IntermediateFactors::new(&problem)?;
        Ok(Self { problem, solution, factors })
    }

    pub fn frechet(&self, delta: &DataDelta) -> Result<Vector> {
        frechet_apply(&self.problem, &self.solution, &self.factors, delta)
    }

    /// `J r`
    pub fn jr(&self) -> Vector {
        self.problem.j.apply(&self.solution.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecf(v: &[f64]) -> Vector {
        Vector::from_column_slice(v)
    }

    fn simple() -> EilsProblem {
        EilsProblem::new(
            Matrix::identity(2, 2),
            Matrix::from_row_slice(1, 2, &[1.0, 0.0]),
            vecf(&[1.0, 2.0]),
            vecf(&[1.0]),
            SignatureMatrix::identity(2),
        )
        .unwrap()
    }

    // A hand-made indefinite instance: p = 2, q = 1.
    fn indefinite() -> EilsProblem {
        EilsProblem::new(
            Matrix::from_row_slice(3, 2, &[2.0, 0.5, 0.3, 1.5, 0.4, 0.2]),
            Matrix::from_row_slice(1, 2, &[1.0, 1.0]),
            vecf(&[1.0, -0.5, 0.25]),
            vecf(&[0.7]),
            SignatureMatrix::new(2, 1),
        )
        .unwrap()
    }

    #[test]
    fn signature_matrix_properties() {
        let j = SignatureMatrix::new(2, 3);
        let jd = j.to_dense();
        assert_eq!(&jd * &jd, Matrix::identity(5, 5));
        assert_eq!(jd.transpose() * &jd, Matrix::identity(5, 5));
        let v = vecf(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(j.apply(&v), &jd * &v);
        let x = Matrix::from_fn(5, 2, |i, k| (i + k) as f64);
        assert_eq!(j.apply_rows(&x), &jd * &x);
        assert_eq!(j.apply_cols(&x.transpose()), x.transpose() * &jd);
    }

    #[test]
    fn rejects_bad_shapes() {
        let a = Matrix::identity(2, 2);
        let j = SignatureMatrix::identity(2);
        assert!(EilsProblem::new(a.clone(), Matrix::zeros(0, 2), vecf(&[1.0, 2.0]), vecf(&[]), j).is_err());
        assert!(EilsProblem::new(a.clone(), Matrix::zeros(1, 3), vecf(&[1.0, 2.0]), vecf(&[0.0]), j).is_err());
        assert!(EilsProblem::new(a.clone(), Matrix::zeros(1, 2), vecf(&[1.0]), vecf(&[0.0]), j).is_err());
        assert!(EilsProblem::new(a, Matrix::zeros(1, 2), vecf(&[1.0, 2.0]), vecf(&[0.0]), SignatureMatrix::new(1, 2)).is_err());
        let bad = EilsProblem::new(
            Matrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 1.0]),
            Matrix::zeros(1, 2),
            vecf(&[1.0, 2.0]),
            vecf(&[0.0]),
            SignatureMatrix::identity(2),
        );
        assert!(matches!(bad, Err(EilsError::NonFinite(_))));
    }

    #[test]
    fn validate_trivial_cases() {
        // B = I: N(B) = {0}.
        let p = EilsProblem::new(
            Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]),
            Matrix::identity(2, 2),
            vecf(&[1.0, 1.0, 1.0]),
            vecf(&[0.5, -0.5]),
            SignatureMatrix::new(1, 2),
        )
        .unwrap();
        let rep = validate(&p, DEFAULT_TOL);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.min_reduced_eig, None);

        assert!(validate(&simple(), DEFAULT_TOL).pass);
        assert!(validate(&indefinite(), DEFAULT_TOL).pass);
    }

    #[test]
    fn validate_rejects_too_few_positive_rows() {
        // n - s = 2 > p = 1
        let p = EilsProblem::new(
            Matrix::from_fn(4, 3, |i, k| 1.0 + (i * 3 + k) as f64 * 0.37 + if i == k { 2.0 } else { 0.0 }),
            Matrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]),
            vecf(&[1.0, 2.0, 3.0, 4.0]),
            vecf(&[1.0]),
            SignatureMatrix::new(1, 3),
        )
        .unwrap();
        let rep = validate(&p, DEFAULT_TOL);
        assert!(!rep.signature_ok);
        assert!(!rep.pass);
        assert!(rep.failure().unwrap().contains("p < n - s"));
    }

    #[test]
    fn validate_rejects_rank_deficient_b() {
        let p = EilsProblem::new(
            Matrix::identity(3, 3),
            Matrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]),
            vecf(&[1.0, 2.0, 3.0]),
            vecf(&[1.0, 2.0]),
            SignatureMatrix::identity(3),
        )
        .unwrap();
        let rep = validate(&p, DEFAULT_TOL);
        assert_eq!(rep.rank_b, 1);
        assert!(!rep.pass);
        assert!(matches!(solve_augmented(&p), Err(EilsError::AssumptionViolated(msg)) if msg.contains("rank")));
    }

    #[test]
    fn constraint_determines_solution_when_b_is_identity() {
        let p = EilsProblem::new(
            Matrix::from_row_slice(3, 2, &[3.0, 1.0, -1.0, 2.0, 0.5, 0.5]),
            Matrix::identity(2, 2),
            vecf(&[10.0, -4.0, 7.0]),
            vecf(&[0.25, -1.5]),
            SignatureMatrix::new(2, 1),
        )
        .unwrap();
        let sol = solve_augmented(&p).unwrap();
        assert!((&sol.x - &p.d).norm() < 1e-14);
        let (closed, _) = solve_closed_form(&p).unwrap();
        assert!((&closed.x - &p.d).norm() < 1e-13);
    }

    #[test]
    fn exactly_representable_right_hand_side() {
        let p = simple();
        let sol = solve_augmented(&p).unwrap();
        assert!((&sol.x - vecf(&[1.0, 2.0])).norm() < 1e-15);
        assert!(sol.r.norm() < 1e-15);
        assert!(sol.lambda.norm() < 1e-15);
        let (closed, _) = solve_closed_form(&p).unwrap();
        assert!((&closed.x - vecf(&[1.0, 2.0])).norm() < 1e-15);
        assert!(closed.lambda.norm() < 1e-15);
    }

    #[test]
    fn augmented_and_closed_form_agree_on_indefinite_instance() {
        let p = indefinite();
        let sol = solve_augmented(&p).unwrap();
        let (closed, f) = solve_closed_form(&p).unwrap();
        assert!((&sol.x - &closed.x).norm() <= 1e-12 * sol.x.norm());
        assert!((&sol.lambda - &closed.lambda).norm() <= 1e-12 * (1.0 + sol.lambda.norm()));
        let res = sol.kkt_residuals(&p);
        assert!(res.max() < 1e-13, "{res:?}");
        let mp = &f.m_inv * &f.p;
        let ptm = f.p.transpose() * &f.m_inv;
        assert!(densela::max_norm(&(&mp - &ptm)) <= 1e-12 * densela::max_norm(&mp));
    }

    #[test]
    fn frechet_basic_properties() {
        let p = indefinite();
        let an = EilsAnalysis::new(p.clone()).unwrap();
        let zero = DataDelta::zeros_like(&p);
        assert_eq!(an.frechet(&zero).unwrap(), Vector::zeros(2));

        let mut dd = zero.clone();
        dd.d[0] = 1.0;
        let col = an.frechet(&dd).unwrap();
        assert!((&col - an.factors.u.column(0)).norm() < 1e-15);

        let mut wrong = zero;
        wrong.d = Vector::zeros(2);
        assert!(an.frechet(&wrong).is_err());
    }

    #[test]
    fn data_delta_vec_roundtrip() {
        let v = Vector::from_fn(3 * (3 + 1), |i, _| i as f64);
        let d = DataDelta::from_vec(&v, 3, 2, 1).unwrap();
        assert_eq!(d.to_vec(), v);
        assert!(DataDelta::from_vec(&v, 3, 3, 1).is_err());
    }
}
