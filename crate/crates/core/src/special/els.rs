//! Equality-constrained least squares, `min ‖b - Ax‖_2` subject to `Bx = d`.
//!
//! This is the constrained problem with `J = I`. Solving and the generic
//! condition number reuse [`EilsAnalysis`]; the compact 2-norm forms are
//! simpler here because `P^T M^{-1} A^T r = 0`.

use crate::condnum::{self, x_perp_projector, CondParams, MemoryCap, NormKind, ZeroSolutionPolicy};
use crate::densela::{self, Matrix, Vector};
use crate::error::{EilsError, Result};
use crate::problem::{EilsAnalysis, EilsProblem, EilsSolution, SignatureMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct ElsProblem {
    pub a: Matrix,
    pub b: Matrix,
    pub b_vec: Vector,
    pub d: Vector,
}

impl ElsProblem {
    /// Requires `rank(B) = s` and `null(A) ∩ null(B) = {0}`.
    pub fn new(a: Matrix, b: Matrix, b_vec: Vector, d: Vector) -> Result<Self> {
        let p = Self { a, b, b_vec, d };
        let eils = p.to_eils()?;
        let (m, n, s) = (eils.m(), eils.n(), eils.s());
        let tol = 1e-12;
        if densela::rank(&p.b, tol) != s {
            return Err(EilsError::AssumptionViolated(format!("rank(B) < s = {s}")));
        }
        let stacked = Matrix::from_fn(m + s, n, |i, j| if i < m { p.a[(i, j)] } else { p.b[(i - m, j)] });
        if densela::rank(&stacked, tol) != n {
            return Err(EilsError::AssumptionViolated("null(A) and null(B) intersect".into()));
        }
        Ok(p)
    }

    /// The same data as a constrained indefinite problem with `J = I`.
    pub fn to_eils(&self) -> Result<EilsProblem> {
        EilsProblem::new(
            self.a.clone(),
            self.b.clone(),
            self.b_vec.clone(),
            self.d.clone(),
            SignatureMatrix::identity(self.a.nrows()),
        )
    }
}

/// Solves the augmented system
///
/// ```text
/// [0   0   B] [λ]   [d]
/// [0   I   A] [r] = [b]
/// [B^T A^T 0] [x]   [0]
/// ```
pub fn els_solve(p: &ElsProblem) -> Result<EilsSolution> {
    Ok(ElsAnalysis::new(p.clone())?.inner.solution)
}

/// `x = B_A^† d + (A (I - B^† B))^† b` with `B_A^† = (I - (A(I - B^†B))^† A) B^†`,
/// evaluated with SVD pseudoinverses.
pub fn els_pinv_crosscheck(p: &ElsProblem) -> Vector {
    let n = p.a.ncols();
    let rtol = 1e-12;
    let b_pinv = densela::pinv(&p.b, rtol);
    let proj = Matrix::identity(n, n) - &b_pinv * &p.b;
    let ap_pinv = densela::pinv(&(&p.a * proj), rtol);
    let b_a = (Matrix::identity(n, n) - &ap_pinv * &p.a) * &b_pinv;
    b_a * &p.d + ap_pinv * &p.b_vec
}

#[derive(Debug, Clone)]
pub struct ElsAnalysis {
    pub problem: ElsProblem,
    pub inner: EilsAnalysis,
}

impl ElsAnalysis {
    pub fn new(problem: ElsProblem) -> Result<Self> {
        let inner = EilsAnalysis::new(problem.to_eils()?)?;
        Ok(Self { problem, inner })
    }

    pub fn solution(&self) -> &EilsSolution {
        &self.inner.solution
    }

    /// `P^T M^{-1} A^T r`, zero at the solution.
    pub fn orthogonality_defect(&self) -> Vector {
        &self.inner.factors.v * &self.inner.solution.r
    }

    /// The displayed inverse of the augmented matrix, ordered `(λ, r, x)`.
    pub fn augmented_inverse(&self) -> Matrix {
        let f = &self.inner.factors;
        let a = &self.problem.a;
        let (m, n, s) = (a.nrows(), a.ncols(), self.problem.b.nrows());
        let b = &self.problem.b;
        let mut out = Matrix::zeros(s + m + n, s + m + n);
        let blocks: [[Matrix; 3]; 3] = [
            [f.n_inv.clone(), -(&f.n_inv * b * &f.m_inv * a.transpose()), &f.n_inv * b * &f.m_inv],
            [
                -(a * &f.u),
                Matrix::identity(m, m) + a * f.p.transpose() * &f.m_inv * a.transpose(),
                -(a * &f.g),
            ],
            [f.u.clone(), -(f.p.transpose() * &f.m_inv * a.transpose()), f.g.clone()],
        ];
        let offs = [0, s, s + m];
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, blk) in row.iter().enumerate() {
                out.view_mut((offs[bi], offs[bj]), blk.shape()).copy_from(blk);
            }
        }
        out
    }

    pub fn kappa_kron(&self, params: &CondParams, norm: NormKind, cap: MemoryCap) -> Result<f64> {
        condnum::kappa_kron(&self.inner, params, norm, cap)
    }

    pub fn kappa2_kron(&self, params: &CondParams, cap: MemoryCap) -> Result<f64> {
        condnum::kappa2_kron(&self.inner, params, cap)
    }

    pub fn gram_form1(&self, params: &CondParams) -> Result<Matrix> {
        let p = &self.inner.problem;
        params.check(p.m(), p.n(), p.s())?;
        let w = params.scalars()?;
        let f = &self.inner.factors;
        let sol = &self.inner.solution;
        let n = p.n();
        let (phi2, psi2) = (w.phi * w.phi, w.psi * w.psi);
        let xx = sol.x.norm_squared();
        let zeta2 = w.beta * w.beta * xx + phi2;
        let gamma2 = w.vartheta * w.vartheta * xx + psi2;

        let mut s_mat = p.a.transpose() * &p.a * (zeta2 / (w.beta * w.beta * phi2));
        for i in 0..n {
            s_mat[(i, i)] += sol.lambda.norm_squared() / psi2 + sol.r.norm_squared() / phi2;
        }
        let lt = params.l.transpose();
        let lg = &lt * &f.g;
        let lu = &lt * &f.u;
        let gx = &lg * &sol.x;
        let ul = &lu * &sol.lambda;
        let mut gram = &lg * s_mat * lg.transpose();
        gram += (&gx * ul.transpose() + &ul * gx.transpose()) / psi2;
        gram += &lu * lu.transpose() * (gamma2 / (psi2 * w.vartheta * w.vartheta));
        Ok(densela::symmetrize(&gram) * (w.xi * w.xi))
    }

    pub fn kappa2_form1(&self, params: &CondParams) -> Result<f64> {
        Ok(densela::spectral_sym(&self.gram_form1(params)?).sqrt())
    }

    /// The `n × (m + 3n)` matrix `Q` of the second form (unweighted by `G`).
    pub fn q_matrix(&self, params: &CondParams) -> Result<Matrix> {
        let w = params.scalars()?;
        let sol = &self.inner.solution;
        let n = sol.x.len();
        let xn = sol.x.norm();
        if xn == 0.0 {
            return Err(EilsError::ZeroSolution);
        }
        let ln = sol.lambda.norm();
        let zeta = (w.beta * w.beta * xn * xn + w.phi * w.phi).sqrt();
        let gamma = (w.vartheta * w.vartheta * xn * xn + w.psi * w.psi).sqrt();
        let eye = Matrix::identity(n, n);
        densela::hstack(&[
            &(self.problem.a.transpose() * (zeta / (w.phi * w.beta))),
            &(&eye * (sol.r.norm() / w.phi)),
            &(&eye * (ln / gamma)),
            &(x_perp_projector(&sol.x) * (w.vartheta * ln * xn / (gamma * w.psi))),
        ])
    }

    /// `ξ L^T [M^{-1} P Q, γ/(Ψϑ) M^{-1}B^T N^{-1} + ϑ/(Ψγ) M^{-1} P x λ^T]`.
    pub fn form2_matrix(&self, params: &CondParams) -> Result<Matrix> {
        let p = &self.inner.problem;
        params.check(p.m(), p.n(), p.s())?;
        let w = params.scalars()?;
        let f = &self.inner.factors;
        let sol = &self.inner.solution;
        let q = self.q_matrix(params)?;
        let xn = sol.x.norm();
        let gamma = (w.vartheta * w.vartheta * xn * xn + w.psi * w.psi).sqrt();
        let lt = params.l.transpose();
        let left = &lt * &f.g * q;
        let right = &lt * (&f.u * (gamma / (w.psi * w.vartheta))
            + &f.g * &sol.x * sol.lambda.transpose() * (w.vartheta / (w.psi * gamma)));
        Ok(densela::hstack(&[&left, &right])? * w.xi)
    }

    pub fn kappa2_form2(&self, params: &CondParams, policy: ZeroSolutionPolicy) -> Result<f64> {
        match self.form2_matrix(params) {
            Ok(k) => Ok(densela::spectral(&k)),
            Err(EilsError::ZeroSolution) if policy == ZeroSolutionPolicy::FallbackToForm1 => {
                self.kappa2_form1(params)
            }
            Err(e) => Err(e),
        }
    }

    pub fn kappa_mixed(&self, l: &Matrix) -> Result<f64> {
        condnum::kappa_mixed(&self.inner, l)
    }

    pub fn kappa_comp(&self, l: &Matrix) -> Result<f64> {
        condnum::kappa_comp(&self.inner, l)
    }
}
