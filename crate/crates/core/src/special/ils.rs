//! Indefinite least squares, `min_x (b - Ax)^T J (b - Ax)`.

use super::{LsSolution, Unconstrained};
use crate::condnum::{x_perp_projector, CondParams, MemoryCap, NormKind, ZeroSolutionPolicy};
use crate::densela::{self, Matrix, Vector};
use crate::error::{EilsError, Result};
use crate::problem::{SignatureMatrix, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct IlsProblem {
    pub a: Matrix,
    pub b: Vector,
    pub j: SignatureMatrix,
}

impl IlsProblem {
    /// Requires `A^T J A` to be positive definite.
    pub fn new(a: Matrix, b: Vector, j: SignatureMatrix) -> Result<Self> {
        let (m, n) = a.shape();
        if b.len() != m || j.dim() != m {
            return Err(EilsError::Shape(format!(
                "A is {m}x{n}, b has length {}, J has order {}",
                b.len(),
                j.dim()
            )));
        }
        if n == 0 || m < n {
            return Err(EilsError::Dimension(format!("need m >= n >= 1, got m={m}, n={n}")));
        }
        densela::ensure_finite("A", a.as_slice())?;
        densela::ensure_finite("b", b.as_slice())?;
        let gram = densela::symmetrize(&(j.apply_cols(&a.transpose()) * &a));
        let min_eig = densela::sym_eigenvalues(&gram)[0];
        let scale = densela::spectral(&a).powi(2);
        if min_eig.is_nan() || min_eig <= DEFAULT_TOL * scale {
            return Err(EilsError::AssumptionViolated(format!(
                "A^T J A is not positive definite (smallest eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { a, b, j })
    }
}

/// A solved ILS problem.
#[derive(Debug, Clone, PartialEq)]
pub struct IlsAnalysis {
    pub problem: IlsProblem,
    pub core: Unconstrained,
}

/// `x = (A^T J A)^{-1} A^T J b`, `r = b - A x`.
pub fn ils_solve(p: &IlsProblem) -> Result<LsSolution> {
    Ok(IlsAnalysis::new(p.clone())?.core.solution)
}

/// First-order change of `x`: `M^{-1}A^T J(Δb - ΔA x) + M^{-1}ΔA^T J r`.
pub fn ils_frechet(p: &IlsProblem, sol: &LsSolution, da: &Matrix, db: &Vector) -> Result<Vector> {
    let mut an = IlsAnalysis::new(p.clone())?;
    an.core.solution = sol.clone();
    an.core.u = p.j.apply(&sol.r);
    an.core.frechet(da, db)
}

impl IlsAnalysis {
    pub fn new(problem: IlsProblem) -> Result<Self> {
        let j = problem.j;
        let core = Unconstrained::new(problem.a.clone(), problem.b.clone(), |x| j.apply_cols(x))?;
        Ok(Self { problem, core })
    }

    pub fn solution(&self) -> &LsSolution {
        &self.core.solution
    }

    pub fn frechet(&self, da: &Matrix, db: &Vector) -> Result<Vector> {
        self.core.frechet(da, db)
    }

    /// `M^{-1} A^T r`. It is the vector behind the cross term of the first
    /// compact form and does not vanish unless `J r ∈ null(A^T)` and
    /// `r ∈ null(A^T)` hold together.
    pub fn cross_term(&self) -> Vector {
        &self.core.m_inv * (self.problem.a.transpose() * &self.core.solution.r)
    }

    pub fn kappa_kron(&self, params: &CondParams, norm: NormKind, cap: MemoryCap) -> Result<f64> {
        self.core.kappa_kron(params, norm, cap)
    }

    pub fn kappa2_kron(&self, params: &CondParams, cap: MemoryCap) -> Result<f64> {
        params.scalars()?;
        self.kappa_kron(params, NormKind::Two, cap)
    }

    pub fn gram_form1(&self, params: &CondParams) -> Result<Matrix> {
        params.check(self.core.m_rows(), self.core.n(), 0)?;
        let w = params.scalars()?;
        let a = &self.problem.a;
        let LsSolution { x, r } = &self.core.solution;
        let phi2 = w.phi * w.phi;
        let zeta2 = w.beta * w.beta * x.norm_squared() + phi2;
        let atr = a.transpose() * r;
        let mut s = a.transpose() * a * (zeta2 / (phi2 * w.beta * w.beta));
        s -= (x * atr.transpose() + &atr * x.transpose()) / phi2;
        for i in 0..s.nrows() {
            s[(i, i)] += r.norm_squared() / phi2;
        }
        let lg = params.l.transpose() * &self.core.m_inv;
        Ok(densela::symmetrize(&(&lg * s * lg.transpose())) * (w.xi * w.xi))
    }

    pub fn kappa2_form1(&self, params: &CondParams) -> Result<f64> {
        Ok(densela::spectral_sym(&self.gram_form1(params)?).sqrt())
    }

    /// `ξ L^T M^{-1} [ζ/(Φβ) A^T - β/(ζΦ) x r^T, ‖r‖/ζ I, β‖r‖‖x‖/(ζΦ) P_x]`,
    /// shape `k × (2n + m)`.
    pub fn form2_matrix(&self, params: &CondParams) -> Result<Matrix> {
        params.check(self.core.m_rows(), self.core.n(), 0)?;
        let w = params.scalars()?;
        let a = &self.problem.a;
        let LsSolution { x, r } = &self.core.solution;
        let n = x.len();
        let (xn, rn) = (x.norm(), r.norm());
        if xn == 0.0 {
            return Err(EilsError::ZeroSolution);
        }
        let zeta = (w.beta * w.beta * xn * xn + w.phi * w.phi).sqrt();
        let q1 = a.transpose() * (zeta / (w.phi * w.beta)) - x * r.transpose() * (w.beta / (zeta * w.phi));
        let q2 = Matrix::identity(n, n) * (rn / zeta);
        let q3 = x_perp_projector(x) * (w.beta * rn * xn / (zeta * w.phi));
        let q = densela::hstack(&[&q1, &q2, &q3])?;
        Ok(params.l.transpose() * &self.core.m_inv * q * w.xi)
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
}
