//! Weighted least squares, `min_x (b - Ax)^T W (b - Ax)` with `W` symmetric
//! positive definite.
//!
//! The compact 2-norm forms measure data perturbations in the weighted
//! product norm `‖vec(ΔA, Δb)‖` with weight `diag(I ⊗ W, W)`. That is the
//! same as right-multiplying the derivative by `diag(I ⊗ W^{-1/2}, W^{-1/2})`.

use super::{LsSolution, Unconstrained};
use crate::condnum::{kappa_kron_blocks, CondParams, MemoryCap, NormKind};
use crate::densela::{self, Matrix, Vector};
use crate::error::{EilsError, Result};

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WlsProblem {
    pub a: Matrix,
    pub b: Vector,
    pub w: Matrix,
    /// Symmetric square root of `W`.
    pub w_half: Matrix,
    /// Symmetric square root of `W^{-1}`.
    pub w_neg_half: Matrix,
}

impl WlsProblem {
    pub fn new(a: Matrix, b: Vector, w: Matrix) -> Result<Self> {
        let (m, n) = a.shape();
        if b.len() != m || w.shape() != (m, m) {
            return Err(EilsError::Shape(format!(
                "A is {m}x{n}, b has length {}, W is {:?}",
                b.len(),
                w.shape()
            )));
        }
        if n == 0 || m < n {
            return Err(EilsError::Dimension(format!("need m >= n >= 1, got m={m}, n={n}")));
        }
        densela::ensure_finite("A", a.as_slice())?;
        densela::ensure_finite("b", b.as_slice())?;
        densela::ensure_finite("W", w.as_slice())?;
        let asym = (&w - w.transpose()).amax();
        if asym > SYMMETRY_TOL * w.amax().max(1.0) {
            return Err(EilsError::AssumptionViolated(format!("W is not symmetric (defect {asym:.3e})")));
        }
        let w = densela::symmetrize(&w);
        if w.clone().cholesky().is_none() {
            return Err(EilsError::AssumptionViolated("W is not positive definite".into()));
        }
        let (ev, vecs) = densela::sym_eigen(&w)
            .ok_or_else(|| EilsError::AssumptionViolated("eigendecomposition of W failed".into()))?;
        let root = |f: fn(f64) -> f64| {
            let d = Matrix::from_diagonal(&Vector::from_iterator(ev.len(), ev.iter().map(|&e| f(e))));
            densela::symmetrize(&(&vecs * d * vecs.transpose()))
        };
        let w_half = root(f64::sqrt);
        let w_neg_half = root(|v| 1.0 / v.sqrt());
        Ok(Self { a, b, w, w_half, w_neg_half })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WlsAnalysis {
    pub problem: WlsProblem,
    pub core: Unconstrained,
}

/// `x = (A^T W A)^{-1} A^T W b`, `r = b - A x`.
pub fn wls_solve(p: &WlsProblem) -> Result<LsSolution> {
    Ok(WlsAnalysis::new(p.clone())?.core.solution)
}

/// `(A^T W A)^{-1} A^T W (Δb - ΔA x) + (A^T W A)^{-1} ΔA^T W r`.
pub fn wls_frechet(p: &WlsProblem, sol: &LsSolution, da: &Matrix, db: &Vector) -> Result<Vector> {
    let mut an = WlsAnalysis::new(p.clone())?;
    an.core.u = &p.w * &sol.r;
    an.core.solution = sol.clone();
    an.core.frechet(da, db)
}

impl WlsAnalysis {
    pub fn new(problem: WlsProblem) -> Result<Self> {
        let w = problem.w.clone();
        let core = Unconstrained::new(problem.a.clone(), problem.b.clone(), |x| x * &w)?;
        Ok(Self { problem, core })
    }

    pub fn solution(&self) -> &LsSolution {
        &self.core.solution
    }

    pub fn frechet(&self, da: &Matrix, db: &Vector) -> Result<Vector> {
        self.core.frechet(da, db)
    }

    /// `(A^T W A)^{-1} A^T W r`, which vanishes at the solution.
    pub fn cross_term(&self) -> Vector {
        &self.core.v * &self.core.solution.r
    }

    /// `‖r‖_W = (r^T W r)^{1/2}`.
    pub fn residual_w_norm(&self) -> f64 {
        self.core.solution.r.dot(&self.core.u).max(0.0).sqrt()
    }

    /// Generic form with plain Euclidean data norms.
    pub fn kappa_kron(&self, params: &CondParams, norm: NormKind, cap: MemoryCap) -> Result<f64> {
        self.core.kappa_kron(params, norm, cap)
    }

    /// Explicit 2-norm value under the weighted product norm.
    pub fn kappa2_kron(&self, params: &CondParams, cap: MemoryCap) -> Result<f64> {
        params.scalars()?;
        let blocks = self.core.checked_blocks(params)?.right_transform(&self.problem.w_neg_half);
        kappa_kron_blocks(&blocks, params, NormKind::Two, cap)
    }

    pub fn gram_form1(&self, params: &CondParams) -> Result<Matrix> {
        params.check(self.core.m_rows(), self.core.n(), 0)?;
        let w = params.scalars()?;
        let phi2 = w.phi * w.phi;
        let rw2 = self.residual_w_norm().powi(2);
        let xx = self.core.solution.x.norm_squared();
        let lg = params.l.transpose() * &self.core.m_inv;
        let inner = &self.core.m * (xx / phi2 + 1.0 / (w.beta * w.beta))
            + Matrix::identity(self.core.n(), self.core.n()) * (rw2 / phi2);
        Ok(densela::symmetrize(&(&lg * inner * lg.transpose())) * (w.xi * w.xi))
    }

    /// `‖ξ² L^T (‖r‖_W²/Φ² G^{-2} + (‖x‖²/Φ² + 1/β²) G^{-1}) L‖^{1/2}` with
    /// `G = A^T W A`.
    pub fn kappa2_form1(&self, params: &CondParams) -> Result<f64> {
        Ok(densela::spectral_sym(&self.gram_form1(params)?).sqrt())
    }

    /// `ξ L^T G^{-1} [‖r‖_W/Φ I, ζ/(Φβ) A^T W^{1/2}]`, shape `k × (n + m)`.
    pub fn form2_matrix(&self, params: &CondParams) -> Result<Matrix> {
        params.check(self.core.m_rows(), self.core.n(), 0)?;
        let w = params.scalars()?;
        let n = self.core.n();
        let xn = self.core.solution.x.norm();
        let zeta = (w.beta * w.beta * xn * xn + w.phi * w.phi).sqrt();
        let left = Matrix::identity(n, n) * (self.residual_w_norm() / w.phi);
        let right = self.problem.a.transpose() * &self.problem.w_half * (zeta / (w.phi * w.beta));
        let q = densela::hstack(&[&left, &right])?;
        Ok(params.l.transpose() * &self.core.m_inv * q * w.xi)
    }

    pub fn kappa2_form2(&self, params: &CondParams) -> Result<f64> {
        Ok(densela::spectral(&self.form2_matrix(params)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condnum::CondPreset;
    use crate::special::ils::{IlsAnalysis, IlsProblem};
    use crate::problem::SignatureMatrix;

    fn data() -> (Matrix, Vector) {
        (
            Matrix::from_row_slice(4, 2, &[1.0, 0.3, 0.2, 1.5, -0.4, 0.6, 0.9, -0.1]),
            Vector::from_column_slice(&[1.0, 2.0, -0.5, 0.7]),
        )
    }

    fn spd() -> Matrix {
        let c = Matrix::from_row_slice(
            4,
            4,
            &[1.0, 0.2, 0.0, 0.1, 0.3, 1.1, 0.2, 0.0, 0.0, 0.1, 0.8, 0.3, 0.2, 0.0, 0.1, 1.2],
        );
        &c * c.transpose() + Matrix::identity(4, 4) * 0.1
    }

    #[test]
    fn square_roots_are_consistent() {
        let (a, b) = data();
        let p = WlsProblem::new(a, b, spd()).unwrap();
        assert!((&p.w_half * &p.w_half - &p.w).amax() < 1e-12);
        assert!((&p.w_neg_half * &p.w_half - Matrix::identity(4, 4)).amax() < 1e-12);
        assert_eq!(p.w_half, p.w_half.transpose());
    }

    #[test]
    fn rejects_bad_weights() {
        let (a, b) = data();
        let mut w = spd();
        w[(0, 1)] += 1e-6;
        assert!(WlsProblem::new(a.clone(), b.clone(), w).is_err());
        let neg = Matrix::from_diagonal(&Vector::from_column_slice(&[1.0, 1.0, -1.0, 1.0]));
        assert!(matches!(WlsProblem::new(a, b, neg), Err(EilsError::AssumptionViolated(_))));
    }

    #[test]
    fn cross_term_vanishes() {
        let (a, b) = data();
        let an = WlsAnalysis::new(WlsProblem::new(a, b, spd()).unwrap()).unwrap();
        assert!(an.cross_term().norm() <= 1e-12 * an.solution().x.norm());
    }

    #[test]
    fn forms_agree() {
        let (a, b) = data();
        let an = WlsAnalysis::new(WlsProblem::new(a, b, spd()).unwrap()).unwrap();
        let l = Matrix::identity(2, 2);
        for params in [
            CondParams::unit(l.clone()),
            CondParams::scalar(l.clone(), 2.0, 1.0, 0.5, 1.0, 3.0),
            an.core.preset(CondPreset::NormwiseRelative2, l.clone()).unwrap(),
        ] {
            let k = an.kappa2_kron(&params, MemoryCap::default()).unwrap();
            let f1 = an.kappa2_form1(&params).unwrap();
            let f2 = an.kappa2_form2(&params).unwrap();
            assert!((f1 - k).abs() < 1e-10 * k, "{f1} {k}");
            assert!((f2 - k).abs() < 1e-10 * k, "{f2} {k}");
        }
    }

    #[test]
    fn identity_weight_matches_ils() {
        let (a, b) = data();
        let w = WlsAnalysis::new(WlsProblem::new(a.clone(), b.clone(), Matrix::identity(4, 4)).unwrap()).unwrap();
        let i = IlsAnalysis::new(IlsProblem::new(a, b, SignatureMatrix::identity(4)).unwrap()).unwrap();
        assert!((&w.solution().x - &i.solution().x).norm() < 1e-14);
        let params = CondParams::scalar(Matrix::identity(2, 2), 0.5, 1.0, 2.0, 1.0, 1.0);
        let kw = w.kappa2_form1(&params).unwrap();
        let ki = i.kappa2_form1(&params).unwrap();
        assert!((kw - ki).abs() < 1e-10 * ki);
    }

    #[test]
    fn upper_bounds_dominate() {
        let (a, b) = data();
        let an = WlsAnalysis::new(WlsProblem::new(a, b, spd()).unwrap()).unwrap();
        let l = Matrix::identity(2, 2);
        let m = an.core.kappa_mixed(&l).unwrap();
        let c = an.core.kappa_comp(&l).unwrap();
        assert!(an.core.upper_bound(CondPreset::MixedInf, &l).unwrap() >= m * (1.0 - 1e-12));
        assert!(an.core.upper_bound(CondPreset::ComponentwiseInf, &l).unwrap() >= c * (1.0 - 1e-12));
    }
}
