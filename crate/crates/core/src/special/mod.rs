//! Specializations of the constrained problem.
//!
//! * [`ils`]: no constraints, `min (b - Ax)^T J (b - Ax)`.
//! * [`wls`]: no constraints, symmetric positive definite weight `W`.
//! * [`els`]: constraints with `J = I`.
//!
//! The unconstrained cases share one derivative structure: with `P = -I` and
//! `λ = 0` the constrained derivative reduces to
//! `M^{-1} A^T H (Δb - ΔA x) + M^{-1} ΔA^T H r` where `H` is `J` or `W`.
//! [`Unconstrained`] holds the factors of that reduced form and exposes
//! them as [`DerivativeBlocks`] with `s = 0`, so the ∞-norm machinery of
//! [`crate::condnum`] applies without change.

pub mod els;
pub mod ils;
pub mod wls;

use crate::condnum::{
    kappa_inf_blocks, kappa_kron_blocks, upper_bound_blocks, CondParams, CondPreset,
    DerivativeBlocks, MemoryCap, NormKind, PresetData,
};
use crate::densela::{self, Matrix, Vector};
use crate::error::{EilsError, Result};

/// Solution of an unconstrained problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution {
    pub x: Vector,
    pub r: Vector,
}

/// Factors of an unconstrained problem with weighting matrix `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unconstrained {
    pub a: Matrix,
    pub b: Vector,
    pub solution: LsSolution,
    /// `M = A^T H A`
    pub m: Matrix,
    pub m_inv: Matrix,
    /// `M^{-1} A^T H`
    pub v: Matrix,
    /// `H r`
    pub u: Vector,
}

impl Unconstrained {
    /// `h_cols(X)` must return `X H` for an `n × m` matrix `X`.
    pub(crate) fn new(a: Matrix, b: Vector, h_cols: impl Fn(&Matrix) -> Matrix) -> Result<Self> {
        let at_h = h_cols(&a.transpose());
        let m = densela::symmetrize(&(&at_h * &a));
        let m_inv = m
            .clone()
            .lu()
            .try_inverse()
            .filter(|inv| inv.iter().all(|v| v.is_finite()))
            .map(|inv| densela::symmetrize(&inv))
            .ok_or_else(|| EilsError::AssumptionViolated("A^T H A is singular".into()))?;
        let v = &m_inv * &at_h;
        let mut x = &v * &b;
        // one refinement step on the normal equations
        let corr = &m_inv * (&at_h * (&b - &a * &x));
        x += corr;
        let r = &b - &a * &x;
        let u = h_cols(&Matrix::from_row_slice(1, r.len(), r.as_slice()))
            .row(0)
            .transpose();
        Ok(Self { a, b, solution: LsSolution { x, r }, m, m_inv, v, u })
    }

    pub fn m_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// `M^{-1} A^T H (Δb - ΔA x) + M^{-1} ΔA^T H r`.
    pub fn frechet(&self, da: &Matrix, db: &Vector) -> Result<Vector> {
        if da.shape() != self.a.shape() || db.len() != self.m_rows() {
            return Err(EilsError::Shape("perturbation does not match problem shape".into()));
        }
        Ok(&self.v * (db - da * &self.solution.x) + &self.m_inv * (da.transpose() * &self.u))
    }

    /// `M_F` blocks with `G = -M^{-1}`, `V = -M^{-1} A^T H`, `s = 0`.
    pub fn blocks(&self, l: &Matrix) -> DerivativeBlocks {
        let lt = l.transpose();
        DerivativeBlocks {
            lt_g: -(&lt * &self.m_inv),
            lt_v: -(&lt * &self.v),
            lt_u: Matrix::zeros(l.ncols(), 0),
            x: self.solution.x.clone(),
            u: self.u.clone(),
            lambda: Vector::zeros(0),
        }
    }

    pub fn preset(&self, preset: CondPreset, l: Matrix) -> Result<CondParams> {
        CondParams::from_preset_data(
            preset,
            PresetData { a: &self.a, b: None, b_vec: &self.b, d: None, x: &self.solution.x },
            l,
        )
    }

    pub fn checked_blocks(&self, params: &CondParams) -> Result<DerivativeBlocks> {
        params.check(self.m_rows(), self.n(), 0)?;
        Ok(self.blocks(&params.l))
    }

    /// Generic form `‖ξ ∘ (L^T [Γ_H, M^{-1}A^T H] diag(vec(Φ, β)^‡))‖`.
    pub fn kappa_kron(&self, params: &CondParams, norm: NormKind, cap: MemoryCap) -> Result<f64> {
        kappa_kron_blocks(&self.checked_blocks(params)?, params, norm, cap)
    }

    pub fn kappa_inf(&self, params: &CondParams) -> Result<f64> {
        Ok(kappa_inf_blocks(&self.checked_blocks(params)?, params))
    }

    pub fn kappa_mixed(&self, l: &Matrix) -> Result<f64> {
        self.kappa_inf(&self.preset(CondPreset::MixedInf, l.clone())?)
    }

    pub fn kappa_comp(&self, l: &Matrix) -> Result<f64> {
        self.kappa_inf(&self.preset(CondPreset::ComponentwiseInf, l.clone())?)
    }

    /// `|L^T M^{-1}| |A^‡‡|^T |H r| + |L^T M^{-1} A^T H| (|A^‡‡| |x| + |b^‡‡|)`,
    /// weighted as the preset prescribes.
    pub fn upper_bound(&self, preset: CondPreset, l: &Matrix) -> Result<f64> {
        let params = self.preset(preset, l.clone())?;
        Ok(upper_bound_blocks(&self.checked_blocks(&params)?, &params))
    }
}
