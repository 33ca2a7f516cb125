//! Projected condition numbers.
//!
//! Everything here is expressed through the derivative matrix
//!
//! ```text
//! M_F = [ Γ, -Ω, -P^T M^{-1} A^T J, M^{-1} B^T N^{-1} ]
//! Γ   = x^T ⊗ (P^T M^{-1} A^T J) - (M^{-1} P) ⊗ (J r)^T
//! Ω   = (M^{-1} P) ⊗ λ^T + x^T ⊗ (M^{-1} B^T N^{-1})
//! ```
//!
//! whose columns follow `vec(ΔA, ΔB, Δb, Δd)`. The condition number for
//! weights `(Φ, Ψ, β, ϑ)` and output scaling `ξ_L` is
//! `‖ξ_L ∘ (L^T M_F diag(vec(Φ, Ψ, β, ϑ)^‡))‖`.
//!
//! [`DerivativeBlocks`] keeps `M_F` in factored form (`L^T M^{-1}P`,
//! `L^T P^T M^{-1}A^T J`, `L^T M^{-1}B^T N^{-1}`, `x`, `J r`, `λ`) so that the
//! ∞-norm quantities can be accumulated one Kronecker block at a time. The
//! same representation covers the unconstrained and weighted variants in
//! [`crate::special`] (with `s = 0`).

use crate::densela::{self, ddag, ddag2_abs_mat, ddag2_abs_vec, Matrix, Vector};
use crate::error::{EilsError, Result};
use crate::problem::EilsAnalysis;

/// Default limit on the number of entries of a materialized `L^T M_F`.
pub const DEFAULT_MEMORY_CAP: usize = 200_000_000;

/// Refuses Kronecker-form work whose dense matrix would exceed the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryCap(pub usize);

impl Default for MemoryCap {
    fn default() -> Self {
        Self(DEFAULT_MEMORY_CAP)
    }
}

impl MemoryCap {
    pub const ENV_VAR: &'static str = "EILSCOND_MEMORY_CAP";

    /// The default cap, overridden by `EILSCOND_MEMORY_CAP` when it parses.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| *v >= 0.0)
            .map_or_else(Self::default, |v| Self(v as usize))
    }

    pub fn check(&self, requested: usize) -> Result<()> {
        if requested > self.0 {
            Err(EilsError::MemoryGuard { requested, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

/// A weight given either as one positive number or entrywise.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Scalar(f64),
    Array(Matrix),
}

impl Weight {
    pub fn vector(v: &Vector) -> Self {
        Weight::Array(Matrix::from_column_slice(v.len(), 1, v.as_slice()))
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Weight::Scalar(w) => Some(*w),
            Weight::Array(_) => None,
        }
    }

    fn check(&self, name: &str, rows: usize, cols: usize) -> Result<()> {
        match self {
            Weight::Scalar(w) if w.is_finite() && *w > 0.0 => Ok(()),
            Weight::Scalar(w) => Err(EilsError::InvalidParams(format!(
                "{name} must be a positive finite number, got {w}"
            ))),
            Weight::Array(a) if a.shape() != (rows, cols) => Err(EilsError::InvalidParams(format!(
                "{name} is {:?}, expected {rows}x{cols}",
                a.shape()
            ))),
            Weight::Array(a) if a.iter().any(|v| *v == 0.0 || !v.is_finite()) => Err(
                EilsError::InvalidParams(format!("{name} has zero or non-finite entries")),
            ),
            Weight::Array(_) => Ok(()),
        }
    }

    /// `|w^‡|` laid out as a `rows × cols` matrix.
    fn abs_recip(&self, rows: usize, cols: usize) -> Matrix {
        match self {
            Weight::Scalar(w) => Matrix::repeat(rows, cols, ddag(*w).abs()),
            Weight::Array(a) => a.map(|v| ddag(v).abs()),
        }
    }

    /// Applies `w ∘ y` (row scaling when `w` is an array).
    fn scale_rows(&self, y: &mut Matrix) {
        match self {
            Weight::Scalar(w) => *y *= *w,
            Weight::Array(a) => {
                for (i, mut row) in y.row_iter_mut().enumerate() {
                    row *= a[(i, 0)];
                }
            }
        }
    }
}

/// The four classical weight choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondPreset {
    /// All data weights `1/‖(A, B, b, d)‖_F`, `ξ_L = 1/‖L^T x‖_2`.
    NormwiseRelative2,
    /// `Φ = A^‡, Ψ = B^‡, β = b^‡, ϑ = d^‡`, `ξ_L = 1/‖L^T x‖_∞`.
    MixedInf,
    /// Same data weights, `ξ_L = (L^T x)^‡`.
    ComponentwiseInf,
    /// Every weight equal to one.
    AbsoluteUnit,
}

impl CondPreset {
    pub fn has_scalar_weights(&self) -> bool {
        matches!(self, CondPreset::NormwiseRelative2 | CondPreset::AbsoluteUnit)
    }
}

/// Data needed to expand a preset. `b`/`d` are absent for problems
/// without constraints.
#[derive(Debug, Clone, Copy)]
pub struct PresetData<'a> {
    pub a: &'a Matrix,
    pub b: Option<&'a Matrix>,
    pub b_vec: &'a Vector,
    pub d: Option<&'a Vector>,
    pub x: &'a Vector,
}

/// Projection `L` and the weights `(Φ, Ψ, β, ϑ, ξ_L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondParams {
    pub l: Matrix,
    pub phi: Weight,
    pub psi: Weight,
    pub beta: Weight,
    pub vartheta: Weight,
    pub xi: Weight,
}

/// Positive scalar weights, unpacked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarWeights {
    pub phi: f64,
    pub psi: f64,
    pub beta: f64,
    pub vartheta: f64,
    pub xi: f64,
}

impl CondParams {
    pub fn unit(l: Matrix) -> Self {
        Self::scalar(l, 1.0, 1.0, 1.0, 1.0, 1.0)
    }

    pub fn scalar(l: Matrix, phi: f64, psi: f64, beta: f64, vartheta: f64, xi: f64) -> Self {
        Self {
            l,
            phi: Weight::Scalar(phi),
            psi: Weight::Scalar(psi),
            beta: Weight::Scalar(beta),
            vartheta: Weight::Scalar(vartheta),
            xi: Weight::Scalar(xi),
        }
    }

    pub fn from_preset(preset: CondPreset, an: &EilsAnalysis, l: Matrix) -> Result<Self> {
        let p = &an.problem;
        Self::from_preset_data(
            preset,
            PresetData {
                a: &p.a,
                b: Some(&p.b),
                b_vec: &p.b_vec,
                d: Some(&p.d),
                x: &an.solution.x,
            },
            l,
        )
    }

    pub fn from_preset_data(preset: CondPreset, data: PresetData<'_>, l: Matrix) -> Result<Self> {
        if l.nrows() != data.x.len() {
            return Err(EilsError::Shape(format!(
                "L has {} rows, solution has length {}",
                l.nrows(),
                data.x.len()
            )));
        }
        let ltx = l.transpose() * data.x;
        match preset {
            CondPreset::AbsoluteUnit => Ok(Self::unit(l)),
            CondPreset::NormwiseRelative2 => {
                let norm = (data.a.norm_squared()
                    + data.b.map_or(0.0, |b| b.norm_squared())
                    + data.b_vec.norm_squared()
                    + data.d.map_or(0.0, |d| d.norm_squared()))
                .sqrt();
                if norm == 0.0 {
                    return Err(EilsError::InvalidParams("all problem data are zero".into()));
                }
                let lx = ltx.norm();
                if lx == 0.0 {
                    return Err(EilsError::DegenerateProjection);
                }
                let w = 1.0 / norm;
                Ok(Self::scalar(l, w, w, w, w, 1.0 / lx))
            }
            CondPreset::MixedInf | CondPreset::ComponentwiseInf => {
                let xi = if preset == CondPreset::MixedInf {
                    let lx = densela::vecinf(&ltx);
                    if lx == 0.0 {
                        return Err(EilsError::DegenerateProjection);
                    }
                    Weight::Scalar(1.0 / lx)
                } else {
                    Weight::vector(&densela::ddag_vec(&ltx))
                };
                let bv = densela::ddag_vec(data.b_vec);
                Ok(Self {
                    l,
                    phi: Weight::Array(densela::ddag_mat(data.a)),
                    psi: data
                        .b
                        .map_or(Weight::Scalar(1.0), |b| Weight::Array(densela::ddag_mat(b))),
                    beta: Weight::vector(&bv),
                    vartheta: data
                        .d
                        .map_or(Weight::Scalar(1.0), |d| Weight::vector(&densela::ddag_vec(d))),
                    xi,
                })
            }
        }
    }

    pub fn k(&self) -> usize {
        self.l.ncols()
    }

    /// Checks `rank(L) = k` and the weight shapes/values for an
    /// `m×n` / `s×n` problem.
    pub fn check(&self, m: usize, n: usize, s: usize) -> Result<()> {
        let k = self.k();
        if self.l.nrows() != n || k == 0 || k > n {
            return Err(EilsError::InvalidParams(format!(
                "L must be {n}xk with 1 <= k <= {n}, got {:?}",
                self.l.shape()
            )));
        }
        if densela::rank(&self.l, 1e-12) != k {
            return Err(EilsError::InvalidParams("L does not have full column rank".into()));
        }
        self.phi.check("Phi", m, n)?;
        if s > 0 {
            self.psi.check("Psi", s, n)?;
            self.vartheta.check("vartheta", s, 1)?;
        }
        self.beta.check("beta", m, 1)?;
        self.xi.check("xi_L", k, 1)
    }

    /// The weights as positive scalars; array weights are refused.
    pub fn scalars(&self) -> Result<ScalarWeights> {
        match (
            self.phi.as_scalar(),
            self.psi.as_scalar(),
            self.beta.as_scalar(),
            self.vartheta.as_scalar(),
            self.xi.as_scalar(),
        ) {
            (Some(phi), Some(psi), Some(beta), Some(vartheta), Some(xi)) => {
                Ok(ScalarWeights { phi, psi, beta, vartheta, xi })
            }
            _ => Err(EilsError::InvalidParams(
                "compact 2-norm forms need scalar weights".into(),
            )),
        }
    }

    pub(crate) fn column_weights(&self, m: usize, n: usize, s: usize) -> ColumnWeights {
        ColumnWeights {
            a: self.phi.abs_recip(m, n),
            b: if s > 0 { self.psi.abs_recip(s, n) } else { Matrix::zeros(0, n) },
            b_vec: self.beta.abs_recip(m, 1).column(0).into_owned(),
            d: if s > 0 { self.vartheta.abs_recip(s, 1).column(0).into_owned() } else { Vector::zeros(0) },
        }
    }
}

/// Nonnegative column weights `|vec(Φ, Ψ, β, ϑ)^‡|`, block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnWeights {
    pub a: Matrix,
    pub b: Matrix,
    pub b_vec: Vector,
    pub d: Vector,
}

impl ColumnWeights {
    fn to_vec(&self) -> Vector {
        let parts = [self.a.as_slice(), self.b.as_slice(), self.b_vec.as_slice(), self.d.as_slice()];
        Vector::from_iterator(parts.iter().map(|p| p.len()).sum(), parts.into_iter().flatten().copied())
    }
}

/// `L^T M_F` in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBlocks {
    /// `L^T M^{-1} P`, `k × n`
    pub lt_g: Matrix,
    /// `L^T P^T M^{-1} A^T J`, `k × m`
    pub lt_v: Matrix,
    /// `L^T M^{-1} B^T N^{-1}`, `k × s`
    pub lt_u: Matrix,
    pub x: Vector,
    /// `J r` (or `W r` for weighted problems)
    pub u: Vector,
    pub lambda: Vector,
}

impl DerivativeBlocks {
    pub fn from_analysis(an: &EilsAnalysis, l: &Matrix) -> Self {
        let lt = l.transpose();
        Self {
            lt_g: &lt * &an.factors.g,
            lt_v: &lt * &an.factors.v,
            lt_u: &lt * &an.factors.u,
            x: an.solution.x.clone(),
            u: an.jr(),
            lambda: an.solution.lambda.clone(),
        }
    }

    pub fn k(&self) -> usize {
        self.lt_g.nrows()
    }
    pub fn m(&self) -> usize {
        self.lt_v.ncols()
    }
    pub fn n(&self) -> usize {
        self.lt_g.ncols()
    }
    pub fn s(&self) -> usize {
        self.lt_u.ncols()
    }

    /// Number of columns of `M_F`, `(n + 1)(m + s)`.
    pub fn ncols(&self) -> usize {
        (self.n() + 1) * (self.m() + self.s())
    }

    /// Materializes `L^T M_F`, shape `k × (n+1)(m+s)`.
    pub fn dense(&self, cap: MemoryCap) -> Result<Matrix> {
        cap.check(self.k().saturating_mul(self.ncols()))?;
        let xt = Matrix::from_row_slice(1, self.n(), self.x.as_slice());
        let ut = Matrix::from_row_slice(1, self.m(), self.u.as_slice());
        let lt = Matrix::from_row_slice(1, self.s(), self.lambda.as_slice());
        let gamma = densela::kron(&xt, &self.lt_v) - densela::kron(&self.lt_g, &ut);
        let omega = densela::kron(&self.lt_g, &lt) + densela::kron(&xt, &self.lt_u);
        densela::hstack(&[&gamma, &(-omega), &(-&self.lt_v), &self.lt_u])
    }

    /// `ξ ∘ (L^T M_F diag(vec(Φ, Ψ, β, ϑ)^‡))`.
    pub fn weighted_dense(&self, params: &CondParams, cap: MemoryCap) -> Result<Matrix> {
        let mut x = self.dense(cap)?;
        let w = signed_column_weights(params, self.m(), self.n(), self.s());
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col *= w[j];
        }
        params.xi.scale_rows(&mut x);
        Ok(x)
    }

    /// `|L^T M_F| c` for nonnegative column weights `c`, without forming
    /// `M_F`. Each Kronecker column is rebuilt on the fly.
    pub fn abs_apply(&self, c: &ColumnWeights) -> Vector {
        let (k, m, n, s) = (self.k(), self.m(), self.n(), self.s());
        let mut y = Vector::zeros(k);
        let mut col = Vector::zeros(k);
        for j in 0..n {
            let xj = self.x[j];
            let gj = self.lt_g.column(j);
            for i in 0..m {
                let w = c.a[(i, j)];
                let ui = self.u[i];
                let vi = self.lt_v.column(i);
                for r in 0..k {
                    col[r] = xj * vi[r] - gj[r] * ui;
                }
                y.zip_apply(&col, |acc, v| *acc += v.abs() * w);
            }
            for i in 0..s {
                let w = c.b[(i, j)];
                let li = self.lambda[i];
                let ui = self.lt_u.column(i);
                for r in 0..k {
                    col[r] = gj[r] * li + xj * ui[r];
                }
                y.zip_apply(&col, |acc, v| *acc += v.abs() * w);
            }
        }
        y += self.lt_v.abs() * &c.b_vec;
        y += self.lt_u.abs() * &c.d;
        y
    }

    /// Kronecker-free majorant of `|L^T M_F| c`:
    ///
    /// ```text
    /// |L^T U|(c_d + C_B|x|) + |L^T V|(c_b + C_A|x|) + |L^T G|(C_B^T|λ| + C_A^T|u|)
    /// ```
    pub fn abs_upper_bound(&self, c: &ColumnWeights) -> Vector {
        let ax = self.x.abs();
        let mut y = self.lt_v.abs() * (&c.b_vec + &c.a * &ax);
        y += self.lt_g.abs() * (c.a.transpose() * self.u.abs() + c.b.transpose() * self.lambda.abs());
        if self.s() > 0 {
            y += self.lt_u.abs() * (&c.d + &c.b * &ax);
        }
        y
    }

    /// Unweighted right-multiplication of the `ΔA` and `Δb` blocks by
    /// `I ⊗ R` and `R` (with `R` symmetric), which amounts to
    /// `L^T V ← L^T V R` and `u ← R u`.
    pub fn right_transform(&self, r: &Matrix) -> Self {
        Self {
            lt_v: &self.lt_v * r,
            u: r * &self.u,
            ..self.clone()
        }
    }
}

/// `vec(Φ, Ψ, β, ϑ)^‡` with signs kept.
fn signed_column_weights(params: &CondParams, m: usize, n: usize, s: usize) -> Vector {
    let block = |w: &Weight, rows: usize, cols: usize| -> Matrix {
        match w {
            Weight::Scalar(v) => Matrix::repeat(rows, cols, ddag(*v)),
            Weight::Array(a) => a.map(ddag),
        }
    };
    ColumnWeights {
        a: block(&params.phi, m, n),
        b: if s > 0 { block(&params.psi, s, n) } else { Matrix::zeros(0, n) },
        b_vec: block(&params.beta, m, 1).column(0).into_owned(),
        d: if s > 0 { block(&params.vartheta, s, 1).column(0).into_owned() } else { Vector::zeros(0) },
    }
    .to_vec()
}

/// Which induced norm the generic form uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `η = ν = 2` (Frobenius on the data)
    Two,
    /// `η = ν = ∞` (max-norm on the data)
    Inf,
}

/// Generic form: materializes the weighted `L^T M_F` and takes its norm.
pub fn kappa_kron_blocks(
    blocks: &DerivativeBlocks,
    params: &CondParams,
    norm: NormKind,
    cap: MemoryCap,
) -> Result<f64> {
    let x = blocks.weighted_dense(params, cap)?;
    Ok(match norm {
        NormKind::Two => densela::spectral(&x),
        NormKind::Inf => densela::inf_norm(&x),
    })
}

/// Exact ∞-norm value `‖ |ξ| ∘ (|L^T M_F| |vec(Φ,Ψ,β,ϑ)^‡|) ‖_∞`.
pub fn kappa_inf_blocks(blocks: &DerivativeBlocks, params: &CondParams) -> f64 {
    let c = params.column_weights(blocks.m(), blocks.n(), blocks.s());
    let y = blocks.abs_apply(&c);
    inf_of_scaled(&params.xi, y)
}

/// Upper bound obtained from [`DerivativeBlocks::abs_upper_bound`].
pub fn upper_bound_blocks(blocks: &DerivativeBlocks, params: &CondParams) -> f64 {
    let c = params.column_weights(blocks.m(), blocks.n(), blocks.s());
    inf_of_scaled(&params.xi, blocks.abs_upper_bound(&c))
}

fn inf_of_scaled(xi: &Weight, y: Vector) -> f64 {
    let mut y = Matrix::from_column_slice(y.len(), 1, y.as_slice()).abs();
    match xi {
        Weight::Scalar(w) => y *= w.abs(),
        Weight::Array(a) => y.zip_apply(a, |v, w| *v *= w.abs()),
    }
    densela::max_norm(&y)
}

fn checked(an: &EilsAnalysis, params: &CondParams) -> Result<DerivativeBlocks> {
    let p = &an.problem;
    params.check(p.m(), p.n(), p.s())?;
    Ok(DerivativeBlocks::from_analysis(an, &params.l))
}

/// `L^T M_F`, shape `k × (n+1)(m+s)`.
pub fn build_mf(an: &EilsAnalysis, l: &Matrix, cap: MemoryCap) -> Result<Matrix> {
    let p = &an.problem;
    if l.nrows() != p.n() || l.ncols() == 0 || l.ncols() > p.n() {
        return Err(EilsError::InvalidParams(format!("L has shape {:?}", l.shape())));
    }
    DerivativeBlocks::from_analysis(an, l).dense(cap)
}

/// Generic form for either norm pair; accepts array weights.
pub fn kappa_kron(an: &EilsAnalysis, params: &CondParams, norm: NormKind, cap: MemoryCap) -> Result<f64> {
    kappa_kron_blocks(&checked(an, params)?, params, norm, cap)
}

/// 2-norm value from the explicit Kronecker matrix (scalar weights).
pub fn kappa2_kron(an: &EilsAnalysis, params: &CondParams, cap: MemoryCap) -> Result<f64> {
    params.scalars()?;
    kappa_kron(an, params, NormKind::Two, cap)
}

/// The `k × k` matrix `ξ_L^2 L^T M_pa M_pa^T L`, assembled without Kronecker
/// products.
pub fn gram_form1(an: &EilsAnalysis, params: &CondParams) -> Result<Matrix> {
    let blocks = checked(an, params)?;
    let w = params.scalars()?;
    let p = &an.problem;
    let sol = &an.solution;
    let n = p.n();

    let xx = sol.x.norm_squared();
    let rr = sol.r.norm_squared();
    let ll = sol.lambda.norm_squared();
    let (phi2, psi2) = (w.phi * w.phi, w.psi * w.psi);
    let atr = p.a.transpose() * &sol.r;
    let ata = p.a.transpose() * &p.a;

    let mut s_mat = ata * (xx / phi2 + 1.0 / (w.beta * w.beta));
    s_mat -= (&sol.x * atr.transpose() + &atr * sol.x.transpose()) / phi2;
    for i in 0..n {
        s_mat[(i, i)] += ll / psi2 + rr / phi2;
    }

    let lt_g = &blocks.lt_g;
    let lt_u = &blocks.lt_u;
    let gx = lt_g * &sol.x;
    let ul = lt_u * &sol.lambda;
    let mut gram = lt_g * s_mat * lt_g.transpose();
    gram += (&gx * ul.transpose() + &ul * gx.transpose()) / psi2;
    gram += lt_u * lt_u.transpose() * (xx / psi2 + 1.0 / (w.vartheta * w.vartheta));
    Ok(densela::symmetrize(&gram) * (w.xi * w.xi))
}

/// Compact form `‖ξ_L^2 L^T M_pa M_pa^T L‖_2^{1/2}`.
pub fn kappa2_form1(an: &EilsAnalysis, params: &CondParams) -> Result<f64> {
    Ok(densela::spectral_sym(&gram_form1(an, params)?).sqrt())
}

/// What [`kappa2_form2`] does when `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroSolutionPolicy {
    #[default]
    Error,
    /// Return the first compact form instead.
    FallbackToForm1,
}

/// `ξ_L L^T [M^{-1}P Q, (γ/(Ψϑ)) M^{-1}B^T N^{-1} + (ϑ/(Ψγ)) M^{-1}P x λ^T]`,
/// shape `k × (4n + m + s)`.
pub fn form2_matrix(an: &EilsAnalysis, params: &CondParams) -> Result<Matrix> {
    let blocks = checked(an, params)?;
    let w = params.scalars()?;
    let p = &an.problem;
    let sol = &an.solution;
    let (m, n) = (p.m(), p.n());

    let xn = sol.x.norm();
    if xn == 0.0 {
        return Err(EilsError::ZeroSolution);
    }
    let rn = sol.r.norm();
    let ln = sol.lambda.norm();
    let zeta = (w.beta * w.beta * xn * xn + w.phi * w.phi).sqrt();
    let gamma = (w.vartheta * w.vartheta * xn * xn + w.psi * w.psi).sqrt();
    let px = x_perp_projector(&sol.x);
    let eye = Matrix::identity(n, n);

    let q1 = p.a.transpose() * (zeta / (w.phi * w.beta))
        - &sol.x * sol.r.transpose() * (w.beta / (zeta * w.phi));
    let q2 = &eye * (rn / zeta);
    let q3 = &px * (w.beta * rn * xn / (zeta * w.phi));
    let q4 = &eye * (ln / gamma);
    let q5 = &px * (w.vartheta * ln * xn / (gamma * w.psi));
    let q = densela::hstack(&[&q1, &q2, &q3, &q4, &q5])?;
    debug_assert_eq!(q.ncols(), m + 4 * n);

    let left = &blocks.lt_g * q;
    let right = &blocks.lt_u * (gamma / (w.psi * w.vartheta))
        + (&blocks.lt_g * &sol.x) * sol.lambda.transpose() * (w.vartheta / (w.psi * gamma));
    Ok(densela::hstack(&[&left, &right])? * w.xi)
}

/// Compact form built from the `k × (4n + m + s)` factor.
pub fn kappa2_form2(an: &EilsAnalysis, params: &CondParams, policy: ZeroSolutionPolicy) -> Result<f64> {
    match form2_matrix(an, params) {
        Ok(k) => Ok(densela::spectral(&k)),
        Err(EilsError::ZeroSolution) if policy == ZeroSolutionPolicy::FallbackToForm1 => {
            kappa2_form1(an, params)
        }
        Err(e) => Err(e),
    }
}

/// `I - x x^T / ‖x‖²`.
pub fn x_perp_projector(x: &Vector) -> Matrix {
    let n = x.len();
    Matrix::identity(n, n) - x * x.transpose() / x.norm_squared()
}

/// Exact ∞-norm condition number, accumulated block by block.
pub fn kappa_inf(an: &EilsAnalysis, params: &CondParams) -> Result<f64> {
    Ok(kappa_inf_blocks(&checked(an, params)?, params))
}

/// The same quantity from the explicitly weighted matrix
/// `ξ ∘ (L^T M_F diag(vec(Φ,Ψ,β,ϑ)^‡))`.
pub fn kappa_inf_dense(an: &EilsAnalysis, params: &CondParams, cap: MemoryCap) -> Result<f64> {
    kappa_kron(an, params, NormKind::Inf, cap)
}

/// Projected mixed condition number.
pub fn kappa_mixed(an: &EilsAnalysis, l: &Matrix) -> Result<f64> {
    let params = CondParams::from_preset(CondPreset::MixedInf, an, l.clone())?;
    kappa_inf(an, &params)
}

/// Projected componentwise condition number.
pub fn kappa_comp(an: &EilsAnalysis, l: &Matrix) -> Result<f64> {
    let params = CondParams::from_preset(CondPreset::ComponentwiseInf, an, l.clone())?;
    kappa_inf(an, &params)
}

/// `M_mc^Ubd` for the mixed/componentwise data weights.
pub fn mixed_upper_bound_vector(an: &EilsAnalysis, l: &Matrix) -> Result<Vector> {
    let p = &an.problem;
    let blocks = DerivativeBlocks::from_analysis(an, l);
    let c = ColumnWeights {
        a: ddag2_abs_mat(&p.a),
        b: ddag2_abs_mat(&p.b),
        b_vec: ddag2_abs_vec(&p.b_vec),
        d: ddag2_abs_vec(&p.d),
    };
    Ok(blocks.abs_upper_bound(&c))
}

pub fn upper_bound_mixed(an: &EilsAnalysis, l: &Matrix) -> Result<f64> {
    let params = CondParams::from_preset(CondPreset::MixedInf, an, l.clone())?;
    Ok(upper_bound_blocks(&checked(an, &params)?, &params))
}

pub fn upper_bound_comp(an: &EilsAnalysis, l: &Matrix) -> Result<f64> {
    let params = CondParams::from_preset(CondPreset::ComponentwiseInf, an, l.clone())?;
    Ok(upper_bound_blocks(&checked(an, &params)?, &params))
}
