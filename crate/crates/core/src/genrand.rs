//! Seeded random problem generator and componentwise perturbations.
//!
//! Problems are built as
//!
//! ```text
//! A = H D [Q_2; Q_1],    B = [K, 0] [Q_1; Q_2] = K Q_1
//! ```
//!
//! with `H` J-orthogonal, `D` an `m × n` diagonal with geometrically spaced
//! entries from `κ_A` down to 1, `Q` Haar orthogonal (`Q_1` its first `s`
//! rows) and `K` lower triangular with prescribed condition number.
//!
//! # Random streams
//!
//! Every draw comes from ChaCha20 seeded with the 64-bit seed; each matrix
//! uses its own stream number, so changing one dimension does not reshuffle
//! unrelated factors. Identical seeds give bit-identical problems on one
//! platform. Across platforms only value agreement (to about `1e-15`
//! relative) should be expected, since the dense kernels may round
//! differently. No attempt is made to reproduce any other generator's
//! sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::densela::{self, Matrix, Vector};
use crate::error::{EilsError, Result};
use crate::problem::{lagrange_multipliers, validate, DataDelta, EilsProblem, SignatureMatrix, DEFAULT_TOL};

/// Hyperbolic angle cap giving `κ(H) ≤ 10`.
pub const DEFAULT_HYPERBOLIC_CAP: f64 = std::f64::consts::LN_10 / 2.0;

const MAX_ATTEMPTS: u64 = 10;
const STREAMS_PER_ATTEMPT: u64 = 8;

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn gaussian_vector(rng: &mut impl Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix, with the signs of `R`'s diagonal moved into `Q`.
pub fn orthogonal_from<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

pub fn gen_orthogonal(n: usize, seed: u64) -> Matrix {
    orthogonal_from(&mut rng_for(seed, 0), n)
}

/// `diag(U_1, U_2) R(θ) diag(V_1, V_2)` where `R` applies the hyperbolic
/// rotation `[[cosh θ_i, sinh θ_i], [sinh θ_i, cosh θ_i]]` to the index pair
/// `(i, p + i)` and `θ_i` is uniform on `[0, cap]`. Satisfies `H^T J H = J`
/// for `J = diag(I_p, -I_q)` and `κ(H) ≤ exp(2 cap)`.
pub fn j_orthogonal_from(rng: &mut impl Rng, p: usize, q: usize, cap: f64) -> Matrix {
    let m = p + q;
    let block_orth = |rng: &mut dyn rand::RngCore| {
        let mut out = Matrix::zeros(m, m);
        out.view_mut((0, 0), (p, p)).copy_from(&orthogonal_from(rng, p));
        out.view_mut((p, p), (q, q)).copy_from(&orthogonal_from(rng, q));
        out
    };
    let left = block_orth(rng);
    let right = block_orth(rng);
    let mut hyp = Matrix::identity(m, m);
    for i in 0..p.min(q) {
        let theta = if cap > 0.0 { rng.random_range(0.0..=cap) } else { 0.0 };
        let (c, s) = (theta.cosh(), theta.sinh());
        let k = p + i;
        hyp[(i, i)] = c;
        hyp[(k, k)] = c;
        hyp[(i, k)] = s;
        hyp[(k, i)] = s;
    }
    left * hyp * right
}

pub fn gen_j_orthogonal(p: usize, q: usize, seed: u64, hyperbolic_angle_cap: f64) -> Matrix {
    j_orthogonal_from(&mut rng_for(seed, 0), p, q, hyperbolic_angle_cap)
}

/// `m × n` diagonal with `d_i = κ^{(n-1-i)/(n-1)}`, `i = 0..n-1`.
pub fn gen_geometric_diag(m: usize, n: usize, kappa: f64) -> Matrix {
    let mut d = Matrix::zeros(m, n);
    for i in 0..n.min(m) {
        d[(i, i)] = geometric_value(i, n, kappa);
    }
    d
}

fn geometric_value(i: usize, n: usize, kappa: f64) -> f64 {
    if n <= 1 {
        kappa
    } else {
        kappa.powf((n - 1 - i) as f64 / (n - 1) as f64)
    }
}

/// Lower triangular `K` with the given singular values: `X = U Σ V^T`,
/// `X^T = Q R`, `K = R^T`.
pub fn tri_with_singular_values(rng: &mut impl Rng, sv: &[f64]) -> Matrix {
    let s = sv.len();
    let u = orthogonal_from(rng, s);
    let v = orthogonal_from(rng, s);
    let x = u * Matrix::from_diagonal(&Vector::from_column_slice(sv)) * v.transpose();
    let mut k = x.transpose().qr().r().transpose();
    for i in 0..s {
        for j in i + 1..s {
            k[(i, j)] = 0.0;
        }
    }
    k
}

pub fn gen_tri_cond(s: usize, kappa_b: f64, seed: u64) -> Matrix {
    let sv: Vec<f64> = (0..s).map(|i| geometric_value(i, s, kappa_b)).collect();
    tri_with_singular_values(&mut rng_for(seed, 0), &sv)
}

/// Parameters of one random problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    /// Positive part of the signature.
    pub p: usize,
    /// Negative part of the signature.
    pub q: usize,
    pub n: usize,
    pub s: usize,
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// `‖r‖_2`
    pub omega: f64,
    /// Decimal exponent used by [`GeneratedProblem::scaled`].
    pub tau: f64,
    pub seed: u64,
    pub hyperbolic_cap: f64,
}

impl GenSpec {
    pub fn new(p: usize, q: usize, n: usize, s: usize) -> Self {
        Self {
            p,
            q,
            n,
            s,
            kappa_a: 10.0,
            kappa_b: 1.0,
            omega: 1e-9,
            tau: 0.0,
            seed: 2018,
            hyperbolic_cap: DEFAULT_HYPERBOLIC_CAP,
        }
    }

    pub fn m(&self) -> usize {
        self.p + self.q
    }

    pub fn check(&self) -> Result<()> {
        let m = self.m();
        if !(self.s >= 1 && self.s <= self.n && self.n <= m) {
            return Err(EilsError::InvalidParams(format!(
                "need 1 <= s <= n <= m, got s={}, n={}, m={m}",
                self.s, self.n
            )));
        }
        if self.p + self.s < self.n {
            return Err(EilsError::InvalidParams(format!(
                "need p >= n - s, got p={}, n-s={}",
                self.p,
                self.n - self.s
            )));
        }
        let finite_ge = |v: f64, lo: f64| v.is_finite() && v >= lo;
        if !finite_ge(self.kappa_a, 1.0) || !finite_ge(self.kappa_b, 1.0) {
            return Err(EilsError::InvalidParams("condition targets must be >= 1".into()));
        }
        if !finite_ge(self.omega, 0.0) || !finite_ge(self.hyperbolic_cap, 0.0) || !self.tau.is_finite() {
            return Err(EilsError::InvalidParams("omega and the angle cap must be >= 0".into()));
        }
        Ok(())
    }
}

/// A generated problem with its exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProblem {
    pub spec: GenSpec,
    pub problem: EilsProblem,
    pub x_true: Vector,
    pub lambda_true: Vector,
    pub r_true: Vector,
    /// The J-orthogonal factor of `A`.
    pub h: Matrix,
    /// The triangular factor of `B`.
    pub k: Matrix,
    /// Stream offset of the attempt that passed validation.
    pub attempt: u64,
}

impl GeneratedProblem {
    /// The problem after [`scale_problem`] with the generator's `τ`.
    pub fn scaled(&self) -> Result<EilsProblem> {
        if self.spec.tau == 0.0 {
            Ok(self.problem.clone())
        } else {
            scale_problem(&self.problem, self.spec.tau)
        }
    }
}

/// Builds a problem whose exact solution `x_true` lies in `range(Q_2^T)`.
///
/// The residual is drawn as `r = H J y` with `y` Gaussian and zero in its
/// first `n - s` entries, rescaled to `‖r‖ = ω`. Then `A^T J r` lies in
/// `range(B^T)`, so `x_true` solves the generated problem exactly and
/// `λ_true = -(B B^T)^{-1} B A^T J r`. Since `x_true ⊥ range(Q_1^T)`, the
/// right-hand side `d = B x_true` is zero up to rounding.
pub fn gen_problem(spec: &GenSpec) -> Result<GeneratedProblem> {
    spec.check()?;
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        match gen_attempt(spec, attempt) {
            Ok(g) => return Ok(g),
            Err(e) => last = e.to_string(),
        }
    }
    Err(EilsError::AssumptionViolated(format!(
        "no valid problem after {MAX_ATTEMPTS} attempts: {last}"
    )))
}

fn gen_attempt(spec: &GenSpec, attempt: u64) -> Result<GeneratedProblem> {
    let (p, q, n, s, m) = (spec.p, spec.q, spec.n, spec.s, spec.m());
    let stream = |i: u64| rng_for(spec.seed, attempt * STREAMS_PER_ATTEMPT + i);

    let qm = orthogonal_from(&mut stream(0), n);
    let q1 = qm.rows(0, s).into_owned();
    let q2 = qm.rows(s, n - s).into_owned();
    let mut stacked = Matrix::zeros(n, n);
    stacked.rows_mut(0, n - s).copy_from(&q2);
    stacked.rows_mut(n - s, s).copy_from(&q1);

    let h = j_orthogonal_from(&mut stream(1), p, q, spec.hyperbolic_cap);
    let a = &h * gen_geometric_diag(m, n, spec.kappa_a) * stacked;

    let sv: Vec<f64> = (0..s).map(|i| geometric_value(i, s, spec.kappa_b)).collect();
    let k = tri_with_singular_values(&mut stream(2), &sv);
    let b = &k * &q1;

    let x_true = if n > s {
        let z = gaussian_vector(&mut stream(3), n - s);
        let x = q2.transpose() * z;
        let nx = x.norm();
        x / nx
    } else {
        Vector::zeros(n)
    };
    let d = &b * &x_true;

    let j = SignatureMatrix::new(p, q);
    let mut y = gaussian_vector(&mut stream(4), m);
    y.rows_mut(0, n - s).fill(0.0);
    let mut r_true = &h * j.apply(&y);
    let rn = r_true.norm();
    if spec.omega == 0.0 || rn == 0.0 {
        r_true.fill(0.0);
    } else {
        r_true *= spec.omega / rn;
    }
    let b_vec = &a * &x_true + &r_true;

    let problem = EilsProblem::new(a, b, b_vec, d, j)?;
    let report = validate(&problem, DEFAULT_TOL);
    if let Some(why) = report.failure() {
        return Err(EilsError::AssumptionViolated(why));
    }
    let lambda_true = lagrange_multipliers(&problem, &r_true)?;
    Ok(GeneratedProblem { spec: *spec, problem, x_true, lambda_true, r_true, h, k, attempt })
}

/// Multiplies the last three columns of `A` by `10^{-τ}` and the first three
/// rows of `B` by `10^{τ}`.
pub fn scale_problem(prob: &EilsProblem, tau: f64) -> Result<EilsProblem> {
    let (n, s) = (prob.n(), prob.s());
    if n < 3 || s < 3 {
        return Err(EilsError::Dimension(format!("scaling needs n >= 3 and s >= 3, got n={n}, s={s}")));
    }
    let cols: Vec<usize> = (n - 3..n).collect();
    let rows: Vec<usize> = (0..3).collect();
    scale_problem_with(prob, tau, &cols, &rows)
}

/// Multiplies the given columns of `A` by `10^{-τ}` and rows of `B` by `10^{τ}`.
pub fn scale_problem_with(prob: &EilsProblem, tau: f64, a_cols: &[usize], b_rows: &[usize]) -> Result<EilsProblem> {
    if a_cols.iter().any(|&c| c >= prob.n()) || b_rows.iter().any(|&r| r >= prob.s()) {
        return Err(EilsError::Dimension("scaling index out of range".into()));
    }
    let f = 10f64.powf(tau);
    let mut a = prob.a.clone();
    let mut b = prob.b.clone();
    for &c in a_cols {
        a.column_mut(c).unscale_mut(f);
    }
    for &r in b_rows {
        b.row_mut(r).scale_mut(f);
    }
    EilsProblem::new(a, b, prob.b_vec.clone(), prob.d.clone(), prob.j)
}

/// Relative perturbation size `ε` and the seed for the masks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub seed: u64,
}

/// Size of a data perturbation relative to the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardMeasures {
    /// `‖(ΔA, ΔB, Δb, Δd)‖_F / ‖(A, B, b, d)‖_F`
    pub rel_frobenius: f64,
    /// `max |Δ| |data^‡|` over all entries
    pub rel_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbed {
    pub problem: EilsProblem,
    pub delta: DataDelta,
    pub measures: BackwardMeasures,
}

/// `ΔA = ε E∘A`, `ΔB = ε F∘B`, `Δb = ε g∘b`, `Δd = ε h∘d` with masks uniform
/// on `[-1, 1]`.
pub fn perturb(prob: &EilsProblem, pspec: &PerturbationSpec) -> Result<Perturbed> {
    if !pspec.epsilon.is_finite() || pspec.epsilon < 0.0 {
        return Err(EilsError::InvalidParams("epsilon must be finite and >= 0".into()));
    }
    let mut rng = rng_for(pspec.seed, 0);
    let eps = pspec.epsilon;
    let mut mask = |x: &Matrix| x.map(|v| eps * rng.random_range(-1.0..=1.0) * v);
    let da = mask(&prob.a);
    let db = mask(&prob.b);
    let dbv = mask(&Matrix::from_column_slice(prob.m(), 1, prob.b_vec.as_slice()));
    let dd = mask(&Matrix::from_column_slice(prob.s(), 1, prob.d.as_slice()));
    let delta = DataDelta {
        a: da,
        b: db,
        b_vec: dbv.column(0).into_owned(),
        d: dd.column(0).into_owned(),
    };
    let measures = backward_measures(prob, &delta);
    let problem = delta.apply_to(prob, 1.0)?;
    Ok(Perturbed { problem, delta, measures })
}

pub fn backward_measures(prob: &EilsProblem, delta: &DataDelta) -> BackwardMeasures {
    let data_norm = prob.data_norm();
    let rel_frobenius = if data_norm == 0.0 { 0.0 } else { delta.frobenius() / data_norm };
    let pairs = [
        (delta.a.as_slice(), prob.a.as_slice()),
        (delta.b.as_slice(), prob.b.as_slice()),
        (delta.b_vec.as_slice(), prob.b_vec.as_slice()),
        (delta.d.as_slice(), prob.d.as_slice()),
    ];
    let rel_max = pairs
        .iter()
        .flat_map(|(d, x)| d.iter().zip(x.iter()))
        .map(|(d, x)| (d * densela::ddag(*x)).abs())
        .fold(0.0, f64::max);
    BackwardMeasures { rel_frobenius, rel_max }
}

/// `n × 1` projection with nonnegative entries summing to one, i.e. a
/// random convex combination of the solution entries.
pub fn convex_row(n: usize, seed: u64) -> Matrix {
    let mut rng = rng_for(seed, 0);
    let w = Matrix::from_fn(n, 1, |_, _| rng.random_range(0.0..1.0) + f64::MIN_POSITIVE);
    let total = w.sum();
    w / total
}

/// Forward errors of `x̂` against `x` after projection by `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrors {
    /// `‖L^T(x̂ - x)‖_2 / ‖L^T x‖_2`
    pub normwise: f64,
    /// `‖L^T(x̂ - x)‖_∞ / ‖L^T x‖_∞`
    pub mixed: f64,
    /// `‖L^T(x̂ - x) / L^T x‖_∞`
    pub componentwise: f64,
}

pub fn relative_errors(l: &Matrix, x: &Vector, x_hat: &Vector) -> Result<RelativeErrors> {
    let lx = l.transpose() * x;
    let le = l.transpose() * (x_hat - x);
    Ok(RelativeErrors {
        normwise: le.norm() / lx.norm(),
        mixed: densela::vecinf(&le) / densela::vecinf(&lx),
        componentwise: densela::vecinf(&densela::entrywise_div(&le, &lx)?),
    })
}
