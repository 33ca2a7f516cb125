//! Condition-number reports and solution output for loaded bundles.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use eilscond::condnum::{self, upper_bound_blocks, DerivativeBlocks};
use eilscond::{CondParams, CondPreset, EilsError, Matrix, MemoryCap, Vector, ZeroSolutionPolicy};

use crate::bundle::Analysis;
use crate::{mm, CliError};

/// Which expression evaluates the condition number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Kron,
    C1,
    C2,
    ExactInf,
    Ubound,
}

impl Form {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "kron" => Form::Kron,
            "c1" => Form::C1,
            "c2" => Form::C2,
            "exact-inf" => Form::ExactInf,
            "ubound" => Form::Ubound,
            other => return Err(CliError::Usage(format!("unknown form `{other}`"))),
        })
    }

    /// Human-readable description of the formula behind each form.
    pub fn formula(self) -> &'static str {
        match self {
            Form::Kron => "||xi (L^T M_F) diag(weights^-1)||_2, Kronecker matrix materialized",
            Form::C1 => "||k x k Gram matrix of the weighted derivative||_2^(1/2)",
            Form::C2 => "||L^T [S, Q]||_2, factored k x (4n+m+s) form",
            Form::ExactInf => "||xi (|L^T M_F| |weights^-1|)||_inf, accumulated column by column",
            Form::Ubound => "||xi M_mc^Ubd||_inf, Kronecker-free upper bound",
        }
    }
}

pub fn parse_preset(s: &str) -> Result<CondPreset, CliError> {
    Ok(match s {
        "norm2" => CondPreset::NormwiseRelative2,
        "mixed" => CondPreset::MixedInf,
        "comp" => CondPreset::ComponentwiseInf,
        "unit" => CondPreset::AbsoluteUnit,
        other => return Err(CliError::Usage(format!("unknown preset `{other}`"))),
    })
}

/// How the projection `L` is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LSpec {
    Identity,
    /// One-based inclusive column range of the identity.
    Cols(usize, usize),
    File(PathBuf),
}

impl LSpec {
    /// Accepts `identity`, `cols i..j` and `file <path>`, either as one
    /// string or split over two arguments.
    pub fn parse(args: &[String]) -> Result<Self, CliError> {
        let joined = args.join(" ");
        let mut it = joined.trim().splitn(2, char::is_whitespace);
        let head = it.next().unwrap_or("");
        let rest = it.next().map(str::trim).unwrap_or("");
        match (head, rest) {
            ("identity", "") => Ok(LSpec::Identity),
            ("cols", range) => {
                let bad = || CliError::Usage(format!("bad column range `{range}`, expected i..j"));
                let (i, j) = range.split_once("..").ok_or_else(bad)?;
                let i: usize = i.trim().parse().map_err(|_| bad())?;
                let j: usize = j.trim().parse().map_err(|_| bad())?;
                if i == 0 || j < i {
                    return Err(bad());
                }
                Ok(LSpec::Cols(i, j))
            }
            ("file", path) if !path.is_empty() => Ok(LSpec::File(PathBuf::from(path))),
            _ => Err(CliError::Usage(format!(
                "--L expects `identity`, `cols i..j` or `file <path>`, got `{joined}`"
            ))),
        }
    }

    pub fn resolve(&self, n: usize) -> Result<Matrix, CliError> {
        match self {
            LSpec::Identity => Ok(Matrix::identity(n, n)),
            LSpec::Cols(i, j) => {
                if *j > n {
                    return Err(CliError::Usage(format!("column {j} out of range 1..{n}")));
                }
                Ok(Matrix::identity(n, n).columns(i - 1, j - i + 1).into_owned())
            }
            LSpec::File(path) => {
                let mut l = mm::read_matrix(path)?;
                // A stored row vector is accepted as the single column of L.
                if l.nrows() == 1 && l.ncols() == n && n > 1 {
                    l = l.transpose();
                }
                if l.nrows() != n {
                    return Err(CliError::Format(format!(
                        "L in {} has {} rows, expected {n}",
                        path.display(),
                        l.nrows()
                    )));
                }
                Ok(l)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CondReport {
    pub value: f64,
    pub form: Form,
    pub preset: CondPreset,
    pub elapsed: Duration,
}

pub fn params_for(an: &Analysis, preset: CondPreset, l: Matrix) -> Result<CondParams, CliError> {
    Ok(match an {
        Analysis::Eils(a) => CondParams::from_preset(preset, a, l)?,
        Analysis::Els(a) => CondParams::from_preset(preset, &a.inner, l)?,
        Analysis::Ils(a) => a.core.preset(preset, l)?,
        Analysis::Wls(a) => a.core.preset(preset, l)?,
    })
}

/// Evaluates one form. Weights are expanded before the clock starts.
pub fn condition(
    an: &Analysis,
    preset: CondPreset,
    form: Form,
    l: Matrix,
    cap: MemoryCap,
) -> Result<CondReport, CliError> {
    if matches!(form, Form::C1 | Form::C2) && !preset.has_scalar_weights() {
        return Err(CliError::Usage(format!(
            "form {form:?} needs scalar weights; use --preset norm2 or unit"
        )));
    }
    let params = params_for(an, preset, l)?;
    let start = Instant::now();
    let value = evaluate(an, &params, form, cap)?;
    Ok(CondReport { value, form, preset, elapsed: start.elapsed() })
}

/// Evaluates `form` for already expanded weights.
pub fn evaluate(an: &Analysis, params: &CondParams, form: Form, cap: MemoryCap) -> Result<f64, CliError> {
    let policy = ZeroSolutionPolicy::Error;
    let v = match (an, form) {
        (Analysis::Eils(a), Form::Kron) => condnum::kappa2_kron(a, params, cap),
        (Analysis::Eils(a), Form::C1) => condnum::kappa2_form1(a, params),
        (Analysis::Eils(a), Form::C2) => condnum::kappa2_form2(a, params, policy),
        (Analysis::Eils(a), Form::ExactInf) => condnum::kappa_inf(a, params),
        (Analysis::Eils(a), Form::Ubound) => eils_ubound(a, params),
        (Analysis::Els(a), Form::Kron) => a.kappa2_kron(params, cap),
        (Analysis::Els(a), Form::C1) => a.kappa2_form1(params),
        (Analysis::Els(a), Form::C2) => a.kappa2_form2(params, policy),
        (Analysis::Els(a), Form::ExactInf) => condnum::kappa_inf(&a.inner, params),
        (Analysis::Els(a), Form::Ubound) => eils_ubound(&a.inner, params),
        (Analysis::Ils(a), Form::Kron) => a.kappa2_kron(params, cap),
        (Analysis::Ils(a), Form::C1) => a.kappa2_form1(params),
        (Analysis::Ils(a), Form::C2) => a.kappa2_form2(params, policy),
        (Analysis::Ils(a), Form::ExactInf) => a.core.kappa_inf(params),
        (Analysis::Ils(a), Form::Ubound) => {
            a.core.checked_blocks(params).map(|b| upper_bound_blocks(&b, params))
        }
        (Analysis::Wls(a), Form::Kron) => a.kappa2_kron(params, cap),
        (Analysis::Wls(a), Form::C1) => a.kappa2_form1(params),
        (Analysis::Wls(a), Form::C2) => a.kappa2_form2(params),
        (Analysis::Wls(a), Form::ExactInf) => a.core.kappa_inf(params),
        (Analysis::Wls(a), Form::Ubound) => {
            a.core.checked_blocks(params).map(|b| upper_bound_blocks(&b, params))
        }
    };
    Ok(v?)
}

fn eils_ubound(an: &eilscond::EilsAnalysis, params: &CondParams) -> eilscond::Result<f64> {
    let p = &an.problem;
    params.check(p.m(), p.n(), p.s())?;
    Ok(upper_bound_blocks(&DerivativeBlocks::from_analysis(an, &params.l), params))
}

/// Size of the matrix the Kronecker form would allocate, in entries.
pub fn kron_entries(k: usize, m: usize, n: usize, s: usize) -> usize {
    k.saturating_mul((n + 1).saturating_mul(m + s))
}

/// Explains a memory-guard refusal of the Kronecker form.
pub fn memory_guard_note(err: &EilsError) -> Option<String> {
    match err {
        EilsError::MemoryGuard { requested, cap } => Some(format!(
            "Kronecker form skipped: it needs {requested} entries ({:.2} GB), above the cap of {cap} \
             (set {} to raise it). At this size the direct Kronecker computation breaks down due to \
             the lack of memory; the compact forms c1 and c2 remain cheap.",
            *requested as f64 * 8.0 / 1e9,
            MemoryCap::ENV_VAR
        )),
        _ => None,
    }
}

/// Block residuals of the solved problem, as `(name, max-abs value)`.
pub fn residual_report(an: &Analysis) -> Vec<(&'static str, f64)> {
    let amax = |v: &Vector| v.amax();
    match an {
        Analysis::Eils(a) | Analysis::Els(eilscond::special::els::ElsAnalysis { inner: a, .. }) => {
            let k = a.solution.kkt_residuals(&a.problem);
            vec![
                ("stationarity (A^T J r + B^T lambda)", k.stationarity),
                ("residual definition (b - A x - r)", k.residual),
                ("constraint (B x - d)", k.constraint),
            ]
        }
        Analysis::Ils(a) => {
            let p = &a.problem;
            let sol = &a.core.solution;
            vec![
                ("normal equations (A^T J r)", amax(&(p.a.transpose() * p.j.apply(&sol.r)))),
                ("residual definition (b - A x - r)", amax(&(&p.b - &p.a * &sol.x - &sol.r))),
            ]
        }
        Analysis::Wls(a) => {
            let p = &a.problem;
            let sol = &a.core.solution;
            vec![
                ("normal equations (A^T W r)", amax(&(p.a.transpose() * &p.w * &sol.r))),
                ("residual definition (b - A x - r)", amax(&(&p.b - &p.a * &sol.x - &sol.r))),
            ]
        }
    }
}

/// Writes `x.mtx`, `r.mtx` and, for constrained problems, `lambda.mtx`.
pub fn write_solution(an: &Analysis, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let (x, r, lambda) = match an {
        Analysis::Eils(a) => (&a.solution.x, &a.solution.r, Some(&a.solution.lambda)),
        Analysis::Els(a) => (&a.inner.solution.x, &a.inner.solution.r, Some(&a.inner.solution.lambda)),
        Analysis::Ils(a) => (&a.core.solution.x, &a.core.solution.r, None),
        Analysis::Wls(a) => (&a.core.solution.x, &a.core.solution.r, None),
    };
    let mut written = Vec::new();
    for (name, v) in [("x", Some(x)), ("r", Some(r)), ("lambda", lambda)] {
        if let Some(v) = v {
            let path = dir.join(format!("{name}.mtx"));
            mm::write_vector(&path, v)?;
            written.push(path);
        }
    }
    Ok(written)
}
