//! A problem stored as a directory: `manifest.txt` plus one Matrix Market
//! file per datum.
//!
//! The manifest is flat `key=value` text. Each data file is listed as
//! `file.<name>=<file>` together with `sha256.<name>=<hex digest>`; loading
//! verifies every digest and re-checks the solvability assumptions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use eilscond::genrand::{GenSpec, GeneratedProblem};
use eilscond::problem::{validate, DEFAULT_TOL};
use eilscond::special::els::{ElsAnalysis, ElsProblem};
use eilscond::special::ils::{IlsAnalysis, IlsProblem};
use eilscond::special::wls::{WlsAnalysis, WlsProblem};
use eilscond::{EilsAnalysis, EilsError, EilsProblem, Matrix, SignatureMatrix, Vector};
use sha2::{Digest, Sha256};

use crate::{mm, CliError};

pub const MANIFEST: &str = "manifest.txt";
const FORMAT: &str = "eilscond-bundle-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Eils,
    Els,
    Ils,
    Wls,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Eils => "eils",
            ProblemKind::Els => "els",
            ProblemKind::Ils => "ils",
            ProblemKind::Wls => "wls",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "eils" => ProblemKind::Eils,
            "els" => ProblemKind::Els,
            "ils" => ProblemKind::Ils,
            "wls" => ProblemKind::Wls,
            other => return Err(CliError::Format(format!("unknown problem kind `{other}`"))),
        })
    }
}

/// Problem data as stored on disk. Which fields are present depends on
/// the kind: constraints for `eils`/`els`, the signature split for
/// `eils`/`ils`, the weight for `wls`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub kind: ProblemKind,
    pub a: Matrix,
    pub b: Option<Matrix>,
    pub b_vec: Vector,
    pub d: Option<Vector>,
    pub w: Option<Matrix>,
    pub p: usize,
    pub q: usize,
    pub gen: Option<GenSpec>,
    pub x_true: Option<Vector>,
}

/// A loaded and solved problem of any kind.
#[derive(Debug, Clone)]
pub enum Analysis {
    Eils(EilsAnalysis),
    Els(ElsAnalysis),
    Ils(IlsAnalysis),
    Wls(WlsAnalysis),
}

impl Analysis {
    pub fn n(&self) -> usize {
        match self {
            Analysis::Eils(a) => a.problem.n(),
            Analysis::Els(a) => a.inner.problem.n(),
            Analysis::Ils(a) => a.core.n(),
            Analysis::Wls(a) => a.core.n(),
        }
    }

    pub fn x(&self) -> &Vector {
        match self {
            Analysis::Eils(a) => &a.solution.x,
            Analysis::Els(a) => &a.inner.solution.x,
            Analysis::Ils(a) => &a.core.solution.x,
            Analysis::Wls(a) => &a.core.solution.x,
        }
    }
}

impl Bundle {
    pub fn from_problem(prob: &EilsProblem) -> Self {
        Self {
            kind: ProblemKind::Eils,
            a: prob.a.clone(),
            b: Some(prob.b.clone()),
            b_vec: prob.b_vec.clone(),
            d: Some(prob.d.clone()),
            w: None,
            p: prob.j.p,
            q: prob.j.q,
            gen: None,
            x_true: None,
        }
    }

    /// The generated problem after its τ scaling. The exact solution is
    /// only recorded when no scaling was applied.
    pub fn from_generated(g: &GeneratedProblem) -> Result<Self, CliError> {
        let prob = g.scaled()?;
        Ok(Self {
            gen: Some(g.spec),
            x_true: (g.spec.tau == 0.0).then(|| g.x_true.clone()),
            ..Self::from_problem(&prob)
        })
    }

    pub fn eils_problem(&self) -> Result<EilsProblem, CliError> {
        let missing = |what: &str| CliError::Format(format!("{} bundle lacks {what}", self.kind.name()));
        let b = self.b.clone().ok_or_else(|| missing("B"))?;
        let d = self.d.clone().ok_or_else(|| missing("d"))?;
        let j = match self.kind {
            ProblemKind::Els => SignatureMatrix::identity(self.a.nrows()),
            _ => SignatureMatrix::new(self.p, self.q),
        };
        Ok(EilsProblem::new(self.a.clone(), b, self.b_vec.clone(), d, j)?)
    }

    /// Checks the assumptions for the bundle's kind and solves.
    pub fn analyze(&self) -> Result<Analysis, CliError> {
        Ok(match self.kind {
            ProblemKind::Eils => {
                let prob = self.eils_problem()?;
                if let Some(why) = validate(&prob, DEFAULT_TOL).failure() {
                    return Err(EilsError::AssumptionViolated(why).into());
                }
                Analysis::Eils(EilsAnalysis::new(prob)?)
            }
            ProblemKind::Els => {
                let p = self.eils_problem()?;
                Analysis::Els(ElsAnalysis::new(ElsProblem::new(p.a, p.b, p.b_vec, p.d)?)?)
            }
            ProblemKind::Ils => Analysis::Ils(IlsAnalysis::new(IlsProblem::new(
                self.a.clone(),
                self.b_vec.clone(),
                SignatureMatrix::new(self.p, self.q),
            )?)?),
            ProblemKind::Wls => {
                let w = self.w.clone().ok_or_else(|| CliError::Format("wls bundle lacks W".into()))?;
                Analysis::Wls(WlsAnalysis::new(WlsProblem::new(self.a.clone(), self.b_vec.clone(), w)?)?)
            }
        })
    }

    fn files(&self) -> Vec<(&'static str, Matrix)> {
        let col = |v: &Vector| Matrix::from_column_slice(v.len(), 1, v.as_slice());
        let mut out = vec![("A", self.a.clone()), ("b", col(&self.b_vec))];
        if let Some(b) = &self.b {
            out.push(("B", b.clone()));
        }
        if let Some(d) = &self.d {
            out.push(("d", col(d)));
        }
        if let Some(w) = &self.w {
            out.push(("W", w.clone()));
        }
        if let Some(x) = &self.x_true {
            out.push(("x_true", col(x)));
        }
        out
    }

    pub fn save(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut manifest = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(manifest, "{k}={v}");
        };
        put("format", FORMAT.into());
        put("kind", self.kind.name().into());
        put("m", self.a.nrows().to_string());
        put("n", self.a.ncols().to_string());
        put("s", self.b.as_ref().map_or(0, |b| b.nrows()).to_string());
        put("p", self.p.to_string());
        put("q", self.q.to_string());
        if let Some(g) = &self.gen {
            put("gen.p", g.p.to_string());
            put("gen.q", g.q.to_string());
            put("gen.n", g.n.to_string());
            put("gen.s", g.s.to_string());
            put("gen.kappaA", format!("{:e}", g.kappa_a));
            put("gen.kappaB", format!("{:e}", g.kappa_b));
            put("gen.omega", format!("{:e}", g.omega));
            put("gen.tau", format!("{:e}", g.tau));
            put("gen.seed", g.seed.to_string());
            put("gen.hyperbolic_cap", format!("{:e}", g.hyperbolic_cap));
        }
        for (name, m) in self.files() {
            let text = mm::to_string(&m)?;
            let file = format!("{name}.mtx");
            let path = dir.join(&file);
            std::fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
            put(&format!("file.{name}"), file);
            put(&format!("sha256.{name}"), hex::encode(Sha256::digest(text.as_bytes())));
        }
        let path = dir.join(MANIFEST);
        std::fs::write(&path, manifest).map_err(|e| CliError::io(&path, e))
    }

    /// Reads a bundle, verifying checksums. Assumptions are checked by
    /// [`Bundle::analyze`], which [`load_and_analyze`] runs immediately.
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let mut kv = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Format(format!("manifest line without `=`: {line}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).ok_or_else(|| CliError::Format(format!("manifest lacks `{k}`")));
        let num = |k: &str| -> Result<usize, CliError> {
            get(k)?.parse().map_err(|_| CliError::Format(format!("manifest `{k}` is not a count")))
        };
        let real = |k: &str| -> Result<f64, CliError> {
            get(k)?.parse().map_err(|_| CliError::Format(format!("manifest `{k}` is not a number")))
        };
        if get("format")? != FORMAT {
            return Err(CliError::Format(format!("unsupported bundle format `{}`", get("format")?)));
        }
        let kind = ProblemKind::parse(get("kind")?)?;

        let read = |name: &str| -> Result<Option<Matrix>, CliError> {
            let Some(file) = kv.get(&format!("file.{name}")) else {
                return Ok(None);
            };
            let path = dir.join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let want = get(&format!("sha256.{name}"))?;
            if hex::encode(Sha256::digest(text.as_bytes())) != *want {
                return Err(CliError::Checksum(file.clone()));
            }
            mm::parse(&text).map(Some)
        };
        let column = |name: &str| -> Result<Option<Vector>, CliError> {
            read(name)?
                .map(|m| {
                    if m.ncols() == 1 {
                        Ok(m.column(0).into_owned())
                    } else {
                        Err(CliError::Format(format!("{name} must be a column")))
                    }
                })
                .transpose()
        };

        let gen = if kv.contains_key("gen.seed") {
            Some(GenSpec {
                p: num("gen.p")?,
                q: num("gen.q")?,
                n: num("gen.n")?,
                s: num("gen.s")?,
                kappa_a: real("gen.kappaA")?,
                kappa_b: real("gen.kappaB")?,
                omega: real("gen.omega")?,
                tau: real("gen.tau")?,
                seed: get("gen.seed")?
                    .parse()
                    .map_err(|_| CliError::Format("manifest `gen.seed` is not an integer".into()))?,
                hyperbolic_cap: real("gen.hyperbolic_cap")?,
            })
        } else {
            None
        };

        let a = read("A")?.ok_or_else(|| CliError::Format("bundle lacks A".into()))?;
        let bundle = Bundle {
            kind,
            b_vec: column("b")?.ok_or_else(|| CliError::Format("bundle lacks b".into()))?,
            b: read("B")?,
            d: column("d")?,
            w: read("W")?,
            p: num("p")?,
            q: num("q")?,
            gen,
            x_true: column("x_true")?,
            a,
        };
        if bundle.a.nrows() != num("m")? || bundle.a.ncols() != num("n")? {
            return Err(CliError::Format("manifest dimensions disagree with A".into()));
        }
        Ok(bundle)
    }
}

/// Loads a bundle and re-validates it by solving.
pub fn load_and_analyze(dir: &Path) -> Result<(Bundle, Analysis), CliError> {
    let bundle = Bundle::load(dir)?;
    let analysis = bundle.analyze()?;
    Ok((bundle, analysis))
}
