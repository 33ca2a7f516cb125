//! Experiment drivers producing CSV reports.
//!
//! Each report has a leading `kind` column: `trial` for per-trial rows and
//! `mean`, `median`, `max`, `min` for the aggregate rows appended after
//! them. Column names carry the formula behind every condition number:
//!
//! | column                 | meaning                                                  |
//! |------------------------|----------------------------------------------------------|
//! | `kappa2_normwise_c1`   | 2-norm normwise relative value, Gram (c1) form            |
//! | `kappa2_bd`            | `kappa2_normwise_c1 * delta_rF`                           |
//! | `kappam_mixed_exact`   | ∞-norm mixed value, exact column-by-column accumulation   |
//! | `kappam_bd`            | `kappam_mixed_exact * delta_rmax`                         |
//! | `kappac_comp_exact`    | ∞-norm componentwise value, exact accumulation            |
//! | `kappac_bd`            | `kappac_comp_exact * delta_rmax`                          |
//! | `kappamU_mixed_ubound` | Kronecker-free upper bound of the mixed value             |
//! | `kappacU_comp_ubound`  | Kronecker-free upper bound of the componentwise value     |
//! | `kappa2_unit_c1`       | 2-norm value with unit weights, c1 form                   |
//! | `t_*`                  | seconds, median of the inner repetitions after a warm-up  |
//!
//! Trial `i` uses generator seed `seed + i`; its perturbation masks use the
//! same seed with the high bit flipped so they never share a stream with
//! the generator.

use std::fmt::Write as _;
use std::time::Instant;

use eilscond::condnum::{self, DerivativeBlocks};
use eilscond::genrand::{self, GenSpec, PerturbationSpec};
use eilscond::problem::solve_augmented;
use eilscond::{CondParams, CondPreset, EilsAnalysis, Matrix, MemoryCap, ZeroSolutionPolicy};

use crate::commands::{kron_entries, memory_guard_note};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    ErrBound,
    FormTiming,
    UboundTiming,
    UboundRatio,
}

impl Pattern {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "errbound" => Pattern::ErrBound,
            "form-timing" => Pattern::FormTiming,
            "ubound-timing" => Pattern::UboundTiming,
            "ubound-ratio" => Pattern::UboundRatio,
            other => return Err(CliError::Usage(format!("unknown pattern `{other}`"))),
        })
    }
}

/// Projection used by the error-bound experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LChoice {
    Identity,
    /// The first `k` solution entries.
    Leading(usize),
    /// A random convex combination of all entries, drawn per trial.
    Convex,
}

impl LChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "identity" => Ok(LChoice::Identity),
            "convex" => Ok(LChoice::Convex),
            _ => s
                .strip_prefix("leading")
                .and_then(|k| k.trim().parse().ok())
                .filter(|&k: &usize| k > 0)
                .map(LChoice::Leading)
                .ok_or_else(|| {
                    CliError::Usage(format!("--L expects identity, convex or leadingK, got `{s}`"))
                }),
        }
    }

    pub fn matrix(self, n: usize, seed: u64) -> Result<Matrix, CliError> {
        match self {
            LChoice::Identity => Ok(Matrix::identity(n, n)),
            LChoice::Leading(k) if k <= n => Ok(Matrix::identity(n, n).columns(0, k).into_owned()),
            LChoice::Leading(k) => Err(CliError::Usage(format!("cannot select {k} of {n} entries"))),
            LChoice::Convex => Ok(genrand::convex_row(n, seed)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub pattern: Pattern,
    /// Generator settings. For the timing patterns `p, q, n, s` are
    /// replaced by each entry of `sizes`.
    pub spec: GenSpec,
    pub reps: usize,
    pub l: LChoice,
    pub epsilon: f64,
    /// `(m, n, s)` grid for the timing patterns, split as `p = 2m/3`.
    pub sizes: Vec<(usize, usize, usize)>,
    pub timing_reps: usize,
    pub cap: MemoryCap,
}

impl ExperimentConfig {
    pub fn new(pattern: Pattern, spec: GenSpec) -> Self {
        Self {
            pattern,
            spec,
            reps: 10,
            l: LChoice::Identity,
            epsilon: 1e-9,
            sizes: match pattern {
                Pattern::FormTiming => {
                    vec![(240, 120, 80), (360, 180, 120), (480, 240, 160), (600, 300, 200), (960, 480, 320)]
                }
                _ => vec![(240, 120, 80), (360, 180, 120), (480, 240, 160), (600, 300, 200)],
            },
            timing_reps: 5,
            cap: MemoryCap::from_env(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Missing,
}

impl Cell {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(i as f64),
            Cell::Num(v) => Some(v),
            Cell::Missing => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Trial,
    Mean,
    Median,
    Max,
    Min,
}

impl RowKind {
    pub fn name(self) -> &'static str {
        match self {
            RowKind::Trial => "trial",
            RowKind::Mean => "mean",
            RowKind::Median => "median",
            RowKind::Max => "max",
            RowKind::Min => "min",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub kind: RowKind,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    /// Remarks printed next to the table (for example memory-guard skips).
    pub notes: Vec<String>,
}

impl Report {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Values of one column over the rows of one kind.
    pub fn values(&self, kind: RowKind, name: &str) -> Vec<Option<f64>> {
        let j = self.column(name).unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().filter(|r| r.kind == kind).map(|r| r.cells[j].as_f64()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(row.kind.name());
            for cell in &row.cells {
                out.push(',');
                match cell {
                    Cell::Int(i) => {
                        let _ = write!(out, "{i}");
                    }
                    Cell::Num(v) => {
                        let _ = write!(out, "{v:.6e}");
                    }
                    Cell::Missing => {}
                }
            }
            out.push('\n');
        }
        out
    }

    /// Appends mean/median/max/min rows. Rows sharing the values of the
    /// `group` columns are aggregated together; the `group` cells are
    /// copied and all other integer columns are left empty.
    fn aggregate(&mut self, group: &[&str]) {
        let gidx: Vec<usize> = group.iter().map(|g| self.column(g).expect("group column")).collect();
        let mut keys: Vec<Vec<Cell>> = Vec::new();
        for r in &self.rows {
            let k: Vec<Cell> = gidx.iter().map(|&j| r.cells[j]).collect();
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        let mut extra = Vec::new();
        for key in keys {
            let members: Vec<&Row> = self
                .rows
                .iter()
                .filter(|r| r.kind == RowKind::Trial && gidx.iter().zip(&key).all(|(&j, c)| r.cells[j] == *c))
                .collect();
            for kind in [RowKind::Mean, RowKind::Median, RowKind::Max, RowKind::Min] {
                let cells = (0..self.columns.len())
                    .map(|j| {
                        if let Some(pos) = gidx.iter().position(|&g| g == j) {
                            return key[pos];
                        }
                        if matches!(members[0].cells[j], Cell::Int(_)) {
                            return Cell::Missing;
                        }
                        let mut v: Vec<f64> = members.iter().filter_map(|r| r.cells[j].as_f64()).collect();
                        if v.is_empty() {
                            return Cell::Missing;
                        }
                        v.sort_by(f64::total_cmp);
                        Cell::Num(match kind {
                            RowKind::Mean => v.iter().sum::<f64>() / v.len() as f64,
                            RowKind::Median => median_sorted(&v),
                            RowKind::Max => v[v.len() - 1],
                            RowKind::Min => v[0],
                            RowKind::Trial => unreachable!(),
                        })
                    })
                    .collect();
                extra.push(Row { kind, cells });
            }
        }
        self.rows.extend(extra);
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    median_sorted(&v)
}

/// Runs `f` once to warm up, then `reps` more times, and returns the last
/// result with the median wall-clock seconds of the timed runs.
pub fn median_time<T>(reps: usize, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut out = f();
    let mut times = Vec::with_capacity(reps.max(1));
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        out = std::hint::black_box(f());
        times.push(t.elapsed().as_secs_f64());
    }
    (out, median(&times))
}

fn trial_spec(base: &GenSpec, trial: usize) -> GenSpec {
    GenSpec { seed: base.seed.wrapping_add(trial as u64), ..*base }
}

fn sized_spec(base: &GenSpec, (m, n, s): (usize, usize, usize), trial: usize) -> GenSpec {
    let p = (2 * m).div_ceil(3).max(n - s);
    GenSpec { p, q: m - p, n, s, ..trial_spec(base, trial) }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    if cfg.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    match cfg.pattern {
        Pattern::ErrBound => errbound(cfg),
        Pattern::FormTiming => form_timing(cfg),
        Pattern::UboundTiming => ubound_timing(cfg),
        Pattern::UboundRatio => ubound_ratio(cfg),
    }
}

/// One error-bound trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrBoundTrial {
    pub r2: f64,
    pub kappa2: f64,
    pub kappa2_bd: f64,
    pub rm: f64,
    pub kappam: f64,
    pub kappam_bd: f64,
    pub rc: f64,
    pub kappac: f64,
    pub kappac_bd: f64,
    pub delta_rf: f64,
    pub delta_rmax: f64,
}

/// Generates, perturbs and re-solves one problem, returning the measured
/// forward errors next to the condition-number bounds.
pub fn errbound_trial(spec: &GenSpec, l: LChoice, epsilon: f64) -> Result<ErrBoundTrial, CliError> {
    let g = genrand::gen_problem(spec)?;
    let prob = g.scaled()?;
    let l = l.matrix(prob.n(), spec.seed)?;
    let an = EilsAnalysis::new(prob.clone())?;
    let pert = genrand::perturb(&prob, &PerturbationSpec { epsilon, seed: spec.seed ^ (1 << 63) })?;
    let x_hat = solve_augmented(&pert.problem)?.x;
    let err = genrand::relative_errors(&l, &an.solution.x, &x_hat)?;
    let params = CondParams::from_preset(CondPreset::NormwiseRelative2, &an, l.clone())?;
    let kappa2 = condnum::kappa2_form1(&an, &params)?;
    let kappam = condnum::kappa_mixed(&an, &l)?;
    let kappac = condnum::kappa_comp(&an, &l)?;
    let (rf, rmax) = (pert.measures.rel_frobenius, pert.measures.rel_max);
    Ok(ErrBoundTrial {
        r2: err.normwise,
        kappa2,
        kappa2_bd: kappa2 * rf,
        rm: err.mixed,
        kappam,
        kappam_bd: kappam * rmax,
        rc: err.componentwise,
        kappac,
        kappac_bd: kappac * rmax,
        delta_rf: rf,
        delta_rmax: rmax,
    })
}

fn errbound(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = Report {
        columns: vec![
            "trial", "seed", "m", "n", "s", "tau", "r2", "kappa2_normwise_c1", "kappa2_bd", "rm",
            "kappam_mixed_exact", "kappam_bd", "rc", "kappac_comp_exact", "kappac_bd", "delta_rF",
            "delta_rmax",
        ],
        rows: Vec::new(),
        notes: Vec::new(),
    };
    for trial in 0..cfg.reps {
        let spec = trial_spec(&cfg.spec, trial);
        let t = errbound_trial(&spec, cfg.l, cfg.epsilon)?;
        let mut cells = vec![
            Cell::Int(trial as u64),
            Cell::Int(spec.seed),
            Cell::Int(spec.m() as u64),
            Cell::Int(spec.n as u64),
            Cell::Int(spec.s as u64),
            Cell::Num(spec.tau),
        ];
        cells.extend(
            [
                t.r2, t.kappa2, t.kappa2_bd, t.rm, t.kappam, t.kappam_bd, t.rc, t.kappac, t.kappac_bd,
                t.delta_rf, t.delta_rmax,
            ]
            .map(Cell::Num),
        );
        report.rows.push(Row { kind: RowKind::Trial, cells });
    }
    report.aggregate(&["m", "n", "s", "tau"]);
    Ok(report)
}

/// Median seconds for the three 2-norm forms on one problem; `kron` is
/// `None` when the memory guard refuses it.
#[derive(Debug, Clone, PartialEq)]
pub struct FormTimes {
    pub kron: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub kappa: f64,
    pub kron_note: Option<String>,
}

/// Times the Kronecker, Gram and factored forms with unit weights and
/// `L = I` on a solved problem.
pub fn time_forms(an: &EilsAnalysis, timing_reps: usize, cap: MemoryCap) -> Result<FormTimes, CliError> {
    let p = &an.problem;
    let n = p.n();
    let params = CondParams::unit(Matrix::identity(n, n));
    let (kappa, c1) = median_time(timing_reps, || condnum::kappa2_form1(an, &params));
    let kappa = kappa?;
    let (k2, c2) = median_time(timing_reps, || condnum::kappa2_form2(an, &params, ZeroSolutionPolicy::Error));
    k2?;
    let (kron, kron_note) = match cap.check(kron_entries(n, p.m(), n, p.s())) {
        Ok(()) => {
            let (v, t) = median_time(timing_reps, || condnum::kappa2_kron(an, &params, cap));
            v?;
            (Some(t), None)
        }
        Err(e) => (None, memory_guard_note(&e)),
    };
    Ok(FormTimes { kron, c1, c2, kappa, kron_note })
}

fn form_timing(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = Report {
        columns: vec!["m", "n", "s", "rep", "seed", "t_kron", "t_c1", "t_c2", "kappa2_unit_c1"],
        rows: Vec::new(),
        notes: Vec::new(),
    };
    for &size in &cfg.sizes {
        for rep in 0..cfg.reps {
            let spec = sized_spec(&cfg.spec, size, rep);
            let an = EilsAnalysis::new(genrand::gen_problem(&spec)?.scaled()?)?;
            let t = time_forms(&an, cfg.timing_reps, cfg.cap)?;
            if let Some(note) = t.kron_note {
                let note = format!("(m,n,s) = {size:?}: {note}");
                if !report.notes.contains(&note) {
                    report.notes.push(note);
                }
            }
            report.rows.push(Row {
                kind: RowKind::Trial,
                cells: vec![
                    Cell::Int(size.0 as u64),
                    Cell::Int(size.1 as u64),
                    Cell::Int(size.2 as u64),
                    Cell::Int(rep as u64),
                    Cell::Int(spec.seed),
                    t.kron.map_or(Cell::Missing, Cell::Num),
                    Cell::Num(t.c1),
                    Cell::Num(t.c2),
                    Cell::Num(t.kappa),
                ],
            });
        }
    }
    report.aggregate(&["m", "n", "s"]);
    Ok(report)
}

/// Exact mixed and componentwise values and their upper bounds with
/// `L = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UboundValues {
    pub kappam: f64,
    pub kappam_u: f64,
    pub kappac: f64,
    pub kappac_u: f64,
}

impl UboundValues {
    pub fn r_m(&self) -> f64 {
        self.kappam_u / self.kappam
    }
    pub fn r_c(&self) -> f64 {
        self.kappac_u / self.kappac
    }
}

pub fn ubound_values(an: &EilsAnalysis, l: &Matrix) -> Result<UboundValues, CliError> {
    Ok(UboundValues {
        kappam: condnum::kappa_mixed(an, l)?,
        kappam_u: condnum::upper_bound_mixed(an, l)?,
        kappac: condnum::kappa_comp(an, l)?,
        kappac_u: condnum::upper_bound_comp(an, l)?,
    })
}

fn ubound_timing(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = Report {
        columns: vec![
            "m", "n", "s", "rep", "seed", "t_mixed_exact", "t_mixed_ubound", "kappam_mixed_exact",
            "kappamU_mixed_ubound",
        ],
        rows: Vec::new(),
        notes: Vec::new(),
    };
    for &size in &cfg.sizes {
        for rep in 0..cfg.reps {
            let spec = sized_spec(&cfg.spec, size, rep);
            let an = EilsAnalysis::new(genrand::gen_problem(&spec)?.scaled()?)?;
            let l = Matrix::identity(size.1, size.1);
            let params = CondParams::from_preset(CondPreset::MixedInf, &an, l.clone())?;
            let blocks = DerivativeBlocks::from_analysis(&an, &l);
            let (exact, t_exact) = median_time(cfg.timing_reps, || condnum::kappa_inf_blocks(&blocks, &params));
            let (bound, t_bound) = median_time(cfg.timing_reps, || condnum::upper_bound_blocks(&blocks, &params));
            report.rows.push(Row {
                kind: RowKind::Trial,
                cells: vec![
                    Cell::Int(size.0 as u64),
                    Cell::Int(size.1 as u64),
                    Cell::Int(size.2 as u64),
                    Cell::Int(rep as u64),
                    Cell::Int(spec.seed),
                    Cell::Num(t_exact),
                    Cell::Num(t_bound),
                    Cell::Num(exact),
                    Cell::Num(bound),
                ],
            });
        }
    }
    report.aggregate(&["m", "n", "s"]);
    Ok(report)
}

fn ubound_ratio(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = Report {
        columns: vec![
            "trial", "seed", "m", "n", "s", "kappam_mixed_exact", "kappamU_mixed_ubound", "r_m",
            "kappac_comp_exact", "kappacU_comp_ubound", "r_c",
        ],
        rows: Vec::new(),
        notes: Vec::new(),
    };
    for trial in 0..cfg.reps {
        let spec = trial_spec(&cfg.spec, trial);
        let an = EilsAnalysis::new(genrand::gen_problem(&spec)?.scaled()?)?;
        let l = cfg.l.matrix(spec.n, spec.seed)?;
        let v = ubound_values(&an, &l)?;
        report.rows.push(Row {
            kind: RowKind::Trial,
            cells: vec![
                Cell::Int(trial as u64),
                Cell::Int(spec.seed),
                Cell::Int(spec.m() as u64),
                Cell::Int(spec.n as u64),
                Cell::Int(spec.s as u64),
                Cell::Num(v.kappam),
                Cell::Num(v.kappam_u),
                Cell::Num(v.r_m()),
                Cell::Num(v.kappac),
                Cell::Num(v.kappac_u),
                Cell::Num(v.r_c()),
            ],
        });
    }
    report.aggregate(&["m", "n", "s"]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> GenSpec {
        GenSpec { omega: 1e-3, ..GenSpec::new(8, 4, 6, 3) }
    }

    #[test]
    fn errbound_report_has_aggregates() {
        let mut cfg = ExperimentConfig::new(Pattern::ErrBound, small_spec());
        cfg.reps = 4;
        let r = run(&cfg).unwrap();
        assert_eq!(r.rows.len(), 4 + 4);
        let csv = r.to_csv();
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("kind,trial,seed"));
        for line in csv.lines().skip(1) {
            assert_eq!(line.split(',').count(), r.columns.len() + 1);
        }
        for v in r.values(RowKind::Trial, "kappa2_normwise_c1") {
            assert!(v.unwrap().is_finite() && v.unwrap() >= 0.0);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let mut cfg = ExperimentConfig::new(Pattern::UboundRatio, small_spec());
        cfg.reps = 3;
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
    }

    #[test]
    fn ratios_are_at_least_one() {
        let mut cfg = ExperimentConfig::new(Pattern::UboundRatio, small_spec());
        cfg.reps = 5;
        let r = run(&cfg).unwrap();
        for v in r.values(RowKind::Trial, "r_m").into_iter().chain(r.values(RowKind::Trial, "r_c")) {
            assert!(v.unwrap() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn kron_is_skipped_above_the_cap() {
        let mut cfg = ExperimentConfig::new(Pattern::FormTiming, small_spec());
        cfg.reps = 1;
        cfg.timing_reps = 1;
        cfg.sizes = vec![(12, 6, 2), (24, 12, 4)];
        cfg.cap = MemoryCap(7 * 14 * 6 + 1);
        let r = run(&cfg).unwrap();
        let kron = r.values(RowKind::Trial, "t_kron");
        assert!(kron[0].is_some());
        assert!(kron[1].is_none());
        assert_eq!(r.notes.len(), 1);
        assert!(r.notes[0].contains("lack of memory"));
    }

    #[test]
    fn aggregates_of_known_values() {
        let mut r = Report {
            columns: vec!["g", "v"],
            rows: [1.0, 4.0, 2.0]
                .iter()
                .map(|&v| Row { kind: RowKind::Trial, cells: vec![Cell::Int(1), Cell::Num(v)] })
                .collect(),
            notes: vec![],
        };
        r.aggregate(&["g"]);
        let agg = |k| r.values(k, "v")[0].unwrap();
        assert_eq!(agg(RowKind::Mean), 7.0 / 3.0);
        assert_eq!(agg(RowKind::Median), 2.0);
        assert_eq!(agg(RowKind::Max), 4.0);
        assert_eq!(agg(RowKind::Min), 1.0);
    }

    #[test]
    fn l_choices() {
        assert_eq!(LChoice::parse("leading3").unwrap(), LChoice::Leading(3));
        assert_eq!(LChoice::parse("convex").unwrap(), LChoice::Convex);
        assert!(LChoice::parse("leading0").is_err());
        let c = LChoice::Convex.matrix(5, 1).unwrap();
        assert!((c.sum() - 1.0).abs() < 1e-15);
    }
}
