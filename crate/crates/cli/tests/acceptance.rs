//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, followed by
//! the measured quantities. The process exits non-zero if any criterion
//! fails.

use std::time::Instant;

use eilscond::condnum::{self, kappa2_form1, kappa2_form2, kappa2_kron};
use eilscond::densela::{self, ddag, ddag2_abs, kron, vec, vec_perm};
use eilscond::genrand::{gen_j_orthogonal, gen_problem, GenSpec, DEFAULT_HYPERBOLIC_CAP};
use eilscond::problem::{solve_augmented, validate, DEFAULT_TOL};
use eilscond::special::els::{els_pinv_crosscheck, ElsAnalysis, ElsProblem};
use eilscond::special::ils::{IlsAnalysis, IlsProblem};
use eilscond::special::wls::{WlsAnalysis, WlsProblem};
use eilscond::{
    CondParams, CondPreset, DataDelta, EilsAnalysis, EilsError, EilsProblem, Matrix, MemoryCap,
    SignatureMatrix, Vector, ZeroSolutionPolicy,
};
use eilscond_cli::experiment::{errbound_trial, median, time_forms, ubound_values, LChoice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn analysis(spec: &GenSpec) -> EilsAnalysis {
    EilsAnalysis::new(gen_problem(spec).unwrap().scaled().unwrap()).unwrap()
}

/// Random shape with `m <= 60`, `n <= 30`, `s <= 10`, `s < n`.
fn random_shape(rng: &mut impl Rng) -> (usize, usize, usize, usize) {
    let n = rng.random_range(2..=30);
    let s = rng.random_range(1..=10.min(n - 1));
    let m = rng.random_range(n..=60);
    let q = rng.random_range(0..=(m - (n - s)).min(m / 2));
    (m - q, q, n, s)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst1, mut worst2, mut worst_cond) = (0.0_f64, 0.0_f64, 0.0_f64);
    for trial in 0..100u64 {
        let (p, q, n, s) = random_shape(&mut rng);
        let spec = GenSpec {
            kappa_a: 2.0,
            hyperbolic_cap: 5.0_f64.ln() / 2.0,
            omega: 1e-3,
            kappa_b: 3.0,
            seed: 1000 + trial,
            ..GenSpec::new(p, q, n, s)
        };
        let an = analysis(&spec);
        worst_cond = worst_cond.max(densela::cond2(&an.problem.a));
        let k = rng.random_range(1..=n);
        let l = if trial % 2 == 0 {
            Matrix::identity(n, n).columns(0, k).into_owned()
        } else {
            Matrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0))
        };
        let params = CondParams::from_preset(CondPreset::NormwiseRelative2, &an, l).unwrap();
        let kr = kappa2_kron(&an, &params, MemoryCap::default()).unwrap();
        let c1 = kappa2_form1(&an, &params).unwrap();
        let c2 = kappa2_form2(&an, &params, ZeroSolutionPolicy::Error).unwrap();
        worst1 = worst1.max(rel(c1, kr));
        worst2 = worst2.max(rel(c2, kr));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst1 <= 1e-8 && worst2 <= 1e-8 && worst_cond <= 10.0 && secs < 30.0,
        detail: format!(
            "100 problems, max rel |kron-c1| = {worst1:.2e}, |kron-c2| = {worst2:.2e}, max kappa(A) = {worst_cond:.2}"
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_col = 0.0_f64;
    for seed in 0..10u64 {
        let (p, q) = (rng.random_range(3..8), rng.random_range(1..4));
        let n = rng.random_range(2..=p.min(6));
        let s = rng.random_range(1..n);
        let m = p + q;
        let an = analysis(&GenSpec { omega: 1e-2, kappa_b: 3.0, seed, ..GenSpec::new(p, q, n, s) });
        let mf = condnum::build_mf(&an, &Matrix::identity(n, n), MemoryCap::default()).unwrap();
        for j in 0..mf.ncols() {
            let mut e = Vector::zeros(mf.ncols());
            e[j] = 1.0;
            let fr = an.frechet(&DataDelta::from_vec(&e, m, n, s).unwrap()).unwrap();
            let col = mf.column(j);
            let err = (&fr - col).norm();
            if err > 0.0 {
                worst_col = worst_col.max(err / col.norm());
            }
        }
    }

    let mut passes = 0;
    for trial in 0..100u64 {
        let (p, q) = (rng.random_range(3..9), rng.random_range(0..4));
        let n = rng.random_range(2..=p.min(7));
        let s = rng.random_range(1..n);
        let an = analysis(&GenSpec { omega: 1e-2, kappa_b: 3.0, seed: 500 + trial, ..GenSpec::new(p, q, n, s) });
        let len = (n + 1) * (p + q + s);
        let delta = DataDelta::from_vec(&Vector::from_fn(len, |_, _| rng.random_range(-1.0..1.0)), p + q, n, s)
            .unwrap();
        let h = 1e-6 * an.problem.data_norm() / delta.frobenius();
        let plus = solve_augmented(&delta.apply_to(&an.problem, h).unwrap()).unwrap().x;
        let minus = solve_augmented(&delta.apply_to(&an.problem, -h).unwrap()).unwrap().x;
        let fd = (plus - minus) / (2.0 * h);
        let exact = an.frechet(&delta).unwrap();
        if (&fd - &exact).norm() <= 1e-6 * exact.norm() {
            passes += 1;
        }
    }
    Outcome {
        pass: worst_col <= 1e-12 && passes >= 99,
        detail: format!(
            "unit directions: max rel column error {worst_col:.2e}; central differences: {passes}/100 within 1e-6"
        ),
    }
}

/// A problem with `n = s = 1`, where the generator's solution would be zero.
fn tiny_problem(rng: &mut impl Rng, m: usize) -> EilsAnalysis {
    let a = Matrix::from_fn(m, 1, |_, _| rng.random_range(0.5..2.0));
    let b = Matrix::from_element(1, 1, rng.random_range(0.5..2.0));
    let b_vec = Vector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
    let d = Vector::from_element(1, rng.random_range(0.5..2.0));
    let j = SignatureMatrix::new(m.div_ceil(2), m / 2);
    EilsAnalysis::new(EilsProblem::new(a, b, b_vec, d, j).unwrap()).unwrap()
}

/// Largest sampled directional derivative norm relative to `κ_2`.
fn sampled_ratio(an: &EilsAnalysis, rng: &mut impl Rng, samples: usize) -> f64 {
    let (m, n, s) = (an.problem.m(), an.problem.n(), an.problem.s());
    let params = CondParams::from_preset(CondPreset::NormwiseRelative2, an, Matrix::identity(n, n)).unwrap();
    let kappa = kappa2_kron(an, &params, MemoryCap::default()).unwrap();
    let w = params.scalars().unwrap();
    let dim = (n + 1) * (m + s);
    let mut best = 0.0_f64;
    for _ in 0..samples {
        let mut delta = gaussian_vec(rng, dim);
        delta /= delta.norm();
        // Weighted direction: the data move by `delta / weight`.
        let mut raw = DataDelta::from_vec(&delta, m, n, s).unwrap();
        raw.a /= w.phi;
        raw.b /= w.psi;
        raw.b_vec /= w.beta;
        raw.d /= w.vartheta;
        let dx = an.frechet(&raw).unwrap();
        best = best.max(w.xi * dx.norm() / kappa);
    }
    best
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let samples = 10_000;
    let mut reach = Vec::new();
    for m in [1, 2] {
        let an = tiny_problem(&mut rng, m);
        reach.push(((m, 1, 1), sampled_ratio(&an, &mut rng, samples)));
    }
    let an = analysis(&GenSpec { omega: 1e-2, seed: 7, ..GenSpec::new(1, 1, 2, 1) });
    reach.push(((2, 2, 1), sampled_ratio(&an, &mut rng, samples)));

    let mut wide = Vec::new();
    for (p, q, n, s) in [(2, 1, 2, 1), (3, 1, 3, 1), (3, 2, 3, 2), (4, 2, 4, 2), (6, 2, 4, 2), (6, 3, 5, 1)] {
        let an = analysis(&GenSpec { omega: 1e-2, seed: 11, ..GenSpec::new(p, q, n, s) });
        let d = (n + 1) * (p + q + s);
        assert!(d <= 60);
        wide.push((d, sampled_ratio(&an, &mut rng, samples)));
    }
    let never_exceeds = reach.iter().map(|r| r.1).chain(wide.iter().map(|w| w.1)).all(|r| r <= 1.0 + 1e-10);
    let reaches = reach.iter().all(|r| r.1 >= 0.9);
    let fmt = |v: &[(usize, f64)]| v.iter().map(|(d, r)| format!("D={d}:{r:.3}")).collect::<Vec<_>>().join(" ");
    let reach_d: Vec<(usize, f64)> = reach.iter().map(|((m, n, s), r)| ((n + 1) * (m + s), *r)).collect();
    Outcome {
        pass: never_exceeds && reaches,
        detail: format!(
            "{samples} samples; max/kappa2 on reach set [{}]; larger D (never-exceeds only) [{}]",
            fmt(&reach_d),
            fmt(&wide)
        ),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let l = Matrix::identity(210, 210);
    let mut dominance = true;
    let mut summary = Vec::new();
    let mut ok = true;
    for (kappa_a, check) in [(10.0, "tight"), (1e6, "bounded")] {
        let mut rm = Vec::new();
        let mut rc = Vec::new();
        for rep in 0..20u64 {
            let spec = GenSpec {
                kappa_a,
                kappa_b: 10.0,
                omega: 1e-4,
                seed: 4000 + rep,
                ..GenSpec::new(300, 120, 210, 140)
            };
            let v = ubound_values(&analysis(&spec), &l).unwrap();
            dominance &= v.kappam_u >= v.kappam * (1.0 - 1e-12) && v.kappac_u >= v.kappac * (1.0 - 1e-12);
            rm.push(v.r_m());
            rc.push(v.r_c());
        }
        let max = rm.iter().copied().fold(f64::MIN, f64::max);
        let min = rm.iter().copied().fold(f64::MAX, f64::min);
        let med = median(&rm);
        let cmax = rc.iter().copied().fold(f64::MIN, f64::max);
        ok &= match check {
            "tight" => [max, med, min].iter().all(|r| (r - 1.0).abs() <= 1e-4),
            _ => max <= 1.5,
        };
        summary.push(format!(
            "kappaA={kappa_a:e}: r_m max/median/min = {max:.6}/{med:.6}/{min:.6}, r_c max = {cmax:.6}"
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome { pass: ok && dominance && secs < 300.0, detail: format!("dominance={dominance}; {}", summary.join("; ")) }
}

fn example_spec(tau: f64, seed: u64) -> GenSpec {
    GenSpec { omega: 1e-9, kappa_a: 10.0, kappa_b: 1.0, tau, seed, ..GenSpec::new(20, 10, 20, 5) }
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for tau in [0.0, 4.0] {
        for (name, l) in [("I", LChoice::Identity), ("[I3;0]", LChoice::Leading(3)), ("convex", LChoice::Convex)] {
            let (mut n2, mut nm, mut nc) = (0, 0, 0);
            for trial in 0..100u64 {
                let t = errbound_trial(&example_spec(tau, 2018 + trial), l, 1e-9).unwrap();
                n2 += (t.r2 <= 2.0 * t.kappa2_bd) as usize;
                nm += (t.rm <= 2.0 * t.kappam_bd) as usize;
                nc += (t.rc <= 2.0 * t.kappac_bd) as usize;
            }
            pass &= n2 >= 95 && nm >= 95 && nc >= 95;
            parts.push(format!("tau={tau} L={name}: {n2}/{nm}/{nc}"));
        }
    }
    Outcome { pass, detail: format!("trials within 2x bound (r2/rm/rc) of 100: {}", parts.join(", ")) }
}

fn criterion_6() -> Outcome {
    let over = |tau: f64| {
        let (mut normwise, mut comp) = (Vec::new(), Vec::new());
        for trial in 0..20u64 {
            let t = errbound_trial(&example_spec(tau, 6000 + trial), LChoice::Identity, 1e-9).unwrap();
            normwise.push(t.kappa2_bd / t.r2);
            comp.push(t.kappac_bd / t.rc);
        }
        (median(&normwise), median(&comp))
    };
    let (n0, c0) = over(0.0);
    let (n4, c4) = over(4.0);
    let growth = n4 / n0;
    let comp_change = (c4 / c0).max(c0 / c4);
    Outcome {
        pass: growth >= 10.0 && comp_change < 10.0,
        detail: format!(
            "median kappa2_bd/r2: {n0:.3e} -> {n4:.3e} (x{growth:.1}); median kappac_bd/rc: {c0:.3e} -> {c4:.3e} (x{comp_change:.2})"
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let cap = MemoryCap::default();
    let (mut els_worst, mut sol_worst, mut wls_worst) = (0.0_f64, 0.0_f64, 0.0_f64);
    for seed in 0..50u64 {
        let n = rng.random_range(2..8);
        let s = rng.random_range(1..n);
        let m = n + rng.random_range(0..5);
        let g = gen_problem(&GenSpec { omega: 1e-2, kappa_b: 3.0, seed, ..GenSpec::new(m, 0, n, s) }).unwrap();
        let p = g.problem;
        let els = ElsProblem::new(p.a.clone(), p.b.clone(), p.b_vec.clone(), p.d.clone()).unwrap();
        // Nonzero d so that the pseudoinverse form exercises both terms.
        let els = ElsProblem { d: Vector::from_fn(s, |_, _| rng.random_range(-1.0..1.0)), ..els };
        let ea = ElsAnalysis::new(els.clone()).unwrap();
        let eils = EilsAnalysis::new(els.to_eils().unwrap()).unwrap();
        let params = CondParams::from_preset(CondPreset::NormwiseRelative2, &eils, Matrix::identity(n, n)).unwrap();
        let l = Matrix::identity(n, n);
        let pairs = [
            (ea.kappa2_kron(&params, cap).unwrap(), kappa2_kron(&eils, &params, cap).unwrap()),
            (ea.kappa2_form1(&params).unwrap(), kappa2_form1(&eils, &params).unwrap()),
            (
                ea.kappa2_form2(&params, ZeroSolutionPolicy::Error).unwrap(),
                kappa2_form2(&eils, &params, ZeroSolutionPolicy::Error).unwrap(),
            ),
            (ea.kappa_mixed(&l).unwrap(), condnum::kappa_mixed(&eils, &l).unwrap()),
            (ea.kappa_comp(&l).unwrap(), condnum::kappa_comp(&eils, &l).unwrap()),
        ];
        for (a, b) in pairs {
            els_worst = els_worst.max(rel(a, b));
        }
        let x = &ea.solution().x;
        sol_worst = sol_worst.max((x - els_pinv_crosscheck(&els)).norm() / x.norm());
    }
    for _ in 0..50 {
        let n = rng.random_range(1..8);
        let m = n + rng.random_range(1..6);
        let a = Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0)) + Matrix::identity(m, n) * 2.0;
        let b = Vector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let w = WlsAnalysis::new(WlsProblem::new(a.clone(), b.clone(), Matrix::identity(m, m)).unwrap()).unwrap();
        let i = IlsAnalysis::new(IlsProblem::new(a, b, SignatureMatrix::identity(m)).unwrap()).unwrap();
        let l = Matrix::identity(n, n);
        let params = i.core.preset(CondPreset::NormwiseRelative2, l.clone()).unwrap();
        let pairs = [
            (w.kappa2_kron(&params, cap).unwrap(), i.kappa2_kron(&params, cap).unwrap()),
            (w.kappa2_form1(&params).unwrap(), i.kappa2_form1(&params).unwrap()),
            (w.kappa2_form2(&params).unwrap(), i.kappa2_form2(&params, ZeroSolutionPolicy::Error).unwrap()),
            (w.core.kappa_mixed(&l).unwrap(), i.core.kappa_mixed(&l).unwrap()),
            (w.core.kappa_comp(&l).unwrap(), i.core.kappa_comp(&l).unwrap()),
        ];
        for (a, b) in pairs {
            wls_worst = wls_worst.max(rel(a, b));
        }
    }
    Outcome {
        pass: els_worst <= 1e-10 && wls_worst <= 1e-10 && sol_worst <= 1e-10,
        detail: format!(
            "50 instances each: ELS vs EILS(J=I) {els_worst:.2e}, WLS(W=I) vs ILS(J=I) {wls_worst:.2e}, closed vs pseudoinverse solution {sol_worst:.2e}"
        ),
    }
}

fn timing_spec(m: usize, n: usize, s: usize) -> GenSpec {
    let p = 2 * m / 3;
    GenSpec { omega: 1e-6, kappa_a: 10.0, kappa_b: 1.0, seed: 2018, ..GenSpec::new(p, m - p, n, s) }
}

fn criterion_8() -> Outcome {
    let cap = MemoryCap::default();
    let t = time_forms(&analysis(&timing_spec(240, 120, 80)), 5, cap).unwrap();
    let kron_t = t.kron.unwrap_or(f64::NAN);
    let order = kron_t >= 5.0 * t.c1 && t.c1 < t.c2;

    let big = analysis(&timing_spec(960, 480, 320));
    let params = CondParams::unit(Matrix::identity(480, 480));
    let guard = matches!(kappa2_kron(&big, &params, cap), Err(EilsError::MemoryGuard { .. }));
    let start = Instant::now();
    let k1 = kappa2_form1(&big, &params).unwrap();
    let big_c1 = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let k2 = kappa2_form2(&big, &params, ZeroSolutionPolicy::Error).unwrap();
    let big_c2 = start.elapsed().as_secs_f64();
    Outcome {
        pass: order && guard && big_c1 < 5.0 && big_c2 < 5.0 && rel(k2, k1) <= 1e-8,
        detail: format!(
            "(240,120,80) median s: kron {kron_t:.4}, c1 {:.4}, c2 {:.4} (kron/c1 = {:.0}); (960,480,320): guard refused kron = {guard}, c1 {big_c1:.3} s, c2 {big_c2:.3} s",
            t.c1,
            t.c2,
            kron_t / t.c1
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let rand_mat = |rng: &mut ChaCha8Rng, r: usize, c: usize| Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let (m, n, p, q) = (
            rng.random_range(1..5),
            rng.random_range(1..5),
            rng.random_range(1..5),
            rng.random_range(1..5),
        );
        let a = rand_mat(&mut rng, m, n);
        let x = rand_mat(&mut rng, n, p);
        let b = rand_mat(&mut rng, p, q);
        let lhs = vec(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vec(&x);
        worst = worst.max((lhs - rhs).amax());

        let pmn = vec_perm(m, n).unwrap();
        worst = worst.max((pmn.apply(&vec(&a)).unwrap() - vec(&a.transpose())).amax());

        let bb = rand_mat(&mut rng, p, q);
        let swapped = vec_perm(p, m).unwrap().to_dense() * kron(&a, &bb) * vec_perm(n, q).unwrap().to_dense();
        worst = worst.max((swapped - kron(&bb, &a)).amax());

        let row = rand_mat(&mut rng, 1, n);
        let lhs = kron(&row, &bb) * vec_perm(n, q).unwrap().to_dense();
        worst = worst.max((lhs - kron(&bb, &row)).amax());
    }
    let mut ddag_ok = ddag(0.0) == 1.0 && ddag(2.0) == 0.5 && ddag(-4.0) == -0.25;
    ddag_ok &= ddag(ddag(0.0)) == 1.0 && ddag(ddag(3.0)) == 3.0;
    for _ in 0..1000 {
        let c: f64 = rng.random_range(-1e3..1e3);
        ddag_ok &= ddag2_abs(c) == c.abs() && ddag(c).is_finite() && ddag(c) != 0.0;
        let e = rng.random_range(-60..60);
        let pow2 = 2.0_f64.powi(e);
        ddag_ok &= ddag(ddag(pow2)) == pow2;
    }
    ddag_ok &= ddag2_abs(0.0) == 1.0;
    let z = Vector::from_column_slice(&[5.0, 0.0]);
    ddag_ok &= densela::entrywise_div(&z, &Vector::from_column_slice(&[0.0, 2.0])).unwrap()
        == Vector::from_column_slice(&[5.0, 0.0]);
    Outcome {
        pass: worst <= 1e-14 && ddag_ok,
        detail: format!("50 random instances, max identity residual {worst:.1e}; ddag conventions exact = {ddag_ok}"),
    }
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let (mut jres, mut kb, mut rn) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut valid = true;
    for seed in 0..40u64 {
        let p = rng.random_range(1..=8);
        let q = rng.random_range(0..=4);
        let h = gen_j_orthogonal(p, q, seed, DEFAULT_HYPERBOLIC_CAP);
        let j = SignatureMatrix::new(p, q).to_dense();
        let scale = densela::spectral(&h).powi(2);
        jres = jres.max((h.transpose() * &j * &h - &j).amax() / scale);

        let n = rng.random_range(2..=8);
        let s = rng.random_range(1..n);
        let m = n + rng.random_range(0..6);
        let q = rng.random_range(0..=(m - (n - s)).min(3));
        let kappa_b = 10.0_f64.powf(rng.random_range(0.0..4.0));
        let omega = 10.0_f64.powf(rng.random_range(-10.0..0.0));
        let g = gen_problem(&GenSpec { kappa_b, omega, seed, ..GenSpec::new(m - q, q, n, s) }).unwrap();
        // A 1x1 triangular factor always has condition number one.
        if s >= 2 {
            kb = kb.max(rel(densela::cond2(&g.problem.b), kappa_b));
        }
        rn = rn.max(rel(g.r_true.norm(), omega));
        valid &= validate(&g.problem, DEFAULT_TOL).failure().is_none();
    }
    Outcome {
        pass: jres <= 1e-10 && kb <= 0.05 && rn <= 1e-13 && valid,
        detail: format!(
            "40 draws: max |H^TJH-J|/||H||^2 = {jres:.1e}, max rel kappa(B) error (s >= 2) {kb:.1e}, max rel ||r|| error {rn:.1e}, all validate = {valid}"
        ),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("three-form equivalence", criterion_1),
        ("derivative correctness", criterion_2),
        ("sup characterization", criterion_3),
        ("bound dominance and tightness", criterion_4),
        ("first-order error bounds", criterion_5),
        ("scaling sensitivity", criterion_6),
        ("specialization coherence", criterion_7),
        ("form-timing ordering", criterion_8),
        ("notation identities", criterion_9),
        ("generator contracts", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2}: {name} ({secs:.1} s) {}", i + 1, out.detail);
        failed += usize::from(!out.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
