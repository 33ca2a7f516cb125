#![allow(dead_code)]

use eilscond::genrand::{gen_problem, GenSpec};
use eilscond::{EilsAnalysis, Matrix};

/// A random well-posed problem of shape `(p + q) × n` with `s` constraints.
pub fn analysis(p: usize, q: usize, n: usize, s: usize, seed: u64) -> EilsAnalysis {
    let spec = GenSpec { seed, omega: 1e-2, kappa_b: 3.0, ..GenSpec::new(p, q, n, s) };
    EilsAnalysis::new(gen_problem(&spec).unwrap().problem).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn first_rows(n: usize, k: usize) -> Matrix {
    Matrix::from_fn(n, k, |i, j| if i == j { 1.0 } else { 0.0 })
}
