//! Benchmarks of the condition-number forms. The benches live in
//! `benches/forms.rs`; this library only holds shared setup.

use eilscond::GenSpec;

/// Generator settings of the timing experiments: `p/q = 2`, `‖r‖ = 1e-6`,
/// `κ(B) = 1`, `κ_A = 10`.
pub fn timing_spec(m: usize, n: usize, s: usize) -> GenSpec {
    let p = (2 * m).div_ceil(3).max(n - s);
    GenSpec { omega: 1e-6, kappa_a: 10.0, kappa_b: 1.0, ..GenSpec::new(p, m - p, n, s) }
}
