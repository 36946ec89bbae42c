//! Closed-form success probabilities for three items with two presented,
//! unanchored Mallows agents, and the complementarity regions they imply.

use serde::{Deserialize, Serialize};

fn z3(phi: f64) -> f64 {
    1.0 + 2.0 * (-phi).exp() + 2.0 * (-2.0 * phi).exp() + (-3.0 * phi).exp()
}

/// Probability that a single agent with accuracy `phi` ranks item 1 first
/// among three items.
pub fn ph(phi: f64) -> f64 {
    (1.0 + (-phi).exp()) / z3(phi)
}

/// Same expression as [`ph`], for the algorithm.
pub fn pa(phi: f64) -> f64 {
    ph(phi)
}

/// Joint success probability for `n = 3`, `k = 2`.
pub fn pc(phi_a: f64, phi_h: f64) -> f64 {
    let e = |x: f64| (-x).exp();
    let num = 1.0
        + e(phi_h)
        + e(2.0 * phi_h)
        + 2.0 * e(phi_a)
        + e(2.0 * phi_a)
        + e(phi_a + 2.0 * phi_h)
        + 3.0 * e(phi_a + phi_h)
        + 2.0 * e(2.0 * phi_a + phi_h);
    num / (z3(phi_a) * z3(phi_h))
}

/// Sign-determining factor of `pc - ph(phi_h)`.
pub fn hum_better_expr(phi_a: f64, phi_h: f64) -> f64 {
    (phi_a + phi_h).exp() + (2.0 * phi_a).exp() - phi_h.exp() - (2.0 * phi_h).exp()
}

/// Sign-determining factor of `pc - pa(phi_a)`.
pub fn alg_better_expr(phi_a: f64, phi_h: f64) -> f64 {
    -(phi_a + phi_h).exp() - (phi_a + 2.0 * phi_h).exp() - phi_a.exp()
        + 2.0 * (2.0 * phi_h).exp()
        + (3.0 * phi_h).exp()
}

/// The pipeline beats the human alone.
pub fn hum_better(phi_a: f64, phi_h: f64) -> bool {
    hum_better_expr(phi_a, phi_h) > 0.0
}

/// The pipeline beats the algorithm alone.
pub fn alg_better(phi_a: f64, phi_h: f64) -> bool {
    alg_better_expr(phi_a, phi_h) > 0.0
}

/// Sufficient region for complementarity with a more accurate human:
/// `phi_h > phi_a >= max(phi_h / 1.3, phi_h - 0.3)`.
pub fn in_human_lead_region(phi_a: f64, phi_h: f64) -> bool {
    phi_h > phi_a && phi_a >= (phi_h / 1.3).max(phi_h - 0.3)
}

/// Narrow region where a slightly more accurate algorithm still gains:
/// `phi_h < phi_a <= factor * phi_h` with `phi_h <= 1`. The sufficient
/// factor from the derivation is 1.1.
pub fn in_algo_lead_region(phi_a: f64, phi_h: f64, factor: f64) -> bool {
    phi_h <= 1.0 && phi_a > phi_h && phi_a <= factor * phi_h
}

/// Region where complementarity is ruled out: `phi_a >= phi_h + 0.15`
/// with `phi_h >= 1`.
pub fn in_no_complementarity_region(phi_a: f64, phi_h: f64) -> bool {
    phi_h >= 1.0 && phi_a >= phi_h + 0.15
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub phi_a: f64,
    pub phi_h: f64,
    pub p_joint: f64,
    pub p_algo: f64,
    pub p_human: f64,
    pub complementary: bool,
    pub hum_better_region: bool,
    pub alg_better_region: bool,
}

impl RegionPoint {
    pub fn at(phi_a: f64, phi_h: f64) -> Self {
        let p_joint = pc(phi_a, phi_h);
        let p_algo = pa(phi_a);
        let p_human = ph(phi_h);
        Self {
            phi_a,
            phi_h,
            p_joint,
            p_algo,
            p_human,
            complementary: p_joint > p_algo.max(p_human),
            hum_better_region: in_human_lead_region(phi_a, phi_h),
            alg_better_region: in_algo_lead_region(phi_a, phi_h, 1.1),
        }
    }
}

/// Evenly spaced grid `lo..=hi` with `resolution` points per axis, `phi_a`
/// varying slowest.
pub fn complementarity_grid(lo: f64, hi: f64, resolution: usize) -> Vec<RegionPoint> {
    let axis = linspace(lo, hi, resolution);
    axis.iter()
        .flat_map(|&a| axis.iter().map(move |&h| RegionPoint::at(a, h)))
        .collect()
}

pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Whether the pipeline is better when the more accurate of the two
/// accuracies `phi_1 > phi_2` belongs to the human.
pub fn asymmetry_check(phi_1: f64, phi_2: f64) -> bool {
    asymmetry_gap(phi_1, phi_2) > 0.0
}

/// `pc(phi_2, phi_1) - pc(phi_1, phi_2)`.
pub fn asymmetry_gap(phi_1: f64, phi_2: f64) -> f64 {
    pc(phi_2, phi_1) - pc(phi_1, phi_2)
}
