//! Smooth radial Littlewood-Paley partition of unity.
//!
//! `η(r) = S(2 − r)` with `S(t) = σ(t)/(σ(t) + σ(1 − t))`, `σ(t) = e^{−1/t}`
//! for `t > 0`, so `η = 1` on `[0, 1]` and `η = 0` on `[2, ∞)`. The annular
//! bump is `φ(r) = η(r) − η(2r)` and the dyadic pieces are `φ_j = φ(2^{−j}·)`.

use crate::{Error, Result};
use serde::Serialize;

fn sigma(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smooth_step(t: f64) -> f64 {
    let a = sigma(t);
    let b = sigma(1.0 - t);
    a / (a + b)
}

/// The generating profile, `1` on `[0, 1]` and `0` beyond `2`.
pub fn eta(r: f64) -> f64 {
    smooth_step(2.0 - r)
}

/// The annular bump `η(r) − η(2r)`, supported in `[1/2, 2]`.
pub fn phi(r: f64) -> f64 {
    eta(r) - eta(2.0 * r)
}

/// `φ(2^{−j} r)`.
pub fn phi_j(j: i32, r: f64) -> f64 {
    phi(r * 2f64.powi(-j))
}

/// `Σ_{i ≤ j} φ_i(r) = η(2^{−j} r)` for `r > 0`.
pub fn phi_up_to(j: i32, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    eta(r * 2f64.powi(-j))
}

/// A partition restricted to the dyadic range `[j_min, j_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionOfUnity {
    pub j_min: i32,
    pub j_max: i32,
}

impl PartitionOfUnity {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return Err(Error::Invalid(format!("empty dyadic range [{j_min}, {j_max}]")));
        }
        Ok(PartitionOfUnity { j_min, j_max })
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn phi_j(&self, j: i32, r: f64) -> f64 {
        phi_j(j, r)
    }

    /// `Σ_{j_min}^{j_max} φ_j(r)` summed term by term.
    pub fn sum(&self, r: f64) -> f64 {
        self.indices().map(|j| phi_j(j, r)).sum()
    }

    /// The telescoped form `η(2^{−j_max} r) − η(2^{−j_min+1} r)`.
    pub fn telescoped(&self, r: f64) -> f64 {
        eta(r * 2f64.powi(-self.j_max)) - eta(r * 2f64.powi(1 - self.j_min))
    }

    /// Radii on which the partition sums to one: `[2^{j_min}, 2^{j_max}]`.
    pub fn covered(&self) -> (f64, f64) {
        (2f64.powi(self.j_min), 2f64.powi(self.j_max))
    }

    /// Support of `φ_j`: `[2^{j−1}, 2^{j+1}]`.
    pub fn support(j: i32) -> (f64, f64) {
        (2f64.powi(j - 1), 2f64.powi(j + 1))
    }
}
