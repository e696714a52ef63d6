//! Fractional-laplacian lengths `ψ_β(ξ) = k_n(β)|ξ|^{2β}` on `ℝⁿ`.
//!
//! `k_n(β) = 2∫(1 − cos 2π⟨ξ/|ξ|, s⟩)|s|^{−n−2β} ds`. The main route splits it
//! into a radial integral (small-ball series, geometric Gauss panels, and an
//! accelerated oscillatory tail) times an angular integral by Gauss-Legendre
//! in the polar angle. The direct route integrates along the direction of `ξ`
//! after the transverse variables are integrated out in closed form.

use crate::quad::{integrate_geometric, oscillatory_tail, GaussRule, Trig};
use crate::{Error, Result};
use serde::Serialize;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FractionalLength {
    pub psi: f64,
    pub kn: f64,
    /// `ψ_β(ξ)` by the direct route.
    pub psi_direct: f64,
}

fn check(n: usize, beta: f64) -> Result<()> {
    if n == 0 || n > 3 {
        return Err(Error::Dimension(format!("fractional lengths need 1 ≤ n ≤ 3, got {n}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidExponent(beta));
    }
    Ok(())
}

/// `∫_0^∞ (1 − cos(ω r)) r^{−1−2β} dr`.
fn radial_integral(omega: f64, beta: f64) -> Result<f64> {
    let a = 2.0 * beta;
    // small ball: 1 − cos t = t²/2 − t⁴/24 + t⁶/720 − …
    let delta = 1e-2 / omega;
    let series = |k: i32, c: f64| c * omega.powi(k) * delta.powf(k as f64 - a) / (k as f64 - a);
    let small = series(2, 0.5) - series(4, 1.0 / 24.0) + series(6, 1.0 / 720.0) - series(8, 1.0 / 40320.0);
    let upper = 40.0 * PI / omega;
    let rule = GaussRule::new(24);
    let middle = integrate_geometric(&rule, delta, upper, 8, |r| (1.0 - (omega * r).cos()) * r.powf(-1.0 - a));
    // tail: ∫ r^{−1−a} − ∫ cos(ωr) r^{−1−a}
    let plain = upper.powf(-a) / a;
    let osc = oscillatory_tail(|r| r.powf(-1.0 - a), omega, Trig::Cos, upper, 1e-10)?;
    Ok(small + middle + plain - osc)
}

/// `∫_{S^{n−1}} |ω₁|^{2β} dω` by Gauss-Legendre in the polar angle.
fn angular_integral(n: usize, beta: f64) -> f64 {
    let a = 2.0 * beta;
    let rule = GaussRule::new(32);
    match n {
        1 => 2.0,
        2 => {
            // four quarter-arcs; geometric panels towards the zero of cos at π/2
            4.0 * integrate_geometric(&rule, 1e-12, PI / 2.0, 6, |u| u.sin().powf(a))
        }
        _ => {
            // polar angle θ from the ξ axis: 2π ∫ |cos θ|^{a} sin θ dθ
            4.0 * PI * integrate_geometric(&rule, 1e-12, PI / 2.0, 6, |u| u.sin().powf(a) * u.cos())
        }
    }
}

/// The constant `k_n(β)`.
pub fn kn(n: usize, beta: f64) -> Result<f64> {
    check(n, beta)?;
    Ok(2.0 * radial_integral(2.0 * PI, beta)? * angular_integral(n, beta))
}

/// `ψ_β(ξ)` along the direction of `ξ`: the transverse integral
/// `∫_{ℝ^{n−1}} (u² + |v|²)^{−(n+2β)/2} dv = c·|u|^{−1−2β}` is closed-form, the
/// remaining line integral runs in the original variable `u`.
pub fn psi_direct(n: usize, beta: f64, xi: &[f64]) -> Result<f64> {
    check(n, beta)?;
    if xi.len() != n {
        return Err(Error::Dimension("ξ has the wrong length".into()));
    }
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r == 0.0 {
        return Ok(0.0);
    }
    let transverse = if n == 1 {
        1.0
    } else {
        let m = (n - 1) as f64;
        PI.powf(m / 2.0) * gamma((1.0 + 2.0 * beta) / 2.0) / gamma((n as f64 + 2.0 * beta) / 2.0)
    };
    // line integral over u ∈ ℝ, even integrand
    let line = 2.0 * radial_integral(2.0 * PI * r, beta)?;
    Ok(2.0 * transverse * line)
}

/// `ψ_β(ξ) = k_n(β)|ξ|^{2β}` with the direct-route value attached.
pub fn fractional_length(n: usize, beta: f64, xi: &[f64]) -> Result<FractionalLength> {
    let k = kn(n, beta)?;
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    Ok(FractionalLength { psi: k * r2.powf(beta), kn: k, psi_direct: psi_direct(n, beta, xi)? })
}
