//! Poisson semigroup `P_t = e^{−t√(−Δ)}` on grids and its carré du champ.
//!
//! Two independent evaluations of `Γ(f, f)`:
//! the direct one `½(A(f̄)f + f̄Af − A|f|²)` with `A = √(−Δ)`, and the time
//! integral `∫_0^∞ P_t(|∇ₓP_tf|² + |∂_tP_tf|²) dt` by the trapezoid rule in
//! `log t`. Both act on the periodic box, where they agree identically, so
//! their gap measures quadrature error only.

use super::grid::{Domain, GridFunction, GridSpec};
use crate::{par, Complex64, Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

fn require_space(f: &GridFunction) -> Result<()> {
    if f.domain() != Domain::Space {
        return Err(Error::Grid("the Poisson semigroup acts on functions of x".into()));
    }
    Ok(())
}

/// Errors when `f` is not negligible on the faces of the box.
pub fn check_decay(f: &GridFunction) -> Result<()> {
    let spec = *f.spec();
    let max = f.max_abs();
    let mut edge: f64 = 0.0;
    for (i, z) in f.data().iter().enumerate() {
        let mut rest = i;
        let mut on_face = false;
        for _ in 0..spec.n {
            if rest % spec.m == 0 {
                on_face = true;
            }
            rest /= spec.m;
        }
        if on_face {
            edge = edge.max(z.norm());
        }
    }
    if edge > 1e-10 * max {
        return Err(Error::Grid(format!("insufficient decay at the box edge: {edge:e} vs max {max:e}")));
    }
    Ok(())
}

/// `P_t f` by the multiplier `e^{−2πt|ξ|}`.
pub fn poisson_apply(f: &GridFunction, t: f64) -> Result<GridFunction> {
    require_space(f)?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::Invalid(format!("Poisson time must be nonnegative, got {t}")));
    }
    Ok(f.radial_multiplier(|r| (-2.0 * PI * t * r).exp()))
}

/// `√(−Δ) f` by the multiplier `2π|ξ|`.
pub fn half_laplacian(f: &GridFunction) -> GridFunction {
    f.radial_multiplier(|r| 2.0 * PI * r)
}

/// `(−Δ)^{1/4} f` by the multiplier `(2π|ξ|)^{1/2}`.
pub fn quarter_laplacian(f: &GridFunction) -> GridFunction {
    f.radial_multiplier(|r| (2.0 * PI * r).sqrt())
}

/// `½(A(f̄)f + f̄Af − A|f|²)`.
pub fn carre_direct(f: &GridFunction) -> Result<GridFunction> {
    require_space(f)?;
    check_decay(f)?;
    let conj = f.map(|z| z.conj());
    let a_conj = half_laplacian(&conj);
    let a_f = half_laplacian(f);
    let a_mod = half_laplacian(&f.map(|z| Complex64::new(z.norm_sqr(), 0.0)));
    let n = f.data().len();
    let data = par::map_range(n, |i| {
        0.5 * (a_conj.data()[i] * f.data()[i] + conj.data()[i] * a_f.data()[i] - a_mod.data()[i])
    });
    GridFunction::from_samples(*f.spec(), Domain::Space, data)
}

/// Time nodes `[10^{−6}, 10^{5}]` on a log grid.
pub fn default_time_grid(points_per_decade: usize) -> Vec<f64> {
    crate::quad::log_grid(1e-6, 1e5, points_per_decade)
}

/// `∫_0^∞ P_t(|∇ₓP_tf|² + |∂_tP_tf|²) dt` over a uniform grid in `log t`.
pub fn carre_poisson(f: &GridFunction, t_grid: &[f64]) -> Result<GridFunction> {
    require_space(f)?;
    check_decay(f)?;
    if t_grid.len() < 3 || t_grid[0] <= 0.0 {
        return Err(Error::Invalid("time grid needs at least three positive nodes".into()));
    }
    let du = (t_grid[1] / t_grid[0]).ln();
    for w in t_grid.windows(2) {
        if ((w[1] / w[0]).ln() - du).abs() > 1e-9 * du.abs() {
            return Err(Error::Invalid("time grid must be uniform in log t".into()));
        }
    }
    let spec: GridSpec = *f.spec();
    let fhat = f.transform();
    let mut total = vec![Complex64::new(0.0, 0.0); spec.len()];
    for (idx, &t) in t_grid.iter().enumerate() {
        let ut = fhat.multiply_radial(|r| (-2.0 * PI * t * r).exp());
        let mut energy = vec![0.0; spec.len()];
        for axis in 0..=spec.n {
            let d = if axis < spec.n {
                ut.multiply(|xi| Complex64::new(0.0, 2.0 * PI * xi[axis]))
            } else {
                ut.multiply_radial(|r| -2.0 * PI * r)
            };
            let d = d.transform();
            for (e, z) in energy.iter_mut().zip(d.data()) {
                *e += z.norm_sqr();
            }
        }
        let energy = GridFunction::from_samples(
            spec,
            Domain::Space,
            energy.into_iter().map(|e| Complex64::new(e, 0.0)).collect(),
        )?;
        let smoothed = poisson_apply(&energy, t)?;
        let w = if idx == 0 || idx + 1 == t_grid.len() { 0.5 } else { 1.0 };
        for (acc, z) in total.iter_mut().zip(smoothed.data()) {
            *acc += z * (w * du * t);
        }
    }
    GridFunction::from_samples(spec, Domain::Space, total)
}

/// Largest relative gap between two evaluations on `|x| ≤ radius`.
pub fn interior_gap(a: &GridFunction, b: &GridFunction, radius: f64) -> f64 {
    let spec = *a.spec();
    let mut worst: f64 = 0.0;
    for i in 0..spec.len() {
        if spec.radius(i) <= radius {
            let d = (a.data()[i] - b.data()[i]).norm();
            let s = b.data()[i].norm();
            worst = worst.max(if s > 0.0 { d / s } else { d });
        }
    }
    worst
}

/// Least-squares slope of `log Γ` against `log|x|` on `r_lo ≤ |x| ≤ r_hi`.
pub fn decay_slope(gamma: &GridFunction, r_lo: f64, r_hi: f64) -> Result<f64> {
    let spec = *gamma.spec();
    let pts: Vec<(f64, f64)> = (0..spec.len())
        .filter_map(|i| {
            let r = spec.radius(i);
            let v = gamma.data()[i].re;
            (r >= r_lo && r <= r_hi && v > 0.0).then(|| (r.ln(), v.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::Grid("no positive samples in the fitting annulus".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnulusMass {
    pub k: i32,
    /// `∫_{2^k<|x|<2^{k+1}} Γ^{p/2}`.
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeyerReport {
    pub n: usize,
    pub p: f64,
    /// `2n/(n+1)`.
    pub threshold: f64,
    pub p_in_range: bool,
    /// Relative gap of the two `Γ` routes on `|x| ≤ L/4`, when the time
    /// integral was run.
    pub route_gap: Option<f64>,
    /// `min Γ(x)|x|^{n+1}` over `4 < |x| < L/2`.
    pub decay_constant: f64,
    /// Fitted exponent of `Γ` on `8 ≤ |x| ≤ 32`.
    pub slope: f64,
    pub annuli: Vec<AnnulusMass>,
    /// Every annulus keeps at least half the mass of the first one.
    pub non_decaying: bool,
    /// `‖(−Δ)^{1/4}f‖_p` on the grid.
    pub half_derivative_norm: f64,
    /// Non-decaying annuli with `p` in `(1, 2n/(n+1)]`.
    pub divergent: bool,
}

/// The failure of `‖Γ(f,f)^{1/2}‖_p ≲ ‖(−Δ)^{1/4}f‖_p` for small `p`.
/// `time_grid` switches on the time-integral route for the gap check.
pub fn meyer_failure_report(f: &GridFunction, p: f64, time_grid: Option<&[f64]>) -> Result<MeyerReport> {
    require_space(f)?;
    let spec = *f.spec();
    let n = spec.n;
    let nf = n as f64;
    if f.max_abs() == 0.0 {
        return Err(Error::Invalid("the test function must be nonzero".into()));
    }
    let threshold = 2.0 * nf / (nf + 1.0);
    let p_in_range = p > 1.0 && p <= threshold + 1e-12;
    let gamma = carre_direct(f)?;
    let route_gap = match time_grid {
        Some(ts) => Some(interior_gap(&carre_poisson(f, ts)?, &gamma, spec.half_width / 4.0)),
        None => None,
    };
    let l = spec.half_width;
    let mut decay_constant = f64::INFINITY;
    for i in 0..spec.len() {
        let r = spec.radius(i);
        if r > 4.0 && r < l / 2.0 {
            decay_constant = decay_constant.min(gamma.data()[i].re * r.powf(nf + 1.0));
        }
    }
    let slope = decay_slope(&gamma, 8.0, 32.0)?;
    let mut annuli = Vec::new();
    let mut k = 2;
    while 2f64.powi(k + 1) <= l / 2.0 {
        let (a, b) = (2f64.powi(k), 2f64.powi(k + 1));
        let mass: f64 = (0..spec.len())
            .filter(|&i| {
                let r = spec.radius(i);
                r > a && r < b
            })
            .map(|i| gamma.data()[i].re.max(0.0).powf(p / 2.0))
            .sum::<f64>()
            * spec.cell();
        annuli.push(AnnulusMass { k, mass });
        k += 1;
    }
    let non_decaying = annuli.len() >= 3 && annuli.iter().all(|a| a.mass > 0.0 && a.mass >= 0.5 * annuli[0].mass);
    let half_derivative_norm = quarter_laplacian(f).lp_norm(p);
    Ok(MeyerReport {
        n,
        p,
        threshold,
        p_in_range,
        route_gap,
        decay_constant,
        slope,
        annuli,
        non_decaying,
        half_derivative_norm,
        divergent: non_decaying && p_in_range,
    })
}

/// `e^{−|x|²}` on a space grid.
pub fn gaussian(spec: GridSpec) -> GridFunction {
    GridFunction::from_fn(spec, Domain::Space, |x| Complex64::new((-x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semigroup_law_and_zero() {
        let spec = GridSpec::new(1, 1024, 32.0).unwrap();
        let f = gaussian(spec);
        let a = poisson_apply(&poisson_apply(&f, 0.3).unwrap(), 0.9).unwrap();
        let b = poisson_apply(&f, 1.2).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
        let zero = GridFunction::zeros(spec, Domain::Space);
        assert_eq!(carre_direct(&zero).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn poisson_kernel_oracle() {
        // on the line P_t f = f * t/(π(t² + x²))
        let spec = GridSpec::new(1, 4096, 256.0).unwrap();
        let f = gaussian(spec);
        let t = 0.7;
        let pf = poisson_apply(&f, t).unwrap();
        let rule = crate::quad::GaussRule::new(40);
        for x in [0.0, 1.0, 3.5] {
            let conv: f64 = (0..80)
                .map(|p| {
                    let a = -10.0 + p as f64 * 0.25;
                    rule.integrate(a, a + 0.25, |y| (-y * y).exp() * t / (PI * (t * t + (x - y) * (x - y))))
                })
                .sum();
            let k = ((x + 256.0) / spec.spacing()).round() as usize;
            // periodic images add about √π·t/(π·512²) per neighbour
            assert!((pf.data()[k].re - conv).abs() < 1e-5, "x={x}: {} vs {conv}", pf.data()[k].re);
        }
    }

    #[test]
    fn cosine_carre_du_champ() {
        // Γ(cos 2πax, cos 2πax) = π|a|
        let spec = GridSpec::new(1, 256, 8.0).unwrap();
        let a = 0.25;
        let f = GridFunction::from_fn(spec, Domain::Space, |x| Complex64::new((2.0 * PI * a * x[0]).cos(), 0.0));
        let conj = f.map(|z| z.conj());
        let af = half_laplacian(&f);
        let amod = half_laplacian(&f.map(|z| Complex64::new(z.norm_sqr(), 0.0)));
        for i in 0..spec.m {
            let g = 0.5 * (af.data()[i] * f.data()[i] + conj.data()[i] * af.data()[i] - amod.data()[i]);
            assert!((g.re - PI * a).abs() < 1e-10);
        }
    }

    #[test]
    fn routes_agree_on_the_line() {
        let spec = GridSpec::new(1, 2048, 64.0).unwrap();
        let f = gaussian(spec);
        let a = carre_poisson(&f, &default_time_grid(12)).unwrap();
        let b = carre_direct(&f).unwrap();
        assert!(interior_gap(&a, &b, 16.0) < 1e-2);
    }

    #[test]
    fn rejects_slow_decay() {
        let spec = GridSpec::new(1, 256, 4.0).unwrap();
        let f = GridFunction::from_fn(spec, Domain::Space, |x| Complex64::new(1.0 / (1.0 + x[0] * x[0]), 0.0));
        assert!(carre_direct(&f).is_err());
    }

    #[test]
    fn line_report_decays_like_inverse_square() {
        let spec = GridSpec::new(1, 8192, 256.0).unwrap();
        let r = meyer_failure_report(&gaussian(spec), 1.0, None).unwrap();
        assert!((r.slope + 2.0).abs() < 0.2, "{}", r.slope);
        assert!(r.decay_constant > 0.0);
        assert!(r.non_decaying);
        // p = 1 sits outside (1, 1]
        assert!(!r.p_in_range && !r.divergent);
        assert!(r.half_derivative_norm.is_finite());
    }

    #[test]
    fn plane_doubling_scales_by_an_eighth() {
        let spec = GridSpec::new(2, 256, 64.0).unwrap();
        let g = carre_direct(&gaussian(spec)).unwrap();
        let at = |x: f64| {
            let k = ((x + 64.0) / spec.spacing()).round() as usize;
            g.data()[(spec.m / 2) * spec.m + k].re
        };
        let ratio = at(16.0) / at(8.0);
        assert!(ratio > 0.125 / 1.5 && ratio < 0.125 * 1.5, "{ratio}");
    }
}
