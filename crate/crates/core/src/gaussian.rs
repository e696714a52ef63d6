//! Monte Carlo realization of the gaussian crossed product.
//!
//! A sample `γ ~ N(0, I_d)` turns `x = Σ B(ξ_g) ⋊ λ(g)` into the matrix
//! `M[a,b] = Σ_i γ_i (α_{a⁻¹} ξ_{ab⁻¹})_i`. Trial `t` draws from a ChaCha8
//! stream selected by `t` under the base seed, so results do not depend on how
//! trials are scheduled across threads.

use crate::cocycles::Cocycle;
use crate::linalg::{hermitian_eigenvalues, psd_root_norm, CMatrix};
use crate::quad::{oscillatory_tail, GaussRule, Trig};
use crate::riesz::{expectation_col, expectation_row, split_strategies, CrossedElement};
use crate::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Independent standard normal vector for one trial.
pub fn gaussian_sample(seed: u64, trial: u64, dim: usize) -> DVector<f64> {
    let mut rng = trial_rng(seed, trial);
    DVector::from_fn(dim, |_, _| crate::linalg::standard_normal(&mut rng))
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `M[a,b] = ⟨γ, α_{a⁻¹} ξ_{ab⁻¹}⟩`.
pub fn realize_crossed(c: &Cocycle, x: &CrossedElement, gamma: &DVector<f64>) -> Result<CMatrix> {
    let group = c.group().as_finite()?;
    let n = group.order();
    if gamma.len() != c.dim() || x.dim() != c.dim() {
        return Err(Error::Dimension("gaussian sample or element does not match the cocycle".into()));
    }
    // ⟨γ, α_{a⁻¹} v⟩ = ⟨α_a γ, v⟩
    let weights: Vec<DVector<f64>> = (0..n).map(|a| c.apply_action(a, gamma)).collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(n, n, |a, b| {
        let k = group.mul(a, group.inv(b));
        x.coeff(k).iter().zip(weights[a].iter()).map(|(z, &w)| z * w).sum::<Complex64>()
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub p: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

/// `(mean v)^{1/p}` with a block-jackknife standard error.
/// Blocks hold 100 trials (single trials below 200).
pub fn jackknife_power(values: &[f64], p: f64) -> (f64, f64) {
    let n = values.len();
    let block = if n < 200 { 1 } else { 100 };
    let sums: Vec<f64> = values.chunks(block).map(|c| c.iter().sum()).collect();
    let sizes: Vec<usize> = values.chunks(block).map(|c| c.len()).collect();
    let total: f64 = sums.iter().sum();
    let est = (total / n as f64).max(0.0).powf(1.0 / p);
    let b = sums.len();
    if b < 2 {
        return (est, f64::NAN);
    }
    let leave: Vec<f64> =
        (0..b).map(|i| ((total - sums[i]) / (n - sizes[i]) as f64).max(0.0).powf(1.0 / p)).collect();
    let mean = leave.iter().sum::<f64>() / b as f64;
    let var = leave.iter().map(|v| (v - mean).powi(2)).sum::<f64>() * (b - 1) as f64 / b as f64;
    (est, var.sqrt())
}

/// Per-trial eigenvalues of `M*M`.
fn trial_spectra(c: &Cocycle, x: &CrossedElement, trials: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    crate::par::map_range(trials, |t| {
        let gamma = gaussian_sample(seed, t as u64, c.dim());
        let m = realize_crossed(c, x, &gamma)?;
        Ok(hermitian_eigenvalues(&(m.adjoint() * m)))
    })
    .into_iter()
    .collect()
}

fn trace_power(eigs: &[f64], p: f64) -> f64 {
    eigs.iter().map(|&l| l.max(0.0).powf(p / 2.0)).sum::<f64>() / eigs.len() as f64
}

/// Monte Carlo `‖x‖_{G_p ⋊ G}`.
pub fn gp_norm_mc(c: &Cocycle, x: &CrossedElement, p: f64, trials: usize, seed: u64) -> Result<McEstimate> {
    Ok(gp_norms_mc(c, x, &[p], trials, seed)?.remove(0))
}

/// Several exponents evaluated on the same samples.
pub fn gp_norms_mc(c: &Cocycle, x: &CrossedElement, ps: &[f64], trials: usize, seed: u64) -> Result<Vec<McEstimate>> {
    if trials < 2 {
        return Err(Error::Invalid("Monte Carlo needs at least 2 trials".into()));
    }
    if let Some(&p) = ps.iter().find(|&&p| p.is_nan() || p < 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let spectra = trial_spectra(c, x, trials, seed)?;
    Ok(ps
        .iter()
        .map(|&p| {
            let values: Vec<f64> = spectra.iter().map(|e| trace_power(e, p)).collect();
            let (estimate, stderr) = jackknife_power(&values, p);
            McEstimate { p, estimate, stderr, trials, seed }
        })
        .collect())
}

/// Conditional row/column norm. Exact for `p ≥ 2`; for `p < 2`, the minimum
/// of the splitting strategies (an upper bound).
pub fn rcp_norm(c: &Cocycle, x: &CrossedElement, p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if p >= 2.0 {
        let col = crate::algebra::regular_rep_matrix(&expectation_col(c, x, x)?)?;
        let row = crate::algebra::regular_rep_matrix(&expectation_row(c, x, x)?)?;
        return Ok(psd_root_norm(&col, p).max(psd_root_norm(&row, p)));
    }
    Ok(split_strategies(c, x, p)?.iter().map(|s| s.value).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Serialize)]
pub struct KhintchineReport {
    pub p: f64,
    pub gp: McEstimate,
    pub rcp: f64,
    pub ratio: f64,
    pub stderr: f64,
    /// `ratio ≥ 1 − 3·stderr`.
    pub lower_bound_holds: bool,
}

pub fn khintchine_report(c: &Cocycle, x: &CrossedElement, p: f64, trials: usize, seed: u64) -> Result<KhintchineReport> {
    if p < 2.0 {
        return Err(Error::InvalidExponent(p));
    }
    let gp = gp_norm_mc(c, x, p, trials, seed)?;
    let rcp = rcp_norm(c, x, p)?;
    let ratio = gp.estimate / rcp;
    let stderr = gp.stderr / rcp;
    Ok(KhintchineReport { p, ratio, stderr, lower_bound_holds: ratio >= 1.0 - 3.0 * stderr, gp, rcp })
}

#[derive(Debug, Clone, Serialize)]
pub struct PisierReport {
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub sign_mean: f64,
    pub sign_stderr: f64,
    /// `(x, p.v.∫ sin(xt)/t dt)` pairs.
    pub dirichlet: Vec<(f64, f64)>,
    pub trials: usize,
    pub seed: u64,
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// `∫_ℝ sin(xt)/t dt = π sign(x)`, by Gauss panels on `[0, 4π]` and an
/// accelerated tail.
pub fn dirichlet_integral(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let w = x.abs();
    let rule = GaussRule::new(32);
    let a = 4.0 * PI / w;
    let panels = 16;
    let head: f64 = (0..panels)
        .map(|k| {
            let lo = a * k as f64 / panels as f64;
            let hi = a * (k + 1) as f64 / panels as f64;
            rule.integrate(lo, hi, |t| if t == 0.0 { w } else { (w * t).sin() / t })
        })
        .sum();
    let tail = oscillatory_tail(|t| 1.0 / t, w, Trig::Sin, a, 1e-10)?;
    Ok(2.0 * x.signum() * (head + tail))
}

/// `E[sign(γ)γ] = √(2/π)` by Monte Carlo, plus `E[sign γ] = 0` and the
/// Dirichlet integral at `x = ±1`.
pub fn pisier_scalar_check(trials: usize, seed: u64) -> Result<PisierReport> {
    if trials < 2 {
        return Err(Error::Invalid("Monte Carlo needs at least 2 trials".into()));
    }
    let draws: Vec<f64> = crate::par::map_range(trials, |t| gaussian_sample(seed, t as u64, 1)[0]);
    let prod: Vec<f64> = draws.iter().map(|g| g.signum() * g).collect();
    let signs: Vec<f64> = draws.iter().map(|g| g.signum()).collect();
    let (estimate, stderr) = mean_and_stderr(&prod);
    let (sign_mean, sign_stderr) = mean_and_stderr(&signs);
    let dirichlet = [1.0, -1.0].iter().map(|&x| dirichlet_integral(x).map(|v| (x, v))).collect::<Result<_>>()?;
    Ok(PisierReport { estimate, stderr, target: (2.0 / PI).sqrt(), sign_mean, sign_stderr, dirichlet, trials, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::build_cocycle_gns;
    use crate::groups::{word_length, FiniteGroup, Group};

    fn cyclic_gns(n: usize) -> Cocycle {
        let g = Group::Finite(FiniteGroup::cyclic(n).unwrap()).into_ref();
        build_cocycle_gns(&word_length(&g, &[1]).unwrap(), 1e-9).unwrap()
    }

    fn e1(c: &Cocycle) -> CrossedElement {
        let mut u = DVector::zeros(c.dim());
        u[0] = Complex64::new(1.0, 0.0);
        CrossedElement::single(c.group(), 0, u)
    }

    #[test]
    fn realization_examples() {
        let c = cyclic_gns(4);
        let gamma = DVector::from_vec(vec![0.7, -1.3]);
        let u = DVector::from_vec(vec![Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0)]);
        let m = realize_crossed(&c, &CrossedElement::single(c.group(), 0, u.clone()), &gamma).unwrap();
        for a in 0..4 {
            let rotated = c.apply_action(c.group().inv(a), &u.map(|z| z.re)).unwrap();
            let rotated_im = c.apply_action(c.group().inv(a), &u.map(|z| z.im)).unwrap();
            let expected = Complex64::new(gamma.dot(&rotated), gamma.dot(&rotated_im));
            assert!((m[(a, a)] - expected).norm() < 1e-12);
            for b in 0..4 {
                if a != b {
                    assert_eq!(m[(a, b)], Complex64::new(0.0, 0.0));
                }
            }
        }
        let z = realize_crossed(&c, &CrossedElement::zero(c.group(), 2), &gamma).unwrap();
        assert_eq!(z.camax(), 0.0);
    }

    #[test]
    fn jackknife_on_constant_is_exact() {
        let (e, s) = jackknife_power(&vec![4.0; 500], 2.0);
        assert_eq!(e, 2.0);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn determinism_across_schedules() {
        let c = cyclic_gns(4);
        let x = e1(&c);
        let a = gp_norm_mc(&c, &x, 4.0, 300, 17).unwrap();
        let b = crate::par::sequential(|| gp_norm_mc(&c, &x, 4.0, 300, 17).unwrap());
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn gaussian_moments() {
        let c = cyclic_gns(4);
        let x = e1(&c);
        let two = gp_norm_mc(&c, &x, 2.0, 20_000, 1).unwrap();
        assert!((two.estimate - 1.0).abs() < 3.0 * two.stderr, "{two:?}");
        let four = gp_norm_mc(&c, &x, 4.0, 20_000, 2).unwrap();
        assert!((four.estimate - 3f64.powf(0.25)).abs() < 3.0 * four.stderr, "{four:?}");
    }

    #[test]
    fn rcp_examples() {
        let c = cyclic_gns(6);
        let u = DVector::from_vec(vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, -2.0), Complex64::new(0.5, 0.0)]);
        let x = CrossedElement::single(c.group(), 2, u.clone());
        for p in [1.5, 2.0, 4.0] {
            assert!((rcp_norm(&c, &x, p).unwrap() - u.norm()).abs() < 1e-10);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = CrossedElement::random(c.group(), 3, &mut rng);
        assert!((rcp_norm(&c, &y, 2.0).unwrap() - y.l2_norm_sqr().sqrt()).abs() < 1e-10);
    }

    #[test]
    fn pisier_targets() {
        let r = pisier_scalar_check(20_000, 5).unwrap();
        assert!((r.estimate - r.target).abs() < 3.0 * r.stderr);
        assert!(r.sign_mean.abs() < 3.0 * r.sign_stderr);
        for (x, v) in r.dirichlet {
            assert!((v - PI * x.signum()).abs() < 1e-3);
        }
    }

    #[test]
    fn monotone_in_p_on_shared_samples() {
        let c = cyclic_gns(8);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = CrossedElement::random(c.group(), c.dim(), &mut rng);
        let v = gp_norms_mc(&c, &x, &[1.0, 2.0, 3.0, 4.0, 6.0], 400, 9).unwrap();
        for w in v.windows(2) {
            assert!(w[0].estimate <= w[1].estimate * (1.0 + 1e-12));
        }
    }
}
