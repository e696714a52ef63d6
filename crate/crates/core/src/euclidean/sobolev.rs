//! Sobolev-type multiplier norms built on the fractional lengths
//! `ψ_ε(ξ) = k_n(ε)|ξ|^{2ε}`.
//!
//! A symbol `m̃` is sampled on a frequency grid. The band norm is
//! `‖D_{n/2+ε}(√ψ_ε φ_j m̃)‖₂`, where `D_α` multiplies the transform of its
//! argument by `|·|^α`. The isometry check compares `‖h‖_{L₂(μ_ε)}` with the
//! same norm of `√ψ_ε m_h`, `dμ_ε = |x|^{−n−2ε}dx`.

use super::fractional::kn;
use super::grid::{Domain, GridFunction, GridSpec};
use super::partition::{phi_j, PartitionOfUnity};
use crate::quad::{geometric_panels, GaussRule};
use crate::{par, Complex64, Error, Result};
use serde::Serialize;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Symbols available by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BuiltinSymbol {
    /// `sign(ξ₁)`.
    Sign,
    /// `ξ₁/|ξ|`.
    RieszCoordinate,
    /// `log|ξ|`.
    Log,
    One,
}

impl BuiltinSymbol {
    pub const ALL: [BuiltinSymbol; 4] =
        [BuiltinSymbol::Sign, BuiltinSymbol::RieszCoordinate, BuiltinSymbol::Log, BuiltinSymbol::One];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "sign" => Ok(BuiltinSymbol::Sign),
            "riesz-coordinate" => Ok(BuiltinSymbol::RieszCoordinate),
            "log" => Ok(BuiltinSymbol::Log),
            "one" => Ok(BuiltinSymbol::One),
            other => Err(Error::Invalid(format!("unknown symbol {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinSymbol::Sign => "sign",
            BuiltinSymbol::RieszCoordinate => "riesz-coordinate",
            BuiltinSymbol::Log => "log",
            BuiltinSymbol::One => "one",
        }
    }

    /// Value at `ξ`; singular points evaluate to zero.
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = match self {
            BuiltinSymbol::Sign => {
                if xi[0] > 0.0 {
                    1.0
                } else if xi[0] < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            BuiltinSymbol::RieszCoordinate => {
                if r > 0.0 {
                    xi[0] / r
                } else {
                    0.0
                }
            }
            BuiltinSymbol::Log => {
                if r > 0.0 {
                    r.ln()
                } else {
                    0.0
                }
            }
            BuiltinSymbol::One => 1.0,
        };
        Complex64::new(v, 0.0)
    }

    /// Samples the symbol on a frequency grid.
    pub fn sample(&self, spec: GridSpec) -> GridFunction {
        let s = *self;
        GridFunction::from_fn(spec, Domain::Frequency, move |xi| s.eval(xi))
    }
}

/// `D_α g`: transform, multiply by `|·|^α` (zero at the origin bin), and
/// transform back.
pub fn d_alpha(g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if alpha == 0.0 {
        return Ok(g.clone());
    }
    let mut t = g.transform();
    if alpha < 0.0 {
        let o = t.spec().origin();
        let scale = t.max_abs().max(f64::MIN_POSITIVE);
        if t.data()[o].norm() > 1e-10 * scale {
            return Err(Error::Grid(format!(
                "D_α with α = {alpha} < 0 needs mean-zero input, origin weight {:e}",
                t.data()[o].norm()
            )));
        }
    }
    let o = t.spec().origin();
    t = t.multiply_radial(|r| if r > 0.0 { r.powf(alpha) } else { 0.0 });
    t.data_mut()[o] = Complex64::new(0.0, 0.0);
    Ok(t.transform())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidExponent(eps));
    }
    Ok(())
}

/// Whether the band `j` sits inside the frequency box with at least 8 cells
/// across its inner radius.
pub fn band_resolved(spec: &GridSpec, j: i32) -> bool {
    let (a, b) = PartitionOfUnity::support(j);
    b < spec.half_width && a >= 8.0 * spec.spacing()
}

/// One band of the Sobolev condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandNorm {
    pub j: i32,
    pub value: f64,
    /// Share of `‖D_α F‖²` carried by dual points in the outer quarter of the
    /// box; large values mean the grid does not resolve the band.
    pub edge_fraction: f64,
}

fn weighted_norm(f: &GridFunction, alpha: f64) -> (f64, f64) {
    let t = f.transform();
    let spec = *t.spec();
    let edge = 0.75 * spec.half_width;
    let terms = par::map_range(spec.len(), |i| {
        let r = spec.radius(i);
        let w = if r > 0.0 { r.powf(2.0 * alpha) } else { 0.0 };
        let v = w * t.data()[i].norm_sqr();
        let p = spec.point(i);
        let outer = p[..spec.n].iter().any(|x| x.abs() > edge);
        (v, if outer { v } else { 0.0 })
    });
    let total: f64 = terms.iter().map(|t| t.0).sum();
    let outer: f64 = terms.iter().map(|t| t.1).sum();
    let cell = spec.cell();
    ((cell * total).sqrt(), if total > 0.0 { outer / total } else { 0.0 })
}

/// `‖D_{n/2+ε}(√ψ_ε φ_j m̃)‖₂` for a symbol sampled on a frequency grid.
pub fn sobolev_b1_norm(symbol: &GridFunction, eps: f64, j: i32, partition: &PartitionOfUnity) -> Result<BandNorm> {
    check_eps(eps)?;
    if symbol.domain() != Domain::Frequency {
        return Err(Error::Grid("symbols must be sampled in frequency variables".into()));
    }
    if j < partition.j_min || j > partition.j_max {
        return Err(Error::Invalid(format!("band {j} outside the partition range")));
    }
    let spec = *symbol.spec();
    if !band_resolved(&spec, j) {
        return Err(Error::Grid(format!("band {j} is not resolved by the frequency grid")));
    }
    let k = kn(spec.n, eps)?;
    let f = symbol.multiply_radial(|r| k.sqrt() * r.powf(eps) * phi_j(j, r));
    let alpha = spec.n as f64 / 2.0 + eps;
    let (value, edge_fraction) = weighted_norm(&f, alpha);
    Ok(BandNorm { j, value, edge_fraction })
}

#[derive(Debug, Clone, Serialize)]
pub struct B1Report {
    pub n: usize,
    pub eps: f64,
    pub kn: f64,
    pub per_j: Vec<BandNorm>,
    /// Bands of the partition the grid could not resolve.
    pub skipped: Vec<i32>,
    pub sup: f64,
    /// `|m̃|` at the origin bin, the separate `|m(e)|` term.
    pub origin_value: f64,
    /// Set when the bands `j ≥ 1` grow strictly and the last exceeds the
    /// first by a quarter.
    pub divergent: bool,
}

/// The sup over resolved bands with the per-band table.
pub fn theorem_b1_report(symbol: &GridFunction, eps: f64, partition: &PartitionOfUnity) -> Result<B1Report> {
    check_eps(eps)?;
    let spec = *symbol.spec();
    let (resolved, skipped): (Vec<i32>, Vec<i32>) = partition.indices().partition(|&j| band_resolved(&spec, j));
    let per_j = resolved
        .iter()
        .map(|&j| sobolev_b1_norm(symbol, eps, j, partition))
        .collect::<Result<Vec<_>>>()?;
    let sup = per_j.iter().map(|b| b.value).fold(0.0, f64::max);
    let tail: Vec<f64> = per_j.iter().filter(|b| b.j >= 1).map(|b| b.value).collect();
    let divergent = tail.len() >= 2
        && tail.windows(2).all(|w| w[1] > w[0])
        && tail[tail.len() - 1] >= 1.25 * tail[0];
    Ok(B1Report {
        n: spec.n,
        eps,
        kn: kn(spec.n, eps)?,
        per_j,
        skipped,
        sup,
        origin_value: symbol.data()[spec.origin()].norm(),
        divergent,
    })
}

/// `‖φ₀ m̃(2^j·)‖_{H²_{n/2+ε}} = ‖(1+|·|²)^{(n/2+ε)/2}(φ₀ m̃(2^j·))^∧‖₂`, with the
/// rescaled symbol sampled on `spec`.
pub fn classical_sobolev_norm<F>(symbol: F, eps: f64, j: i32, spec: GridSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    check_eps(eps)?;
    if spec.half_width <= 2.0 {
        return Err(Error::Grid("the unit band needs a box wider than 2".into()));
    }
    let scale = 2f64.powi(j);
    let f = GridFunction::from_fn(spec, Domain::Frequency, |eta| {
        let r = eta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let w = phi_j(0, r);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut p = [0.0; 3];
        for (a, x) in eta.iter().enumerate() {
            p[a] = scale * x;
        }
        symbol(&p[..eta.len()]) * w
    });
    let alpha = spec.n as f64 / 2.0 + eps;
    let t = f.transform();
    let weighted = t.multiply_radial(|r| (1.0 + r * r).powf(alpha / 2.0));
    Ok(weighted.l2_norm())
}

/// `n π^{n/4}/√Γ(n/2) · ε^{−1/2}`.
pub fn remark26_factor(n: usize, eps: f64) -> f64 {
    let nf = n as f64;
    nf * PI.powf(nf / 4.0) / gamma(nf / 2.0).sqrt() / eps.sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub symbol: String,
    pub j: i32,
    pub b1: f64,
    pub classical: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub eps: f64,
    pub rows: Vec<ComparisonRow>,
    /// Largest observed `b1/classical`.
    pub c_obs: f64,
    pub remark26_factor: f64,
}

/// Band-by-band comparison of the refined norm with the classical one.
pub fn b1_comparison(
    symbols: &[BuiltinSymbol],
    eps: f64,
    partition: &PartitionOfUnity,
    freq: GridSpec,
    unit: GridSpec,
) -> Result<ComparisonReport> {
    let mut rows = Vec::new();
    for s in symbols {
        let sampled = s.sample(freq);
        for j in partition.indices().filter(|&j| band_resolved(&freq, j)) {
            let b1 = sobolev_b1_norm(&sampled, eps, j, partition)?.value;
            let classical = classical_sobolev_norm(|x| s.eval(x), eps, j, unit)?;
            let ratio = if classical > 0.0 { b1 / classical } else { 0.0 };
            rows.push(ComparisonRow { symbol: s.name().into(), j, b1, classical, ratio });
        }
    }
    let c_obs = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ComparisonReport { eps, rows, c_obs, remark26_factor: remark26_factor(freq.n, eps) })
}

/// The profile `x e^{−x}` of the second Sobolev condition.
pub fn b2_profile(x: f64) -> f64 {
    x * (-x).exp()
}

/// Whether `φ(s|·|²)` fits the grid: negligible at the box edge and at
/// least 16 cells out to its peak radius `s^{−1/2}`.
pub fn scale_resolved(spec: &GridSpec, s: f64) -> bool {
    s * spec.half_width * spec.half_width >= 50.0 && s.powf(-0.5) >= 16.0 * spec.spacing()
}

#[derive(Debug, Clone, Serialize)]
pub struct B2Report {
    pub eps: f64,
    /// `(s, ‖D_{n/2+ε}(√ψ_ε φ(s|·|²) m̃)‖₂)` on resolved scales.
    pub profile: Vec<(f64, f64)>,
    /// Scales of the requested grid the box cannot represent.
    pub excluded: Vec<f64>,
    pub max: f64,
    /// `(max − min)/max` over the profile.
    pub spread: f64,
}

/// Max over the resolved part of `s_grid` of the second Sobolev norm.
pub fn theorem_b2_norm(symbol: &GridFunction, eps: f64, s_grid: &[f64]) -> Result<B2Report> {
    check_eps(eps)?;
    if symbol.domain() != Domain::Frequency {
        return Err(Error::Grid("symbols must be sampled in frequency variables".into()));
    }
    let spec = *symbol.spec();
    let k = kn(spec.n, eps)?;
    let alpha = spec.n as f64 / 2.0 + eps;
    let (kept, excluded): (Vec<f64>, Vec<f64>) = s_grid.iter().partition(|&&s| scale_resolved(&spec, s));
    let profile: Vec<(f64, f64)> = kept
        .iter()
        .map(|&s| {
            let f = symbol.multiply_radial(|r| k.sqrt() * r.powf(eps) * b2_profile(s * r * r));
            (s, weighted_norm(&f, alpha).0)
        })
        .collect();
    let max = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    let min = profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let spread = if max > 0.0 { (max - min) / max } else { 0.0 };
    Ok(B2Report { eps, profile, excluded, max, spread })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Lemma24Result {
    pub grid: usize,
    /// `‖h‖_{L₂(μ_ε)}` by quadrature.
    pub lhs: f64,
    /// `‖D_{n/2+ε}(√ψ_ε m_h)‖₂` on the grid.
    pub rhs: f64,
    pub rel_error: f64,
    /// `∫ h dμ_ε`.
    pub mean: f64,
    /// `max|Re √ψ_ε m_h| / max|√ψ_ε m_h|`; zero for odd `h`.
    pub real_part: f64,
}

/// Nodes on `(0, x_max]` for integrands oscillating at most like `cos(2πξ_max x)`.
fn mu_nodes(x_max: f64, xi_max: f64, small: f64) -> Vec<(f64, f64)> {
    let rule = GaussRule::new(20);
    let mut nodes = Vec::new();
    let split = 1.0f64.min(x_max);
    for (a, b) in geometric_panels(small, split, 16) {
        nodes.extend(rule.mapped(a, b));
    }
    if x_max > split {
        let width = (0.5f64).min(1.0 / xi_max.max(1e-12));
        let panels = ((x_max - split) / width).ceil() as usize;
        let w = (x_max - split) / panels as f64;
        for p in 0..panels {
            let a = split + p as f64 * w;
            nodes.extend(rule.mapped(a, a + w));
        }
    }
    nodes
}

/// Isometry check for `h` on `ℝ` at one frequency grid.
///
/// `√ψ_ε m_h(ξ) = ∫ h(x)(e^{2πiξx} − 1)dμ_ε(x)` is evaluated by quadrature at
/// every grid frequency, cut at `x_max` and at a small ball whose share is
/// added from the linear expansion of `h`. The norm uses the exact identity
/// `‖D_α G‖₂ = (2π)^{−1}‖D_{α−1} G′‖₂` with `G′` by second-order differences,
/// because `G` tends to nonzero constants at infinity and is not periodic.
/// Requires `ε ∈ [1/2, 1)` so that `α − 1 ≥ 0`.
pub fn lemma24_isometry_check<H>(h: H, x_max: f64, eps: f64, spec: GridSpec) -> Result<Lemma24Result>
where
    H: Fn(f64) -> f64 + Sync + Send,
{
    check_eps(eps)?;
    if spec.n != 1 {
        return Err(Error::Dimension("the isometry check runs on the line".into()));
    }
    if eps < 0.5 {
        return Err(Error::InvalidExponent(eps));
    }
    let small = 1e-7;
    let xi_max = spec.half_width;
    let nodes = mu_nodes(x_max, xi_max, small);
    let weight = |x: f64| x.powf(-1.0 - 2.0 * eps);
    let even: Vec<f64> = nodes.iter().map(|&(x, _)| 0.5 * (h(x) + h(-x))).collect();
    let odd: Vec<f64> = nodes.iter().map(|&(x, _)| 0.5 * (h(x) - h(-x))).collect();
    let ball = small.powf(2.0 - 2.0 * eps) / (2.0 - 2.0 * eps);
    let (he, ho) = (0.5 * (h(small) + h(-small)), 0.5 * (h(small) - h(-small)));

    let mut lhs2 = (h(small).powi(2) + h(-small).powi(2)) / (small * small) * ball;
    let mut mean = 2.0 * he / (small * small) * ball;
    for (i, &(x, w)) in nodes.iter().enumerate() {
        let wx = w * weight(x);
        lhs2 += wx * (h(x).powi(2) + h(-x).powi(2));
        mean += 2.0 * wx * even[i];
    }
    let lhs = lhs2.sqrt();
    if mean.abs() > 1e-8 * lhs.max(1.0) {
        return Err(Error::NotMeanZero(mean.abs()));
    }

    let g = par::map_range(spec.m, |k| {
        let xi = spec.coord(k);
        let omega = 2.0 * PI * xi;
        let mut re = -he * omega * omega * ball;
        let mut im = 2.0 * (ho / small) * omega * ball;
        for (i, &(x, w)) in nodes.iter().enumerate() {
            let wx = w * weight(x);
            let (s, c) = (omega * x).sin_cos();
            re += 2.0 * wx * even[i] * (c - 1.0);
            im += 2.0 * wx * odd[i] * s;
        }
        Complex64::new(re, im)
    });
    let scale = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let real_part = if scale > 0.0 { g.iter().map(|z| z.re.abs()).fold(0.0, f64::max) / scale } else { 0.0 };

    let d = spec.spacing();
    let m = spec.m;
    let dg: Vec<Complex64> = (0..m)
        .map(|k| {
            if k == 0 {
                (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * d)
            } else if k == m - 1 {
                (3.0 * g[m - 1] - 4.0 * g[m - 2] + g[m - 3]) / (2.0 * d)
            } else {
                (g[k + 1] - g[k - 1]) / (2.0 * d)
            }
        })
        .collect();
    let dg = GridFunction::from_samples(spec, Domain::Frequency, dg)?;
    let rhs = d_alpha(&dg, eps - 0.5)?.l2_norm() / (2.0 * PI);
    let rel_error = if lhs > 0.0 { (lhs - rhs).abs() / lhs } else { rhs };
    Ok(Lemma24Result { grid: m, lhs, rhs, rel_error, mean, real_part })
}

/// The isometry check on a sequence of grids over the same box.
pub fn lemma24_refinement<H>(h: H, x_max: f64, eps: f64, half_width: f64, grids: &[usize]) -> Result<Vec<Lemma24Result>>
where
    H: Fn(f64) -> f64 + Sync + Send,
{
    grids
        .iter()
        .map(|&m| lemma24_isometry_check(&h, x_max, eps, GridSpec::new(1, m, half_width)?))
        .collect()
}

/// A named real test function.
pub type NamedFn = (&'static str, fn(f64) -> f64);

/// Mean-zero test functions for the isometry, with their cutoff radius.
pub fn lemma24_battery() -> Vec<NamedFn> {
    vec![
        ("x·exp(−x²)", |x| x * (-x * x).exp()),
        ("x·exp(−x²/2)", |x| x * (-x * x / 2.0).exp()),
        ("x³·exp(−x²)", |x| x.powi(3) * (-x * x).exp()),
        ("(x²−2x⁴)·exp(−x²)", |x| (x * x - 2.0 * x.powi(4)) * (-x * x).exp()),
        ("x(1+x²)·exp(−x²)", |x| x * (1.0 + x * x) * (-x * x).exp()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(spec: GridSpec) -> GridFunction {
        GridFunction::from_fn(spec, Domain::Space, |x| Complex64::new((-x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0))
    }

    #[test]
    fn d_alpha_examples() {
        let spec = GridSpec::new(1, 1024, 8.0).unwrap();
        let g = gaussian(spec);
        assert_eq!(d_alpha(&g, 0.0).unwrap().data(), g.data());
        // α = 2 is −Δ/4π²; compare with the 5-point stencil
        let d2 = d_alpha(&g, 2.0).unwrap();
        let h = spec.spacing();
        let f = |x: f64| (-x * x).exp();
        let mut worst: f64 = 0.0;
        for k in 0..spec.m {
            let x = spec.coord(k);
            if x.abs() > 2.0 {
                continue;
            }
            let lap = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h);
            let want = -lap / (4.0 * PI * PI);
            worst = worst.max((d2.data()[k].re - want).abs() / (2.0 / (4.0 * PI * PI)));
        }
        assert!(worst < 1e-4, "{worst}");
        // negative orders need mean zero
        assert!(d_alpha(&g, -0.5).is_err());
    }

    #[test]
    fn d_alpha_is_multiplicative_on_mean_zero_input() {
        let spec = GridSpec::new(2, 64, 6.0).unwrap();
        let g = GridFunction::from_fn(spec, Domain::Space, |x| Complex64::new(x[0] * (-x[0] * x[0] - x[1] * x[1]).exp(), 0.0));
        let a = d_alpha(&d_alpha(&g, 0.7).unwrap(), -0.7).unwrap();
        assert!(a.max_abs_diff(&g) < 1e-8);
        let b = d_alpha(&d_alpha(&g, 0.3).unwrap(), 0.9).unwrap();
        let c = d_alpha(&g, 1.2).unwrap();
        assert!(b.max_abs_diff(&c) < 1e-8 * c.max_abs().max(1.0));
    }

    #[test]
    fn zero_symbol_gives_zero() {
        let spec = GridSpec::new(1, 1024, 16.0).unwrap();
        let zero = GridFunction::zeros(spec, Domain::Frequency);
        let p = PartitionOfUnity::new(-2, 2).unwrap();
        assert_eq!(sobolev_b1_norm(&zero, 0.5, 0, &p).unwrap().value, 0.0);
        assert_eq!(theorem_b2_norm(&zero, 0.5, &[1.0]).unwrap().max, 0.0);
        let unit = GridSpec::new(1, 512, 4.0).unwrap();
        assert_eq!(classical_sobolev_norm(|_| Complex64::new(0.0, 0.0), 0.5, 0, unit).unwrap(), 0.0);
    }

    #[test]
    fn sign_symbol_is_dilation_invariant() {
        let spec = GridSpec::new(1, 4096, 16.0).unwrap();
        let m = BuiltinSymbol::Sign.sample(spec);
        let p = PartitionOfUnity::new(-2, 2).unwrap();
        let r = theorem_b1_report(&m, 0.5, &p).unwrap();
        assert_eq!(r.per_j.len(), 5);
        let max = r.sup;
        let min = r.per_j.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
        assert!((max - min) / max < 1e-3, "{:?}", r.per_j);
        assert!(!r.divergent);
        assert_eq!(r.origin_value, 0.0);
    }

    #[test]
    fn log_symbol_diverges() {
        let spec = GridSpec::new(1, 4096, 16.0).unwrap();
        let m = BuiltinSymbol::Log.sample(spec);
        let p = PartitionOfUnity::new(-2, 2).unwrap();
        let r = theorem_b1_report(&m, 0.5, &p).unwrap();
        assert!(r.divergent, "{:?}", r.per_j);
    }

    #[test]
    fn constant_symbol_flags_origin() {
        let spec = GridSpec::new(1, 4096, 16.0).unwrap();
        let m = BuiltinSymbol::One.sample(spec);
        let p = PartitionOfUnity::new(-2, 2).unwrap();
        let r = theorem_b1_report(&m, 0.5, &p).unwrap();
        assert_eq!(r.origin_value, 1.0);
        let min = r.per_j.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
        assert!((r.sup - min) / r.sup < 1e-3);
    }

    #[test]
    fn b2_profile_is_flat_for_sign() {
        assert!((b2_profile(1.0) - (-1f64).exp()).abs() < 1e-16);
        let spec = GridSpec::new(1, 4096, 16.0).unwrap();
        let m = BuiltinSymbol::Sign.sample(spec);
        let s_grid = crate::quad::log_grid(1e-4, 1e4, 10);
        let r = theorem_b2_norm(&m, 0.5, &s_grid).unwrap();
        assert!(r.profile.len() >= 10, "{}", r.profile.len());
        assert!(r.spread < 1e-3, "{}", r.spread);
    }

    #[test]
    fn remark_factor_values() {
        // n = 1: π^{1/4}/√Γ(1/2) = 1
        assert!((remark26_factor(1, 1.0) - 1.0).abs() < 1e-14);
        assert!((remark26_factor(2, 0.25) - 2.0 * PI.sqrt() * 2.0).abs() < 1e-12);
    }

    #[test]
    fn lemma24_analytic_case() {
        let spec = GridSpec::new(1, 2048, 8.0).unwrap();
        let r = lemma24_isometry_check(|x| x * (-x * x).exp(), 12.0, 0.5, spec).unwrap();
        assert!((r.lhs - (PI / 2.0).powf(0.25)).abs() < 1e-8, "{}", r.lhs);
        assert!(r.rel_error < 1e-3, "{r:?}");
        assert_eq!(r.real_part, 0.0);
    }

    #[test]
    fn lemma24_zero_and_not_mean_zero() {
        let spec = GridSpec::new(1, 256, 8.0).unwrap();
        let r = lemma24_isometry_check(|_| 0.0, 12.0, 0.5, spec).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let bad = lemma24_isometry_check(|x| x * x * (-x * x).exp(), 12.0, 0.5, spec);
        assert!(matches!(bad, Err(Error::NotMeanZero(_))));
    }

    #[test]
    fn lemma24_battery_refines() {
        for (name, h) in lemma24_battery() {
            let rs = lemma24_refinement(h, 12.0, 0.5, 8.0, &[1024, 2048, 4096]).unwrap();
            assert!(rs[1].rel_error < 5e-2, "{name}: {rs:?}");
            assert!(rs[0].rel_error > rs[1].rel_error && rs[1].rel_error > rs[2].rel_error, "{name}: {rs:?}");
        }
    }
}
