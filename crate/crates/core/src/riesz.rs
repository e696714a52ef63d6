//! Riesz transforms, the derivation `δ`, carré du champ, crossed-product
//! conditional expectations and square functions.
//!
//! Conventions: the Riesz symbol is `2πi⟨b(g),h⟩/√ψ(g)`; `δ` carries no `2π`.
//! An element `x = Σ_g B(ξ_g) ⋊ λ(g)` of the gaussian crossed product is stored
//! as its coefficient vectors `ξ_g ∈ ℂ^d`. Inner products on `ℂ^d` are
//! conjugate-linear in the first slot.

use crate::algebra::{lp_norm, positive_root_norm, AlgebraElement};
use crate::cocycles::{gromov_form, Cocycle, LengthFunction, Side};
use crate::groups::GroupRef;
use crate::linalg::{spectral_radius_sym, RMatrix};
use crate::quad::log_grid;
use crate::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// Lengths at or below this are treated as zero (the set `G₀`).
pub const ZERO_LENGTH: f64 = 1e-12;

/// `Σ_g B(ξ_g) ⋊ λ(g)`.
#[derive(Debug, Clone)]
pub struct CrossedElement {
    group: GroupRef,
    coeffs: Vec<DVector<Complex64>>,
}

impl CrossedElement {
    pub fn zero(group: &GroupRef, dim: usize) -> Self {
        Self { group: group.clone(), coeffs: vec![DVector::zeros(dim); group.order()] }
    }

    /// `B(u) ⋊ λ(g)`.
    pub fn single(group: &GroupRef, g: usize, u: DVector<Complex64>) -> Self {
        let mut x = Self::zero(group, u.len());
        x.coeffs[g] = u;
        x
    }

    pub fn from_coeffs(group: &GroupRef, coeffs: Vec<DVector<Complex64>>) -> Result<Self> {
        let d = coeffs.first().map_or(0, |v| v.len());
        if coeffs.len() != group.order() || coeffs.iter().any(|v| v.len() != d) {
            return Err(Error::Dimension("crossed coefficients do not match the group".into()));
        }
        Ok(Self { group: group.clone(), coeffs })
    }

    /// Gaussian complex coefficients on every element.
    pub fn random<R: rand::Rng + ?Sized>(group: &GroupRef, dim: usize, rng: &mut R) -> Self {
        let mut normal = || Complex64::new(crate::linalg::standard_normal(rng), crate::linalg::standard_normal(rng));
        let coeffs = (0..group.order()).map(|_| DVector::from_fn(dim, |_, _| normal())).collect();
        Self { group: group.clone(), coeffs }
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.coeffs.first().map_or(0, |v| v.len())
    }

    pub fn coeff(&self, g: usize) -> &DVector<Complex64> {
        &self.coeffs[g]
    }

    pub fn coeffs(&self) -> &[DVector<Complex64>] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { group: self.group.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale_per_element(&self, w: &[f64]) -> Self {
        let coeffs = self.coeffs.iter().zip(w).map(|(v, &t)| v * Complex64::new(t, 0.0)).collect();
        Self { group: self.group.clone(), coeffs }
    }

    /// `Σ_g ‖ξ_g‖²`.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm_squared()).sum()
    }

    /// `(x*)_k = α_k conj(ξ_{k⁻¹})`.
    pub fn adjoint(&self, c: &Cocycle) -> Result<Self> {
        let coeffs = (0..self.coeffs.len())
            .map(|k| apply_action_complex(c, k, &self.coeffs[self.group.inv(k)].conjugate()))
            .collect::<Result<_>>()?;
        Ok(Self { group: self.group.clone(), coeffs })
    }

    /// Same element in a rotated cocycle basis: `ξ ↦ Q ξ`.
    pub fn rotate(&self, q: &RMatrix) -> Self {
        let qc = q.map(|x| Complex64::new(x, 0.0));
        Self { group: self.group.clone(), coeffs: self.coeffs.iter().map(|v| &qc * v).collect() }
    }

    /// Appends zero coordinates.
    pub fn pad(&self, extra: usize) -> Self {
        let d = self.dim() + extra;
        Self { group: self.group.clone(), coeffs: self.coeffs.iter().map(|v| v.clone().resize_vertically(d, ZERO)).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
    }
}

/// `α_g v` for complex `v`, acting on real and imaginary parts.
pub fn apply_action_complex(c: &Cocycle, g: usize, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let re = c.apply_action(g, &v.map(|z| z.re))?;
    let im = c.apply_action(g, &v.map(|z| z.im))?;
    Ok(re.zip_map(&im, Complex64::new))
}

fn check_dims(c: &Cocycle, xs: &[&CrossedElement]) -> Result<()> {
    if xs.iter().any(|x| x.dim() != c.dim() || x.group.order() != c.group().order()) {
        return Err(Error::Dimension("crossed element does not match the cocycle".into()));
    }
    Ok(())
}

/// `⟨u, v⟩ = Σ conj(u_i) v_i`.
fn inner(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// `Σ u_i v_i`.
fn bilinear(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

/// `m(g) = 2πi⟨b(g),h⟩/√ψ(g)`, zero on `G₀`.
pub fn riesz_symbol(c: &Cocycle, h: &DVector<f64>) -> Result<Vec<Complex64>> {
    if h.len() != c.dim() {
        return Err(Error::Dimension("direction vector".into()));
    }
    Ok((0..c.group().order())
        .map(|g| {
            let psi = c.length().value(g);
            if psi <= ZERO_LENGTH {
                ZERO
            } else {
                TWO_PI_I * (c.vector(g).dot(h) / psi.sqrt())
            }
        })
        .collect())
}

/// Largest `|f̂(g)|` on `G₀`.
pub fn mass_on_zero_set(psi: &LengthFunction, f: &AlgebraElement) -> f64 {
    (0..f.coeffs().len()).filter(|&g| psi.value(g) <= ZERO_LENGTH).map(|g| f.coeff(g).norm()).fold(0.0, f64::max)
}

/// `f` with its coefficients on `G₀` removed.
pub fn project_mean_zero(psi: &LengthFunction, f: &AlgebraElement) -> AlgebraElement {
    let mut out = f.clone();
    for (g, z) in out.coeffs_mut().iter_mut().enumerate() {
        if psi.value(g) <= ZERO_LENGTH {
            *z = ZERO;
        }
    }
    out
}

fn require_mean_zero(psi: &LengthFunction, f: &AlgebraElement, auto_project: bool) -> Result<AlgebraElement> {
    let mass = mass_on_zero_set(psi, f);
    if mass > 0.0 && !auto_project {
        return Err(Error::NotMeanZero(mass));
    }
    Ok(project_mean_zero(psi, f))
}

/// Riesz transform in direction `h`.
pub fn apply_riesz_direction(c: &Cocycle, h: &DVector<f64>, f: &AlgebraElement, auto_project: bool) -> Result<AlgebraElement> {
    let f = require_mean_zero(c.length(), f, auto_project)?;
    let m = riesz_symbol(c, h)?;
    crate::algebra::fourier_multiplier(|g| Some(m[g]), &f)
}

/// `R_j f`, the Riesz transform along the basis vector `e_j`.
pub fn apply_riesz(c: &Cocycle, j: usize, f: &AlgebraElement, auto_project: bool) -> Result<AlgebraElement> {
    if j >= c.dim() {
        return Err(Error::Dimension(format!("basis index {j} ≥ dimension {}", c.dim())));
    }
    let f = require_mean_zero(c.length(), f, auto_project)?;
    let mut out = AlgebraElement::zero(f.group());
    for g in f.support() {
        let psi = c.length().value(g);
        if psi > ZERO_LENGTH {
            out.coeffs_mut()[g] = TWO_PI_I * (c.vector(g)[j] / psi.sqrt()) * f.coeff(g);
        }
    }
    Ok(out)
}

/// `A^s f` with `A: λ(g) ↦ ψ(g)λ(g)`; negative powers vanish on `G₀`.
pub fn length_power(psi: &LengthFunction, s: f64, f: &AlgebraElement) -> AlgebraElement {
    let mut out = f.clone();
    for (g, z) in out.coeffs_mut().iter_mut().enumerate() {
        let v = psi.value(g);
        *z *= if v <= ZERO_LENGTH {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            v.powf(s)
        };
    }
    out
}

/// `δ f`: `ξ_g = f̂(g) b(g)`.
pub fn delta(c: &Cocycle, f: &AlgebraElement) -> CrossedElement {
    let coeffs = (0..f.coeffs().len())
        .map(|g| c.vector(g).map(|x| Complex64::new(x, 0.0)) * f.coeff(g))
        .collect();
    CrossedElement { group: f.group().clone(), coeffs }
}

/// `δ* x`: coefficient `Σ_i ξ_{g,i} b(g)_i` at `g`.
pub fn delta_adjoint(c: &Cocycle, x: &CrossedElement) -> Result<AlgebraElement> {
    check_dims(c, &[x])?;
    let coeffs = (0..x.coeffs.len())
        .map(|g| x.coeffs[g].iter().zip(c.vector(g).iter()).map(|(z, &b)| z * b).sum())
        .collect();
    AlgebraElement::from_coeffs(&x.group, coeffs)
}

/// `E(x* y) = Σ_{g,h} ⟨ξ_g, η_h⟩ λ(g⁻¹h)`.
pub fn expectation_col(c: &Cocycle, x: &CrossedElement, y: &CrossedElement) -> Result<AlgebraElement> {
    check_dims(c, &[x, y])?;
    let group = &x.group;
    let n = group.order();
    let mut out = vec![ZERO; n];
    let xs: Vec<usize> = (0..n).filter(|&g| x.coeffs[g].iter().any(|z| *z != ZERO)).collect();
    let ys: Vec<usize> = (0..n).filter(|&h| y.coeffs[h].iter().any(|z| *z != ZERO)).collect();
    for &g in &xs {
        let gi = group.inv(g);
        for &h in &ys {
            let k = group.mul(gi, h).ok_or(Error::OutsideBall)?;
            out[k] += inner(&x.coeffs[g], &y.coeffs[h]);
        }
    }
    AlgebraElement::from_coeffs(group, out)
}

/// `E(x y*) = Σ_{g,h} Σ_i ξ_{g,i} (α_{gh⁻¹} conj η_h)_i λ(gh⁻¹)`.
pub fn expectation_row(c: &Cocycle, x: &CrossedElement, y: &CrossedElement) -> Result<AlgebraElement> {
    check_dims(c, &[x, y])?;
    let group = &x.group;
    let n = group.order();
    let mut out = vec![ZERO; n];
    let xs: Vec<usize> = (0..n).filter(|&g| x.coeffs[g].iter().any(|z| *z != ZERO)).collect();
    let ys: Vec<usize> = (0..n).filter(|&h| y.coeffs[h].iter().any(|z| *z != ZERO)).collect();
    let conj_y: Vec<DVector<Complex64>> = y.coeffs.iter().map(|v| v.conjugate()).collect();
    for &g in &xs {
        for &h in &ys {
            let k = group.mul(g, group.inv(h)).ok_or(Error::OutsideBall)?;
            let rotated = apply_action_complex(c, k, &conj_y[h])?;
            out[k] += bilinear(&x.coeffs[g], &rotated);
        }
    }
    AlgebraElement::from_coeffs(group, out)
}

/// The three evaluations of the carré du champ `Γ(f₁,f₂)`.
#[derive(Debug, Clone)]
pub struct GradientForm {
    /// `½(A(f₁*)f₂ + f₁*A(f₂) − A(f₁*f₂))`.
    pub generator: AlgebraElement,
    /// `Σ conj(f̂₁(g)) f̂₂(h) K(g,h) λ(g⁻¹h)`.
    pub gromov: AlgebraElement,
    /// `E(δf₁* δf₂)`.
    pub expectation: AlgebraElement,
    pub max_gap: f64,
}

/// `Γ(f₁, f₂)` three ways; fails when the routes disagree beyond `tol`
/// (relative to the largest coefficient).
pub fn gradient_form(c: &Cocycle, f1: &AlgebraElement, f2: &AlgebraElement, tol: f64) -> Result<GradientForm> {
    let psi = c.length();
    let f1s = f1.adjoint();
    let a = |f: &AlgebraElement| length_power(psi, 1.0, f);
    let generator = a(&f1s)
        .mul(f2)?
        .add(&f1s.mul(&a(f2))?)
        .sub(&a(&f1s.mul(f2)?))
        .scale(Complex64::new(0.5, 0.0));
    let k = gromov_form(psi, Side::Left)?;
    let group = f1.group();
    let mut gromov = AlgebraElement::zero(group);
    for g in f1.support() {
        for h in f2.support() {
            let q = group.mul(group.inv(g), h).ok_or(Error::OutsideBall)?;
            gromov.coeffs_mut()[q] += f1.coeff(g).conj() * f2.coeff(h) * k[(g, h)];
        }
    }
    let expectation = expectation_col(c, &delta(c, f1), &delta(c, f2))?;
    let scale = generator.coeffs().iter().chain(gromov.coeffs()).map(|z| z.norm()).fold(1.0, f64::max);
    let max_gap = generator.max_abs_diff(&gromov).max(generator.max_abs_diff(&expectation)).max(gromov.max_abs_diff(&expectation));
    if max_gap > tol * scale {
        return Err(Error::RouteMismatch { what: "gradient form".into(), gap: max_gap, tol: tol * scale });
    }
    Ok(GradientForm { generator, gromov, expectation, max_gap })
}

/// `u_j(x) = Σ_g ξ_{g,j} λ(g)`.
pub fn coordinate(x: &CrossedElement, j: usize) -> AlgebraElement {
    let coeffs = x.coeffs.iter().map(|v| v[j]).collect();
    AlgebraElement::from_coeffs(&x.group, coeffs).expect("sizes agree")
}

/// `Σ_k B(e_k) ⋊ b_k`.
pub fn crossed_from_family(family: &[AlgebraElement]) -> Result<CrossedElement> {
    let group = family.first().ok_or_else(|| Error::Invalid("empty family".into()))?.group().clone();
    let coeffs = (0..group.order()).map(|g| DVector::from_iterator(family.len(), family.iter().map(|b| b.coeff(g)))).collect();
    CrossedElement::from_coeffs(&group, coeffs)
}

/// `b̃_j` with coefficient `⟨Σ_k b̂_k(g) e_k, α_g e_j⟩ = (α_{g⁻¹} ξ_g)_j` at `g`.
pub fn twisted_family(c: &Cocycle, family: &[AlgebraElement]) -> Result<Vec<AlgebraElement>> {
    if family.len() != c.dim() {
        return Err(Error::Dimension("family length must equal the cocycle dimension".into()));
    }
    let x = crossed_from_family(family)?;
    let group = x.group.clone();
    let rotated: Vec<DVector<Complex64>> =
        (0..group.order()).map(|g| apply_action_complex(c, group.inv(g), &x.coeffs[g])).collect::<Result<_>>()?;
    Ok((0..c.dim())
        .map(|j| AlgebraElement::from_coeffs(&group, rotated.iter().map(|v| v[j]).collect()).expect("sizes agree"))
        .collect())
}

/// `Σ_j b_j* b_j`.
pub fn column_sum(family: &[AlgebraElement]) -> Result<AlgebraElement> {
    let group = family.first().ok_or_else(|| Error::Invalid("empty family".into()))?.group().clone();
    family.iter().try_fold(AlgebraElement::zero(&group), |acc, b| Ok(acc.add(&b.adjoint().mul(b)?)))
}

/// `Σ_j b_j b_j*`.
pub fn row_sum(family: &[AlgebraElement]) -> Result<AlgebraElement> {
    let group = family.first().ok_or_else(|| Error::Invalid("empty family".into()))?.group().clone();
    family.iter().try_fold(AlgebraElement::zero(&group), |acc, b| Ok(acc.add(&b.mul(&b.adjoint())?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareSide {
    Col,
    Row,
    TwistedRow,
}

/// All Riesz transforms `R_j f`.
pub fn riesz_family(c: &Cocycle, f: &AlgebraElement) -> Result<Vec<AlgebraElement>> {
    crate::par::map_range(c.dim(), |j| apply_riesz(c, j, f, false)).into_iter().collect()
}

/// `‖(Σ_j (R_jf)*(R_jf))^{1/2}‖_p` and its row and twisted-row versions.
pub fn square_function_norm(c: &Cocycle, f: &AlgebraElement, p: f64, side: SquareSide) -> Result<f64> {
    require_mean_zero(c.length(), f, false)?;
    if c.dim() == 0 {
        return Ok(0.0);
    }
    let sum = match side {
        SquareSide::Col => column_sum(&riesz_family(c, f)?)?,
        SquareSide::Row => column_sum(&riesz_family(c, &f.adjoint())?)?,
        SquareSide::TwistedRow => row_sum(&twisted_family(c, &riesz_family(c, f)?)?)?,
    };
    positive_root_norm(&sum, p)
}

/// One decomposition strategy in the `p < 2` upper bound.
#[derive(Debug, Clone, Serialize)]
pub struct StrategyValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremAReport {
    pub p: f64,
    pub lp_norm: f64,
    pub col: f64,
    pub row: f64,
    pub twisted_row: f64,
    /// `p ≥ 2`: `‖f‖_p / (max(col,row)/2π)`. `p < 2`: `‖f‖_p / upper bound`.
    pub ratio: f64,
    /// `"exact"` for `p ≥ 2`, `"upper bound"` for `p < 2`.
    pub kind: String,
    pub strategies: Vec<StrategyValue>,
    pub decomposition_bound: Option<f64>,
}

/// `‖E(φ₁*φ₁)^{1/2}‖_p + ‖E(φ₂φ₂*)^{1/2}‖_p` for `φ₁ = wφ`, `φ₂ = (1−w)φ`
/// with per-element weights `w`.
pub fn split_value(c: &Cocycle, phi: &CrossedElement, w: &[f64], p: f64) -> Result<f64> {
    let one_minus: Vec<f64> = w.iter().map(|t| 1.0 - t).collect();
    let p1 = phi.scale_per_element(w);
    let p2 = phi.scale_per_element(&one_minus);
    let col = positive_root_norm(&expectation_col(c, &p1, &p1)?, p)?;
    let row = positive_root_norm(&expectation_row(c, &p2, &p2)?, p)?;
    Ok(col + row)
}

/// Upper bound for the `p < 2` decomposition infimum over an explicit list of
/// splittings of `φ = δA^{−1/2}f`: all column, all row, even split, a greedy
/// per-element column/row assignment, and per-element weight descent.
pub fn decomposition_strategies(c: &Cocycle, f: &AlgebraElement, p: f64) -> Result<Vec<StrategyValue>> {
    split_strategies(c, &delta(c, &length_power(c.length(), -0.5, f)), p)
}

/// The strategy list of [`decomposition_strategies`] applied to any crossed element.
pub fn split_strategies(c: &Cocycle, phi: &CrossedElement, p: f64) -> Result<Vec<StrategyValue>> {
    let phi = phi.clone();
    let n = phi.coeffs.len();
    let support: Vec<usize> = (0..n).filter(|&g| phi.coeffs[g].iter().any(|z| *z != ZERO)).collect();
    let mut out = Vec::new();
    let mut push = |name: &str, value: f64| out.push(StrategyValue { name: name.into(), value });
    push("column", split_value(c, &phi, &vec![1.0; n], p)?);
    push("row", split_value(c, &phi, &vec![0.0; n], p)?);
    push("even", split_value(c, &phi, &vec![0.5; n], p)?);
    // greedy assignment, starting from the better pure side
    let mut w = vec![1.0; n];
    let mut best = split_value(c, &phi, &w, p)?;
    for _ in 0..3 {
        let mut improved = false;
        for &g in &support {
            w[g] = 1.0 - w[g];
            let v = split_value(c, &phi, &w, p)?;
            if v < best - 1e-14 {
                best = v;
                improved = true;
            } else {
                w[g] = 1.0 - w[g];
            }
        }
        if !improved {
            break;
        }
    }
    push("greedy", best);
    // coordinate descent over weights in {0, ¼, ½, ¾, 1}
    let mut w = vec![0.5; n];
    let mut best = split_value(c, &phi, &w, p)?;
    for _ in 0..3 {
        let mut improved = false;
        for &g in &support {
            for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                if t == w[g] {
                    continue;
                }
                let old = w[g];
                w[g] = t;
                let v = split_value(c, &phi, &w, p)?;
                if v < best - 1e-14 {
                    best = v;
                    improved = true;
                } else {
                    w[g] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    push("weights", best);
    Ok(out)
}

/// Square-function data and the norm ratio attached to `f`.
pub fn theorem_a_report(c: &Cocycle, f: &AlgebraElement, p: f64, with_strategies: bool) -> Result<TheoremAReport> {
    if p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let lp = lp_norm(f, p)?;
    let col = square_function_norm(c, f, p, SquareSide::Col)?;
    let row = square_function_norm(c, f, p, SquareSide::Row)?;
    let twisted_row = square_function_norm(c, f, p, SquareSide::TwistedRow)?;
    if p >= 2.0 {
        let denom = col.max(row) / (2.0 * PI);
        return Ok(TheoremAReport {
            p,
            lp_norm: lp,
            col,
            row,
            twisted_row,
            ratio: lp / denom,
            kind: "exact".into(),
            strategies: Vec::new(),
            decomposition_bound: None,
        });
    }
    let strategies = if with_strategies {
        decomposition_strategies(c, f, p)?
    } else {
        decomposition_strategies(c, f, p)?.into_iter().take(3).collect()
    };
    let bound = strategies.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    Ok(TheoremAReport {
        p,
        lp_norm: lp,
        col,
        row,
        twisted_row,
        ratio: lp / bound,
        kind: "upper bound".into(),
        strategies,
        decomposition_bound: Some(bound),
    })
}

/// `E(ξ* δA^{−1/2}f)`.
pub fn extended_riesz(c: &Cocycle, xi: &CrossedElement, f: &AlgebraElement) -> Result<AlgebraElement> {
    let f = require_mean_zero(c.length(), f, false)?;
    expectation_col(c, xi, &delta(c, &length_power(c.length(), -0.5, &f)))
}

/// `‖(∫ |φ(sA)f|² ds/s)^{1/2}‖_p` by the trapezoid rule on a log grid
/// `s ∈ [1e−4/ψ_max, 1e4/ψ_min]` with `points_per_decade` nodes.
pub fn g_function_norm<F>(psi: &LengthFunction, f: &AlgebraElement, p: f64, profile: F, points_per_decade: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let f = require_mean_zero(psi, f, false)?;
    let positive: Vec<f64> = psi.values().iter().copied().filter(|&v| v > ZERO_LENGTH).collect();
    if positive.is_empty() || f.support().is_empty() {
        return Ok(0.0);
    }
    let pmin = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let pmax = positive.iter().copied().fold(0.0, f64::max);
    let grid = log_grid(1e-4 / pmax, 1e4 / pmin, points_per_decade);
    let du = if grid.len() > 1 { (grid[1] / grid[0]).ln() } else { 1.0 };
    let last = grid.len() - 1;
    let terms = crate::par::map_range(grid.len(), |k| -> Result<AlgebraElement> {
        let s = grid[k];
        let w = if k == 0 || k == last { 0.5 * du } else { du };
        let mut fs = f.clone();
        for (g, z) in fs.coeffs_mut().iter_mut().enumerate() {
            *z *= profile(s * psi.value(g));
        }
        Ok(fs.adjoint().mul(&fs)?.scale(Complex64::new(w, 0.0)))
    });
    let mut total = AlgebraElement::zero(f.group());
    for t in terms {
        total = total.add(&t?);
    }
    positive_root_norm(&total, p)
}

/// `‖(⟨h_j, h_k⟩)‖^{1/2}`.
pub fn gram_norm(vectors: &[DVector<f64>]) -> f64 {
    if vectors.is_empty() {
        return 0.0;
    }
    let n = vectors.len();
    let g = RMatrix::from_fn(n, n, |i, j| vectors[i].dot(&vectors[j]));
    spectral_radius_sym(&g).sqrt()
}
