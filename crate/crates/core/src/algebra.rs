//! Group von Neumann algebra calculus.
//!
//! Elements are finitely supported Fourier series `Σ f̂(g) λ(g)`. On a finite
//! group the left regular representation turns them into `N×N` matrices with
//! `M[a,b] = f̂(a b⁻¹)`, and the normalized trace gives `τ`. On a free-group
//! ball, even-`p` norms are obtained exactly from trace moments computed by
//! word-reduction convolution.

use crate::groups::{word_inv, word_mul, Group, GroupRef, Word};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, root_norm_from_eigenvalues, CMatrix};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::collections::HashMap;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `Σ_g f̂(g) λ(g)` with dense coefficients indexed by group element.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    group: GroupRef,
    coeffs: Vec<Complex64>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        std::sync::Arc::ptr_eq(&self.group, &other.group) && self.coeffs == other.coeffs
    }
}

impl AlgebraElement {
    pub fn zero(group: &GroupRef) -> Self {
        Self { group: group.clone(), coeffs: vec![ZERO; group.order()] }
    }

    /// `λ(g)`.
    pub fn delta(group: &GroupRef, g: usize) -> Self {
        let mut f = Self::zero(group);
        f.coeffs[g] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn from_coeffs(group: &GroupRef, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::Dimension(format!("{} coefficients for a group of order {}", coeffs.len(), group.order())));
        }
        Ok(Self { group: group.clone(), coeffs })
    }

    pub fn from_real(group: &GroupRef, coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(group, coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Gaussian coefficients on the whole group.
    pub fn random<R: Rng + ?Sized>(group: &GroupRef, rng: &mut R) -> Self {
        let coeffs = (0..group.order())
            .map(|_| Complex64::new(crate::linalg::standard_normal(rng), crate::linalg::standard_normal(rng)))
            .collect();
        Self { group: group.clone(), coeffs }
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn coeff(&self, g: usize) -> Complex64 {
        self.coeffs[g]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&g| self.coeffs[g] != ZERO).collect()
    }

    /// `τ(f) = f̂(e)`.
    pub fn trace(&self) -> Complex64 {
        self.coeffs[self.group.identity()]
    }

    /// `(f*)̂(g) = conj f̂(g⁻¹)`.
    pub fn adjoint(&self) -> Self {
        let coeffs = (0..self.coeffs.len()).map(|g| self.coeffs[self.group.inv(g)].conj()).collect();
        Self { group: self.group.clone(), coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { group: self.group.clone(), coeffs: self.coeffs.iter().map(|&x| x * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { group: self.group.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self { group: self.group.clone(), coeffs }
    }

    /// Convolution product. Fails on a ball when a product leaves it.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = vec![ZERO; self.coeffs.len()];
        for g in self.support() {
            for h in other.support() {
                let gh = self.group.mul(g, h).ok_or(Error::OutsideBall)?;
                out[gh] += self.coeffs[g] * other.coeffs[h];
            }
        }
        Ok(Self { group: self.group.clone(), coeffs: out })
    }

    /// `(Σ |f̂(g)|²)^{1/2}`.
    pub fn l2_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Left regular representation: `M[a,b] = f̂(a b⁻¹)`.
pub fn regular_rep_matrix(f: &AlgebraElement) -> Result<CMatrix> {
    let g = f.group.as_finite()?;
    let n = g.order();
    Ok(CMatrix::from_fn(n, n, |a, b| f.coeffs[g.mul(a, g.inv(b))]))
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `‖f‖_p = (τ|f|^p)^{1/p}`; the operator norm at `p = ∞`.
///
/// On a free-group ball this dispatches to [`moment_norm_free`] for even `p`.
pub fn lp_norm(f: &AlgebraElement, p: f64) -> Result<f64> {
    check_exponent(p)?;
    match f.group.as_ref() {
        Group::Finite(_) => {
            let m = regular_rep_matrix(f)?;
            let gram = m.adjoint() * &m;
            Ok(root_norm_from_eigenvalues(&hermitian_eigenvalues(&gram), p))
        }
        Group::FreeBall(_) => {
            if p.fract() == 0.0 && (p as u32).is_multiple_of(2) {
                moment_norm_free(f, p as u32)
            } else {
                Err(Error::InvalidExponent(p))
            }
        }
    }
}

/// `‖x^{1/2}‖_p` for a positive element `x` of a finite group algebra.
pub fn positive_root_norm(x: &AlgebraElement, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let m = regular_rep_matrix(x)?;
    Ok(root_norm_from_eigenvalues(&hermitian_eigenvalues(&m), p))
}

/// Multiplies coefficients by a symbol. The symbol must be defined on the support.
pub fn fourier_multiplier<F>(symbol: F, f: &AlgebraElement) -> Result<AlgebraElement>
where
    F: Fn(usize) -> Option<Complex64>,
{
    let mut out = AlgebraElement::zero(&f.group);
    for g in f.support() {
        let m = symbol(g).ok_or(Error::MissingSymbol(g))?;
        out.coeffs[g] = m * f.coeffs[g];
    }
    Ok(out)
}

/// Restriction of coefficients to a subgroup.
pub fn conditional_expectation_subgroup(f: &AlgebraElement, subgroup: &[usize]) -> Result<AlgebraElement> {
    let g = f.group.as_finite()?;
    if !g.is_subgroup(subgroup) {
        return Err(Error::NotSubgroup);
    }
    let mut out = AlgebraElement::zero(&f.group);
    for &h in subgroup {
        out.coeffs[h] = f.coeffs[h];
    }
    Ok(out)
}

/// Finitely supported element of the full free group algebra.
pub type WordMap = HashMap<Word, Complex64>;

pub fn word_map(f: &AlgebraElement) -> Result<WordMap> {
    let ball = f.group.as_free()?;
    Ok(f.support().into_iter().map(|g| (ball.word(g).to_vec(), f.coeffs[g])).collect())
}

pub fn word_map_adjoint(a: &WordMap) -> WordMap {
    a.iter().map(|(w, c)| (word_inv(w), c.conj())).collect()
}

pub fn word_map_mul(a: &WordMap, b: &WordMap) -> WordMap {
    let mut out = WordMap::with_capacity(a.len() * b.len());
    for (u, x) in a {
        for (v, y) in b {
            *out.entry(word_mul(u, v)).or_insert(ZERO) += x * y;
        }
    }
    out.retain(|_, c| *c != ZERO);
    out
}

/// `τ(a·b) = Σ_w a(w) b(w⁻¹)`.
pub fn word_map_trace_product(a: &WordMap, b: &WordMap) -> Complex64 {
    a.iter().map(|(w, x)| b.get(&word_inv(w)).map_or(ZERO, |y| x * y)).sum()
}

/// `τ(x^k)` for `x` given as a word map, using `τ(x^{⌈k/2⌉} x^{⌊k/2⌋})`.
pub fn word_map_power_trace(x: &WordMap, k: u32) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let power = |n: u32| {
        let mut acc: WordMap = [(Vec::new(), Complex64::new(1.0, 0.0))].into_iter().collect();
        for _ in 0..n {
            acc = word_map_mul(&acc, x);
        }
        acc
    };
    let hi = power(k.div_ceil(2));
    let lo = if k.is_multiple_of(2) { hi.clone() } else { power(k / 2) };
    word_map_trace_product(&hi, &lo)
}

/// `τ((f*f)^{p/2})^{1/p}` for `p ∈ {2,4,6,8}` on a free-group ball.
pub fn moment_norm_free(f: &AlgebraElement, p: u32) -> Result<f64> {
    if !p.is_multiple_of(2) || !(2..=8).contains(&p) {
        return Err(Error::InvalidExponent(p as f64));
    }
    let a = word_map(f)?;
    Ok(moment_norm_words(&a, p))
}

/// Even-`p` norm of a word-map element.
pub fn moment_norm_words(a: &WordMap, p: u32) -> f64 {
    let x = word_map_mul(&word_map_adjoint(a), a);
    word_map_power_trace(&x, p / 2).re.max(0.0).powf(1.0 / p as f64)
}

/// Ball-truncated estimate of `‖f‖_p` for arbitrary `p` on a free group:
/// `((|P λ(f) P|^p) δ_e, δ_e)^{1/p}` with `P` the projection onto the ball of
/// radius `extra` around the support. Approximate; never used in assertions.
pub fn lp_norm_free_approx(f: &AlgebraElement, p: f64, extra: usize) -> Result<f64> {
    check_exponent(p)?;
    let ball = f.group.as_free()?;
    let big = crate::groups::FreeGroupBall::new(ball.generators(), ball.radius() + extra)?;
    let a = word_map(f)?;
    let n = big.len();
    let mut m = CMatrix::zeros(n, n);
    for (col, w) in big.words().iter().enumerate() {
        for (u, c) in &a {
            if let Some(row) = big.index_of(&word_mul(u, w)) {
                m[(row, col)] += c;
            }
        }
    }
    let gram = m.adjoint() * &m;
    let (vals, vecs) = hermitian_eigen(&gram);
    let diag: f64 = vals.iter().enumerate().map(|(i, &l)| l.max(0.0).powf(p / 2.0) * vecs[(0, i)].norm_sqr()).sum();
    Ok(diag.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FiniteGroup, FreeGroupBall};
    use crate::linalg::normalized_schatten;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyclic(n: usize) -> GroupRef {
        Group::Finite(FiniteGroup::cyclic(n).unwrap()).into_ref()
    }

    fn ball(k: usize, r: usize) -> GroupRef {
        Group::FreeBall(FreeGroupBall::new(k, r).unwrap()).into_ref()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn regular_rep_examples() {
        let z2 = cyclic(2);
        let e = regular_rep_matrix(&AlgebraElement::delta(&z2, 0)).unwrap();
        assert_eq!(e, CMatrix::identity(2, 2));
        let s = regular_rep_matrix(&AlgebraElement::delta(&z2, 1)).unwrap();
        assert_eq!(s, CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
    }

    #[test]
    fn regular_rep_is_multiplicative() {
        let z6 = cyclic(6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = AlgebraElement::random(&z6, &mut rng);
        let g = AlgebraElement::random(&z6, &mut rng);
        // direct convolution oracle
        let mut conv = vec![c(0.0); 6];
        for a in 0..6 {
            for b in 0..6 {
                conv[(a + b) % 6] += f.coeff(a) * g.coeff(b);
            }
        }
        let fg = f.mul(&g).unwrap();
        assert!(fg.coeffs().iter().zip(&conv).all(|(x, y)| (x - y).norm() < 1e-12));
        let lhs = regular_rep_matrix(&fg).unwrap();
        let rhs = regular_rep_matrix(&f).unwrap() * regular_rep_matrix(&g).unwrap();
        assert!((lhs - rhs).camax() < 1e-12);
        let adj = regular_rep_matrix(&f.adjoint()).unwrap();
        assert!((adj - regular_rep_matrix(&f).unwrap().adjoint()).camax() < 1e-12);
    }

    #[test]
    fn lp_norm_examples() {
        let z2 = cyclic(2);
        let f = AlgebraElement::from_real(&z2, &[1.0, 1.0]).unwrap();
        assert!((lp_norm(&f, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((lp_norm(&f, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let z5 = cyclic(5);
        for p in [1.0, 1.5, 3.0, f64::INFINITY] {
            assert!((lp_norm(&AlgebraElement::delta(&z5, 2), p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidExponent(_))));
        let m = regular_rep_matrix(&f).unwrap();
        assert!((normalized_schatten(&m, 3.0) - lp_norm(&f, 3.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn multiplier_and_expectation() {
        let z4 = cyclic(4);
        let f = AlgebraElement::from_real(&z4, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(fourier_multiplier(|_| Some(c(1.0)), &f).unwrap().coeffs(), f.coeffs());
        let e_only = fourier_multiplier(|g| Some(c(if g == 0 { 1.0 } else { 0.0 })), &f).unwrap();
        assert_eq!(e_only.coeffs(), AlgebraElement::delta(&z4, 0).scale(f.trace()).coeffs());
        assert!(matches!(fourier_multiplier(|g| (g != 2).then_some(c(1.0)), &f), Err(Error::MissingSymbol(2))));
        let h = conditional_expectation_subgroup(&f, &[0, 2]).unwrap();
        assert_eq!(h.coeffs(), &[c(1.0), c(0.0), c(1.0), c(0.0)]);
        assert_eq!(conditional_expectation_subgroup(&f, &[0, 1, 2, 3]).unwrap().coeffs(), f.coeffs());
        assert_eq!(conditional_expectation_subgroup(&f, &[0]).unwrap().coeffs()[0], c(1.0));
        assert!(matches!(conditional_expectation_subgroup(&f, &[0, 1]), Err(Error::NotSubgroup)));
    }

    #[test]
    fn free_moment_examples() {
        let b = ball(2, 2);
        let fb = b.as_free().unwrap();
        let a = fb.index_of(&[1]).unwrap();
        let bb = fb.index_of(&[2]).unwrap();
        assert!((moment_norm_free(&AlgebraElement::delta(&b, a), 4).unwrap() - 1.0).abs() < 1e-14);
        let f = AlgebraElement::delta(&b, 0).add(&AlgebraElement::delta(&b, a));
        assert!((moment_norm_free(&f, 4).unwrap() - 6f64.powf(0.25)).abs() < 1e-14);
        let g = AlgebraElement::delta(&b, a).add(&AlgebraElement::delta(&b, bb));
        assert!((moment_norm_free(&g, 4).unwrap() - 6f64.powf(0.25)).abs() < 1e-14);
        assert!(moment_norm_free(&g, 3).is_err());
        assert!((lp_norm(&g, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn free_cyclic_subgroup_matches_circle() {
        let b = ball(2, 3);
        let fb = b.as_free().unwrap();
        let coeffs = [(vec![], 0.7), (vec![1], -0.4), (vec![1, 1], 1.1), (vec![-1], 0.3), (vec![1, 1, 1], 0.5)];
        let mut f = AlgebraElement::zero(&b);
        for (w, x) in &coeffs {
            f.coeffs_mut()[fb.index_of(w).unwrap()] = c(*x);
        }
        let exps: Vec<(i32, f64)> = coeffs.iter().map(|(w, x)| (w.iter().sum::<i32>(), *x)).collect();
        for p in [2u32, 4, 6, 8] {
            // trapezoid on the circle is exact for trigonometric polynomials
            let n = 256;
            let avg: f64 = (0..n)
                .map(|i| {
                    let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    let z: Complex64 = exps.iter().map(|&(k, x)| Complex64::from_polar(x, k as f64 * th)).sum();
                    z.norm().powi(p as i32)
                })
                .sum::<f64>()
                / n as f64;
            let got = moment_norm_free(&f, p).unwrap();
            assert!((got - avg.powf(1.0 / p as f64)).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn approximate_free_norm_runs() {
        let b = ball(2, 1);
        let f = AlgebraElement::delta(&b, 1);
        let v = lp_norm_free_approx(&f, 3.0, 2).unwrap();
        assert!(v > 0.0 && v <= 1.0 + 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn parseval_and_monotonicity(n in 1usize..24, seed in any::<u64>()) {
            let g = cyclic(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = AlgebraElement::random(&g, &mut rng);
            let l2 = lp_norm(&f, 2.0).unwrap();
            prop_assert!((l2 * l2 - f.l2_coeff_norm().powi(2)).abs() < 1e-10 * (1.0 + l2 * l2));
            let ps = [1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY];
            let norms: Vec<f64> = ps.iter().map(|&p| lp_norm(&f, p).unwrap()).collect();
            for w in norms.windows(2) {
                prop_assert!(w[0] <= w[1] * (1.0 + 1e-10));
            }
            prop_assert!((f.adjoint().adjoint().max_abs_diff(&f)) == 0.0);
            let tr = f.trace();
            prop_assert_eq!(tr, f.coeff(0));
        }

        #[test]
        fn multiplier_composition(seed in any::<u64>()) {
            let g = cyclic(7);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = AlgebraElement::random(&g, &mut rng);
            let m1 = AlgebraElement::random(&g, &mut rng);
            let m2 = AlgebraElement::random(&g, &mut rng);
            let lhs = fourier_multiplier(|h| Some(m1.coeff(h)), &fourier_multiplier(|h| Some(m2.coeff(h)), &f).unwrap()).unwrap();
            let rhs = fourier_multiplier(|h| Some(m1.coeff(h) * m2.coeff(h)), &f).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn free_p2_is_parseval(seed in any::<u64>()) {
            let b = ball(2, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = AlgebraElement::random(&b, &mut rng);
            let v = moment_norm_free(&f, 2).unwrap();
            prop_assert!((v - f.l2_coeff_norm()).abs() < 1e-10 * (1.0 + v));
        }
    }
}
