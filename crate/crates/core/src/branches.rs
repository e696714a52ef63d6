//! Branches of a truncated free group and the multipliers built on them.
//!
//! A branch is a chain `g₁ < g₂ < …` in the prefix order with `g_k = g_{k+1}⁻`.
//! Vectors live in the prefix cocycle space, with basis `ξ_g = δ_g − δ_{g⁻}`
//! for `g ≠ e` stored at position `index(g) − 1`. Since
//! `b(g) = Σ_{h ≤ g} ξ_h`, a vector with coefficients `F(g) − F(g⁻)` along a
//! branch pairs with `b(g)` to the telescoped value `F(g)`.
//!
//! Bands use the radial partition restricted to integer lengths with the
//! lowest bands clumped: `φ₁ = Σ_{j≤1} φ_j` and `φ_j` unchanged for `j ≥ 2`.

use crate::algebra::{word_map, word_map_adjoint, word_map_mul, word_map_trace_product, AlgebraElement, WordMap};
use crate::euclidean::partition::{phi_j, phi_up_to};
use crate::groups::{format_word, FreeGroupBall, GroupRef};
use crate::linalg::RMatrix;
use crate::{par, Complex64, Error, Result};
use nalgebra::DVector;
use serde::Serialize;

/// A chain of words in a free ball, each extending the previous by one letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    elements: Vec<usize>,
}

impl Branch {
    /// Validates the chain property on ball indices.
    pub fn new(ball: &FreeGroupBall, elements: Vec<usize>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Invalid("a branch needs at least one word".into()));
        }
        if elements.iter().any(|&g| g == 0 || g >= ball.len()) {
            return Err(Error::Invalid("branch words must be nontrivial elements of the ball".into()));
        }
        for w in elements.windows(2) {
            if ball.parent(w[1]) != Some(w[0]) {
                return Err(Error::Invalid(format!(
                    "{} does not extend {} by one letter",
                    format_word(ball.word(w[1])),
                    format_word(ball.word(w[0]))
                )));
            }
        }
        Ok(Branch { elements })
    }

    /// `depth` words starting at `root`, each continuing with the first
    /// admissible letter.
    pub fn spine(ball: &FreeGroupBall, root: usize, depth: usize) -> Result<Self> {
        let mut elements = vec![root];
        while elements.len() < depth {
            let tip = *elements.last().unwrap();
            match children(ball, tip).first() {
                Some(&c) => elements.push(c),
                None => return Err(Error::OutsideBall),
            }
        }
        Branch::new(ball, elements)
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn root(&self) -> usize {
        self.elements[0]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.contains(&g)
    }

    /// Root of length one.
    pub fn is_principal(&self, ball: &FreeGroupBall) -> bool {
        ball.length(self.root()) == 1
    }
}

/// Children of `g` inside the ball, in index order.
pub fn children(ball: &FreeGroupBall, g: usize) -> Vec<usize> {
    if ball.length(g) >= ball.radius() {
        return Vec::new();
    }
    let base = ball.word(g);
    let k = ball.generators() as i32;
    let mut out: Vec<usize> = (1..=k)
        .flat_map(|l| [l, -l])
        .filter(|&l| base.last() != Some(&-l))
        .filter_map(|l| {
            let mut w = base.to_vec();
            w.push(l);
            ball.index_of(&w)
        })
        .collect();
    out.sort_unstable();
    out
}

/// Largest element of `B` that is a prefix of `g`, or the identity (index 0).
pub fn project_branch(ball: &FreeGroupBall, g: usize, branch: &Branch) -> usize {
    branch.elements().iter().rev().find(|&&h| ball.prefix_geq(g, h)).copied().unwrap_or(0)
}

/// Branches covering the ball minus the identity, pairwise disjoint.
#[derive(Debug, Clone, Serialize)]
pub struct BranchPartition {
    pub branches: Vec<Branch>,
    /// For each branch, the branch containing `root⁻` (none when principal).
    pub predecessor: Vec<Option<usize>>,
}

impl BranchPartition {
    /// Checks coverage and disjointness and records predecessors.
    pub fn new(ball: &FreeGroupBall, branches: Vec<Branch>) -> Result<Self> {
        let mut owner = vec![usize::MAX; ball.len()];
        for (k, b) in branches.iter().enumerate() {
            for &g in b.elements() {
                if owner[g] != usize::MAX {
                    return Err(Error::NotPartition(format!("{} lies in two branches", format_word(ball.word(g)))));
                }
                owner[g] = k;
            }
        }
        if let Some(g) = (1..ball.len()).find(|&g| owner[g] == usize::MAX) {
            return Err(Error::NotPartition(format!("{} is not covered", format_word(ball.word(g)))));
        }
        let predecessor = branches
            .iter()
            .map(|b| ball.parent(b.root()).filter(|&p| p != 0).map(|p| owner[p]))
            .collect();
        Ok(BranchPartition { branches, predecessor })
    }

    /// Depth-first spines: words in shortlex order, each unassigned word
    /// starting a branch that follows first children to the ball's edge.
    pub fn greedy(ball: &FreeGroupBall) -> Result<Self> {
        let mut assigned = vec![false; ball.len()];
        let mut branches = Vec::new();
        for g in 1..ball.len() {
            if assigned[g] {
                continue;
            }
            let mut chain = vec![g];
            assigned[g] = true;
            loop {
                let tip = *chain.last().unwrap();
                match children(ball, tip).into_iter().find(|&c| !assigned[c]) {
                    Some(c) => {
                        assigned[c] = true;
                        chain.push(c);
                    }
                    None => break,
                }
            }
            branches.push(Branch::new(ball, chain)?);
        }
        Self::new(ball, branches)
    }

    /// Index of the branch containing `g ≠ e`.
    pub fn owner(&self, g: usize) -> Option<usize> {
        self.branches.iter().position(|b| b.contains(g))
    }
}

/// `sup_{1≤j≤J} |m̃(j)| + j|m̃(j) − m̃(j−1)|` with the maximizer.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HmCondition {
    pub value: f64,
    pub argmax: usize,
    /// The sup is attained at the last index and the terms keep growing:
    /// the condition diverges as the range grows.
    pub divergent: bool,
}

pub fn hm_branch_condition(symbol: &[Complex64]) -> Result<HmCondition> {
    if symbol.len() < 2 {
        return Err(Error::Invalid("the branch condition needs m̃ on 0..J with J ≥ 1".into()));
    }
    let terms: Vec<f64> = (1..symbol.len())
        .map(|j| symbol[j].norm() + j as f64 * (symbol[j] - symbol[j - 1]).norm())
        .collect();
    let (idx, &value) = terms.iter().enumerate().fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let last = terms.len() - 1;
    let mid = last / 2;
    let divergent = terms.len() >= 4 && idx == last && terms[last] >= 1.5 * terms[mid];
    Ok(HmCondition { value, argmax: idx + 1, divergent })
}

/// `m̃_t(j) = t j e^{−tj} m̃(j)`.
pub fn damped_symbol(symbol: &[Complex64], t: f64, j: usize) -> Complex64 {
    let jf = j as f64;
    symbol[j] * (t * jf * (-t * jf).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct HtVector {
    pub t: f64,
    /// Coefficients in the prefix cocycle basis.
    #[serde(skip)]
    pub coeffs: DVector<Complex64>,
    pub norm: f64,
    /// Bound on the squared norm the truncated branch misses,
    /// `C²∫_{tR}^∞ x(e^{−x} + e^{−2x})dx` with `C = max|m̃|`.
    pub tail_bound: f64,
}

/// `⟨h_t, ξ_g⟩ = δ_{g∈B}(m̃_t(|g|)√|g| − m̃_t(|g⁻|)√|g⁻|)`.
pub fn ht_vector(ball: &FreeGroupBall, symbol: &[Complex64], t: f64, branch: &Branch) -> Result<HtVector> {
    if symbol.len() <= ball.radius() {
        return Err(Error::Invalid(format!("m̃ must be given on 0..{}", ball.radius())));
    }
    let mut coeffs = DVector::from_element(ball.len() - 1, Complex64::new(0.0, 0.0));
    for &g in branch.elements() {
        let l = ball.length(g);
        coeffs[g - 1] = damped_symbol(symbol, t, l) * (l as f64).sqrt()
            - damped_symbol(symbol, t, l - 1) * ((l - 1) as f64).sqrt();
    }
    let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let c = symbol.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let a = t * ball.radius() as f64;
    let tail_bound = c * c * ((a + 1.0) * (-a).exp() + (2.0 * a + 1.0) * (-2.0 * a).exp() / 4.0);
    Ok(HtVector { t, coeffs, norm, tail_bound })
}

/// `h_t` on the dyadic grid `t = 2^{−8}, …, 2^{3}` with the largest norm.
pub fn ht_sweep(ball: &FreeGroupBall, symbol: &[Complex64], branch: &Branch) -> Result<(Vec<HtVector>, f64)> {
    let ts: Vec<f64> = (-8..=3).map(|e| 2f64.powi(e)).collect();
    let hs = ts.iter().map(|&t| ht_vector(ball, symbol, t, branch)).collect::<Result<Vec<_>>>()?;
    let sup = hs.iter().map(|h| h.norm).fold(0.0, f64::max);
    Ok((hs, sup))
}

/// Band weight on integer lengths: `φ₁` clumps every band `j ≤ 1`.
pub fn band_weight(j: i32, length: usize) -> f64 {
    let r = length as f64;
    if j == 1 {
        phi_up_to(1, r)
    } else if j >= 2 {
        phi_j(j, r)
    } else {
        0.0
    }
}

/// Bands `j ≥ 1` whose support meets lengths `1..=R`, with a flag for those
/// cut by the truncation (`2^{j+1} > R`).
pub fn bands_for_radius(radius: usize) -> Vec<(i32, bool)> {
    let mut out = Vec::new();
    let mut j = 1;
    while j == 1 || 2f64.powi(j - 1) < radius as f64 {
        out.push((j, 2f64.powi(j + 1) > radius as f64));
        j += 1;
    }
    out
}

/// `Λ_j`, `Λ_{j,k}` and `h_{j,k}` for a branch partition.
#[derive(Debug, Clone, Serialize)]
pub struct BranchFamily {
    pub bands: Vec<i32>,
    pub truncated: Vec<bool>,
    /// `√φ_j(|g|)` per band and ball element.
    pub lambda: Vec<Vec<f64>>,
    /// `Λ_{j,k}` symbols, indexed `[band][branch][element]`.
    pub lambda_branch: Vec<Vec<Vec<f64>>>,
    /// `h_{j,k}` in the prefix cocycle basis, `[band][branch]`.
    #[serde(skip)]
    pub h: Vec<Vec<DVector<f64>>>,
    pub norms: Vec<Vec<f64>>,
    pub max_norm: f64,
}

fn band_value(j: i32, length: usize) -> f64 {
    (band_weight(j, length) * length as f64).sqrt()
}

/// Builds the family; every band meeting the ball is kept and truncated
/// bands are flagged.
pub fn branch_lp_family(ball: &FreeGroupBall, partition: &BranchPartition) -> Result<BranchFamily> {
    let bands_info = bands_for_radius(ball.radius());
    let bands: Vec<i32> = bands_info.iter().map(|b| b.0).collect();
    let truncated = bands_info.iter().map(|b| b.1).collect();
    let lambda = bands.iter().map(|&j| (0..ball.len()).map(|g| band_weight(j, ball.length(g)).sqrt()).collect()).collect();
    let pairs: Vec<(i32, usize)> = bands.iter().flat_map(|&j| (0..partition.branches.len()).map(move |k| (j, k))).collect();
    let built = par::map_slice(&pairs, |&(j, k)| {
        let b = &partition.branches[k];
        let pred = partition.predecessor[k].map(|p| &partition.branches[p]);
        let symbol: Vec<f64> = (0..ball.len())
            .map(|g| {
                if g == 0 {
                    return 0.0;
                }
                let top = project_branch(ball, g, b);
                if top == 0 {
                    return 0.0;
                }
                // g extends the root, so its projection onto B⁻ is the root's parent
                let low = pred.map_or(0, |p| project_branch(ball, g, p));
                (band_value(j, ball.length(top)) - band_value(j, ball.length(low))) / (ball.length(g) as f64).sqrt()
            })
            .collect();
        let mut h = DVector::zeros(ball.len() - 1);
        for &g in b.elements() {
            let l = ball.length(g);
            h[g - 1] = band_value(j, l) - band_value(j, l - 1);
        }
        (symbol, h)
    });
    let nk = partition.branches.len();
    let mut lambda_branch = Vec::new();
    let mut h = Vec::new();
    let mut iter = built.into_iter();
    for _ in &bands {
        let (syms, vecs): (Vec<_>, Vec<_>) = iter.by_ref().take(nk).unzip();
        lambda_branch.push(syms);
        h.push(vecs);
    }
    let norms: Vec<Vec<f64>> = h.iter().map(|row: &Vec<DVector<f64>>| row.iter().map(|v| v.norm()).collect()).collect();
    let max_norm = norms.iter().flatten().copied().fold(0.0, f64::max);
    Ok(BranchFamily { bands, truncated, lambda, lambda_branch, h, norms, max_norm })
}

/// Gram matrix of all `h_{j,k}`, ordered band-major.
pub fn family_gram(family: &BranchFamily) -> RMatrix {
    // each vector lives on one branch: pair the nonzero entries only
    let sparse: Vec<Vec<(usize, f64)>> = family
        .h
        .iter()
        .flatten()
        .map(|v| v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, x)| (i, *x)).collect())
        .collect();
    let dot = |a: &[(usize, f64)], b: &[(usize, f64)]| {
        let (mut i, mut j, mut s) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    s += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        s
    };
    let n = sparse.len();
    RMatrix::from_fn(n, n, |a, b| dot(&sparse[a], &sparse[b]))
}

/// Largest `|⟨h_{j,k}, h_{j′,k′}⟩|` over pairs with `k ≠ k′` or `|j − j′| ≥ 2`;
/// zero exactly when the Gram matrix has the block-tridiagonal pattern.
pub fn gram_off_pattern(family: &BranchFamily) -> f64 {
    let nk = family.h.first().map_or(0, |r| r.len());
    let g = family_gram(family);
    let mut worst: f64 = 0.0;
    for a in 0..g.nrows() {
        for b in 0..g.ncols() {
            let (ja, ka) = (family.bands[a / nk], a % nk);
            let (jb, kb) = (family.bands[b / nk], b % nk);
            if ka != kb || (ja - jb).abs() >= 2 {
                worst = worst.max(g[(a, b)].abs());
            }
        }
    }
    worst
}

/// `Λ_j f` on a free ball.
pub fn apply_lambda(family: &BranchFamily, band: usize, f: &AlgebraElement) -> AlgebraElement {
    let coeffs = f.coeffs().iter().zip(&family.lambda[band]).map(|(c, w)| c * *w).collect();
    AlgebraElement::from_coeffs(f.group(), coeffs).expect("same group")
}

/// `Λ_{j,k} f` on a free ball.
pub fn apply_lambda_branch(family: &BranchFamily, band: usize, branch: usize, f: &AlgebraElement) -> AlgebraElement {
    let coeffs = f.coeffs().iter().zip(&family.lambda_branch[band][branch]).map(|(c, w)| c * *w).collect();
    AlgebraElement::from_coeffs(f.group(), coeffs).expect("same group")
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSquareReport {
    pub p: u32,
    /// `‖(Σ_j |Λ_jf|²)^{1/2}‖_p`.
    pub square: f64,
    /// `‖f‖_p`.
    pub norm: f64,
    pub ratio: f64,
    /// `(Σ_g |f̂(g)|² Σ_j φ_j(|g|))^{1/2}`, the `p = 2` value.
    pub plancherel: f64,
}

/// Column square function of the band pieces at `p ∈ {2, 4}` by trace
/// moments: `‖(Σ x_j*x_j)^{1/2}‖_4⁴ = Σ_{j,j′} τ(x_j*x_j x_{j′}*x_{j′})`.
pub fn branch_square_report(family: &BranchFamily, f: &AlgebraElement, p: u32) -> Result<BranchSquareReport> {
    let ball = f.group().as_free()?;
    if p != 2 && p != 4 {
        return Err(Error::CostGuard(format!("branch square functions run at p ∈ {{2, 4}}, got {p}")));
    }
    let pieces: Vec<WordMap> = (0..family.bands.len())
        .map(|b| word_map(&apply_lambda(family, b, f)))
        .collect::<Result<_>>()?;
    let squares: Vec<WordMap> = pieces.iter().map(|x| word_map_mul(&word_map_adjoint(x), x)).collect();
    let square = if p == 2 {
        squares.iter().map(|s| s.get(&Vec::new()).map_or(0.0, |c| c.re)).sum::<f64>().max(0.0).sqrt()
    } else {
        let mut total = 0.0;
        for a in &squares {
            for b in &squares {
                total += word_map_trace_product(a, b).re;
            }
        }
        total.max(0.0).powf(0.25)
    };
    let norm = crate::algebra::moment_norm_free(f, p)?;
    let plancherel = (0..ball.len())
        .map(|g| {
            let w: f64 = family.bands.iter().map(|&j| band_weight(j, ball.length(g))).sum();
            f.coeff(g).norm_sqr() * w
        })
        .sum::<f64>()
        .sqrt();
    let ratio = if norm > 0.0 { square / norm } else { 0.0 };
    Ok(BranchSquareReport { p, square, norm, ratio, plancherel })
}

/// The ball of a group handle.
pub fn ball_of(group: &GroupRef) -> Result<&FreeGroupBall> {
    group.as_free()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::free_word_cocycle;
    use crate::groups::{parse_word, Group};
    use crate::riesz::apply_riesz_direction;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ball(k: usize, r: usize) -> GroupRef {
        Group::FreeBall(FreeGroupBall::new(k, r).unwrap()).into_ref()
    }

    fn idx(b: &FreeGroupBall, s: &str) -> usize {
        b.index_of(&parse_word(s).unwrap()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let g = ball(2, 4);
        let b = g.as_free().unwrap();
        let br = Branch::new(b, vec![idx(b, "a"), idx(b, "ab")]).unwrap();
        assert_eq!(project_branch(b, idx(b, "aba"), &br), idx(b, "ab"));
        assert_eq!(project_branch(b, idx(b, "ab"), &br), idx(b, "ab"));
        assert_eq!(project_branch(b, idx(b, "ba"), &br), 0);
        assert_eq!(project_branch(b, idx(b, "aB"), &br), idx(b, "a"));
        assert!(Branch::new(b, vec![idx(b, "a"), idx(b, "ba")]).is_err());
    }

    #[test]
    fn greedy_partition_covers_ball() {
        let g = ball(2, 4);
        let b = g.as_free().unwrap();
        let t = BranchPartition::greedy(b).unwrap();
        let principal = t.branches.iter().filter(|br| br.is_principal(b)).count();
        assert_eq!(principal, 4);
        let total: usize = t.branches.iter().map(|br| br.len()).sum();
        assert_eq!(total, b.len() - 1);
        for (k, br) in t.branches.iter().enumerate() {
            assert_eq!(t.predecessor[k].is_none(), br.is_principal(b));
        }
        let bad = BranchPartition::new(b, t.branches[..2].to_vec());
        assert!(matches!(bad, Err(Error::NotPartition(_))));
    }

    #[test]
    fn hm_condition_examples() {
        let c = vec![Complex64::new(0.7, 0.0); 20];
        assert!((hm_branch_condition(&c).unwrap().value - 0.7).abs() < 1e-15);
        let inv: Vec<Complex64> = (0..30).map(|j| Complex64::new(if j == 0 { 1.0 } else { 1.0 / j as f64 }, 0.0)).collect();
        let r = hm_branch_condition(&inv).unwrap();
        assert!((r.value - 1.5).abs() < 1e-15 && r.argmax == 2 && !r.divergent);
        let alt: Vec<Complex64> = (0..30).map(|j| Complex64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        assert!(hm_branch_condition(&alt).unwrap().divergent);
    }

    #[test]
    fn ht_reconstructs_damped_symbol() {
        let g = ball(2, 6);
        let b = g.as_free().unwrap();
        let c = free_word_cocycle(&g).unwrap();
        let br = Branch::spine(b, idx(b, "a"), 6).unwrap();
        let sym: Vec<Complex64> = (0..=6).map(|j| Complex64::new(1.0 / (1.0 + j as f64), 0.2)).collect();
        let zero = vec![Complex64::new(0.0, 0.0); 7];
        assert_eq!(ht_vector(b, &zero, 0.5, &br).unwrap().norm, 0.0);
        for t in [0.1, 0.5, 2.0] {
            let h = ht_vector(b, &sym, t, &br).unwrap();
            for &gg in br.elements() {
                let v = c.vector(gg);
                let pair: Complex64 = (0..v.len()).map(|i| h.coeffs[i] * v[i]).sum();
                let want = damped_symbol(&sym, t, b.length(gg));
                assert!((pair / (b.length(gg) as f64).sqrt() - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn ht_tail_bound_closed_form() {
        // ∫_a^∞ x(e^{−x} + e^{−2x})dx at a = 0 is 1 + 1/4
        let g = ball(1, 3);
        let b = g.as_free().unwrap();
        let br = Branch::spine(b, 1, 3).unwrap();
        let one = vec![Complex64::new(1.0, 0.0); 4];
        let h = ht_vector(b, &one, 1e-300, &br).unwrap();
        assert!((h.tail_bound - 1.25).abs() < 1e-12);
    }

    #[test]
    fn family_structure_on_radius_six() {
        let g = ball(2, 6);
        let b = g.as_free().unwrap();
        let t = BranchPartition::greedy(b).unwrap();
        let fam = branch_lp_family(b, &t).unwrap();
        assert_eq!(fam.bands, vec![1, 2, 3]);
        assert_eq!(fam.truncated, vec![false, true, true]);
        assert_eq!(gram_off_pattern(&fam), 0.0);
        // the tridiagonal neighbours do interact
        let gram = family_gram(&fam);
        let nk = t.branches.len();
        assert!(gram[(0, nk)].abs() > 0.0);
    }

    #[test]
    fn lambda_branch_is_a_riesz_transform_on_its_branch() {
        let g = ball(2, 5);
        let b = g.as_free().unwrap();
        let c = free_word_cocycle(&g).unwrap();
        let t = BranchPartition::greedy(b).unwrap();
        let fam = branch_lp_family(b, &t).unwrap();
        for (band, _) in fam.bands.iter().enumerate() {
            for k in 0..t.branches.len().min(12) {
                let coeffs = (0..b.len()).map(|i| if i == 0 { Complex64::new(0.0, 0.0) } else { Complex64::new(1.0 + (i % 7) as f64, -0.5 * (i % 3) as f64) }).collect();
                let f = AlgebraElement::from_coeffs(&g, coeffs).unwrap();
                let lhs = apply_lambda_branch(&fam, band, k, &f).scale(Complex64::new(0.0, 2.0 * PI));
                let rhs = apply_riesz_direction(&c, &fam.h[band][k], &f, false).unwrap();
                assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn principal_branch_pieces_reduce_to_lambda() {
        let g = ball(2, 6);
        let b = g.as_free().unwrap();
        let t = BranchPartition::greedy(b).unwrap();
        let fam = branch_lp_family(b, &t).unwrap();
        let k0 = 0;
        assert!(t.branches[k0].is_principal(b));
        let mut coeffs = vec![Complex64::new(0.0, 0.0); b.len()];
        for &gg in t.branches[k0].elements() {
            coeffs[gg] = Complex64::new(gg as f64 * 0.1, 1.0);
        }
        let f = AlgebraElement::from_coeffs(&g, coeffs).unwrap();
        for band in 0..fam.bands.len() {
            let a = apply_lambda(&fam, band, &f);
            assert!(apply_lambda_branch(&fam, band, k0, &f).max_abs_diff(&a) < 1e-14);
            for k in 1..t.branches.len() {
                assert_eq!(apply_lambda_branch(&fam, band, k, &f).l2_coeff_norm(), 0.0);
            }
        }
    }

    #[test]
    fn square_report_at_two_is_plancherel() {
        let g = ball(2, 6);
        let b = g.as_free().unwrap();
        let t = BranchPartition::greedy(b).unwrap();
        let fam = branch_lp_family(b, &t).unwrap();
        let br = &t.branches[0];
        let mut coeffs = vec![Complex64::new(0.0, 0.0); b.len()];
        for (i, &gg) in br.elements().iter().enumerate() {
            coeffs[gg] = Complex64::new((i as f64).cos(), 0.3 * i as f64);
        }
        let f = AlgebraElement::from_coeffs(&g, coeffs).unwrap();
        let r = branch_square_report(&fam, &f, 2).unwrap();
        assert!((r.square - r.plancherel).abs() < 1e-12);
        // the bands sum to one on lengths up to 4 = 2^{j_max−1}·… of the kept range
        let single = AlgebraElement::delta(&g, br.elements()[2]);
        let s = branch_square_report(&fam, &single, 2).unwrap();
        assert!((s.square - 1.0).abs() < 1e-14);
        assert!(branch_square_report(&fam, &f, 6).is_err());
    }

    #[test]
    fn trivial_branch_matches_circle() {
        // powers of one generator live in an abelian subalgebra: compare with
        // trigonometric polynomials integrated on the circle
        let g = ball(2, 6);
        let b = g.as_free().unwrap();
        let t = BranchPartition::greedy(b).unwrap();
        let fam = branch_lp_family(b, &t).unwrap();
        let powers: Vec<usize> = (1..=6).map(|n| b.index_of(&vec![1; n]).unwrap()).collect();
        let c: Vec<Complex64> = (1..=6).map(|n| Complex64::new(1.0 / n as f64, (n as f64).sin())).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); b.len()];
        for (i, &gg) in powers.iter().enumerate() {
            coeffs[gg] = c[i];
        }
        let f = AlgebraElement::from_coeffs(&g, coeffs).unwrap();
        let r = branch_square_report(&fam, &f, 4).unwrap();
        let nodes = 64;
        let (mut sq, mut fl) = (0.0, 0.0);
        for q in 0..nodes {
            let th = 2.0 * PI * q as f64 / nodes as f64;
            let mut s = 0.0;
            for &j in &fam.bands {
                let x: Complex64 = (1..=6).map(|n| c[n - 1] * band_weight(j, n).sqrt() * Complex64::from_polar(1.0, th * n as f64)).sum();
                s += x.norm_sqr();
            }
            let fv: Complex64 = (1..=6).map(|n| c[n - 1] * Complex64::from_polar(1.0, th * n as f64)).sum();
            sq += s * s / nodes as f64;
            fl += fv.norm_sqr().powi(2) / nodes as f64;
        }
        assert!((r.square - sq.powf(0.25)).abs() < 1e-6 * r.square);
        assert!((r.ratio - (sq / fl).powf(0.25)).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn h_norms_bounded(k in 1usize..3, r in 2usize..6) {
            let g = ball(k, r);
            let b = g.as_free().unwrap();
            let t = BranchPartition::greedy(b).unwrap();
            let fam = branch_lp_family(b, &t).unwrap();
            prop_assert!(fam.max_norm < 2.0);
            prop_assert_eq!(gram_off_pattern(&fam), 0.0);
        }
    }
}
