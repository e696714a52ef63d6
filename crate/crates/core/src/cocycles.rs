//! Conditionally negative lengths and their cocycles.
//!
//! A length `ψ` on a group is turned into a real Hilbert space `ℝ^d`, vectors
//! `b(g)` and an orthogonal action `α_g` with `b(gh) = α_g b(h) + b(g)` and
//! `‖b(g)‖² = ψ(g)`. Three constructions are provided: the generic one from the
//! eigendecomposition of the Gromov form, the explicit prefix cocycle of a free
//! group, and the explicit interval cocycle of an even cyclic group.

use crate::algebra::{regular_rep_matrix, AlgebraElement};
use crate::groups::{common_prefix_len, word_inv, word_mul, Group, GroupRef};
use crate::linalg::{hermitian_eigenvalues, orthogonality_defect, symmetric_eigen, RMatrix};
use crate::{Error, Result};
use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use crate::euclidean::fractional::{fractional_length, FractionalLength};

/// How `ψ(g⁻¹h)` is evaluated when the product may leave a truncated ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthKind {
    /// Values are looked up from the table; products must stay in the group.
    Table,
    /// Word length of a free group, evaluated on reduced words directly.
    FreeWord,
}

#[derive(Debug, Clone)]
pub struct LengthFunction {
    group: GroupRef,
    values: Vec<f64>,
    kind: LengthKind,
    id: String,
}

impl LengthFunction {
    /// Validates `ψ(e) = 0`, `ψ ≥ 0` and `ψ(g) = ψ(g⁻¹)`.
    pub fn new(group: GroupRef, values: Vec<f64>, id: &str) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::InvalidLength(format!("{} values for {} elements", values.len(), group.order())));
        }
        let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if values[group.identity()].abs() > 1e-12 * scale {
            return Err(Error::InvalidLength("ψ(e) ≠ 0".into()));
        }
        if let Some(g) = values.iter().position(|v| !v.is_finite() || *v < -1e-12 * scale) {
            return Err(Error::InvalidLength(format!("negative or non-finite value at {g}")));
        }
        if let Some(g) = (0..values.len()).find(|&g| (values[g] - values[group.inv(g)]).abs() > 1e-9 * scale) {
            return Err(Error::InvalidLength(format!("not symmetric at {g}")));
        }
        Ok(Self { group, values, kind: LengthKind::Table, id: id.to_string() })
    }

    /// Word length `|g|` on a free-group ball.
    pub fn free_word(group: &GroupRef) -> Result<Self> {
        let ball = group.as_free()?;
        let values = (0..ball.len()).map(|g| ball.length(g) as f64).collect();
        Ok(Self { group: group.clone(), values, kind: LengthKind::FreeWord, id: "free-word".into() })
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, g: usize) -> f64 {
        self.values[g]
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> LengthKind {
        self.kind
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0, |a: f64, &b| a.max(b))
    }

    /// `ψ(g⁻¹h)`.
    pub fn left_quotient(&self, g: usize, h: usize) -> Result<f64> {
        match (self.kind, self.group.as_ref()) {
            (LengthKind::FreeWord, Group::FreeBall(b)) => {
                let (u, v) = (b.word(g), b.word(h));
                Ok((u.len() + v.len() - 2 * common_prefix_len(u, v)) as f64)
            }
            _ => {
                let q = self.group.mul(self.group.inv(g), h).ok_or(Error::OutsideBall)?;
                Ok(self.values[q])
            }
        }
    }

    /// `ψ(gh⁻¹)`.
    pub fn right_quotient(&self, g: usize, h: usize) -> Result<f64> {
        match (self.kind, self.group.as_ref()) {
            (LengthKind::FreeWord, Group::FreeBall(b)) => {
                let (u, v) = (word_inv(b.word(g)), word_inv(b.word(h)));
                Ok((u.len() + v.len() - 2 * common_prefix_len(&u, &v)) as f64)
            }
            _ => {
                let q = self.group.mul(g, self.group.inv(h)).ok_or(Error::OutsideBall)?;
                Ok(self.values[q])
            }
        }
    }

    /// `G₀ = {g : ψ(g) ≤ tol}`.
    pub fn zero_set(&self, tol: f64) -> Vec<usize> {
        (0..self.values.len()).filter(|&g| self.values[g] <= tol).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `K(g,h) = (ψ(g) + ψ(h) − ψ(g⁻¹h))/2` (left) or with `ψ(gh⁻¹)` (right).
pub fn gromov_form(psi: &LengthFunction, side: Side) -> Result<RMatrix> {
    let n = psi.values.len();
    let mut k = RMatrix::zeros(n, n);
    for g in 0..n {
        for h in g..n {
            let q = match side {
                Side::Left => psi.left_quotient(g, h)?,
                Side::Right => psi.right_quotient(g, h)?,
            };
            let v = 0.5 * (psi.values[g] + psi.values[h] - q);
            k[(g, h)] = v;
            k[(h, g)] = v;
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativityVerdict {
    pub verdict: bool,
    pub min_eigenvalue: f64,
    /// Mean-zero coefficient vector over the whole group with a negative
    /// value of `Σ ā_g a_h ψ(g⁻¹h)` reversed in sign, i.e. violating negativity.
    pub witness: Option<Vec<f64>>,
}

/// Conditional negativity through positivity of the Gromov form.
///
/// On mean-zero `a`, `Σ a_g a_h ψ(g⁻¹h) = −2 cᵀKc` with `c` the restriction of
/// `a` off the identity, so negativity is the same as `K ⪰ 0`.
pub fn is_conditionally_negative(psi: &LengthFunction, tol: f64) -> Result<NegativityVerdict> {
    let k = gromov_form(psi, Side::Left)?;
    let (vals, vecs) = symmetric_eigen(&k);
    let min = vals.first().copied().unwrap_or(0.0);
    let verdict = min >= -tol * psi.max_value().max(1.0);
    let witness = (!verdict).then(|| {
        let e = psi.group.identity();
        let mut a: Vec<f64> = vecs.column(0).iter().copied().collect();
        a[e] = 0.0;
        a[e] = -a.iter().sum::<f64>();
        a
    });
    Ok(NegativityVerdict { verdict, min_eigenvalue: min, witness })
}

/// `Σ ā_g a_h ψ(g⁻¹h)` evaluated by brute force.
pub fn negativity_form(psi: &LengthFunction, a: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for (g, &x) in a.iter().enumerate() {
        for (h, &y) in a.iter().enumerate() {
            if x != 0.0 && y != 0.0 {
                s += x * y * psi.left_quotient(g, h)?;
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct SchoenbergEntry {
    pub t: f64,
    pub positive: bool,
    pub min_eigenvalue: f64,
}

/// Positivity of `[e^{−tψ(g⁻¹h)}]` for each `t`.
pub fn schoenberg_check(psi: &LengthFunction, ts: &[f64], tol: f64) -> Result<Vec<SchoenbergEntry>> {
    let n = psi.values.len();
    let mut q = RMatrix::zeros(n, n);
    for g in 0..n {
        for h in 0..n {
            q[(g, h)] = psi.left_quotient(g, h)?;
        }
    }
    Ok(ts
        .iter()
        .map(|&t| {
            let m = q.map(|x| (-t * x).exp());
            let (vals, _) = symmetric_eigen(&m);
            let min = vals[0];
            SchoenbergEntry { t, positive: min >= -tol, min_eigenvalue: min }
        })
        .collect())
}

/// `ψ(g) = τ((2λ(e) − λ(g) − λ(g⁻¹))ω)` for a positive density `ω`.
pub fn length_from_density(omega: &AlgebraElement) -> Result<LengthFunction> {
    let group = omega.group().clone();
    let m = regular_rep_matrix(omega)?;
    let eigs = hermitian_eigenvalues(&m);
    let scale = eigs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if eigs[0] < -1e-10 * scale {
        return Err(Error::NotPositive(eigs[0]));
    }
    let e = group.identity();
    let values: Vec<f64> = (0..group.order())
        .map(|g| (omega.coeff(e) * 2.0 - omega.coeff(group.inv(g)) - omega.coeff(g)).re)
        .collect();
    LengthFunction::new(group, values, "density")
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalReport {
    /// `τ_ψ(|λ(g) − λ(e)|²)` per non-identity `g`.
    pub basis_values: Vec<f64>,
    /// `τ_ψ(|f|²)` on random mean-zero `f`.
    pub random_values: Vec<f64>,
    pub min_value: f64,
    pub positive: bool,
}

/// `τ_ψ(f* f)` where `τ_ψ(λ(g)) = −ψ(g)/2`, for mean-zero coefficients `a`.
pub fn functional_value(psi: &LengthFunction, a: &[f64]) -> Result<f64> {
    Ok(-0.5 * negativity_form(psi, a)?)
}

/// Positivity of the functional `τ_ψ` on mean-zero elements.
pub fn functional_from_length<R: Rng + ?Sized>(psi: &LengthFunction, samples: usize, tol: f64, rng: &mut R) -> Result<FunctionalReport> {
    let n = psi.values.len();
    let e = psi.group.identity();
    let mut basis_values = Vec::new();
    for g in (0..n).filter(|&g| g != e) {
        let mut a = vec![0.0; n];
        a[g] = 1.0;
        a[e] = -1.0;
        basis_values.push(functional_value(psi, &a)?);
    }
    let mut random_values = Vec::with_capacity(samples + 1);
    for _ in 0..samples {
        let mut a: Vec<f64> = (0..n).map(|_| crate::linalg::standard_normal(rng)).collect();
        let mean = a.iter().sum::<f64>() / n as f64;
        a.iter_mut().for_each(|x| *x -= mean);
        random_values.push(functional_value(psi, &a)?);
    }
    if let Some(w) = is_conditionally_negative(psi, tol)?.witness {
        random_values.push(functional_value(psi, &w)?);
    }
    let min_value = basis_values.iter().chain(&random_values).fold(f64::INFINITY, |a, &b| a.min(b));
    Ok(FunctionalReport { basis_values, random_values, positive: min_value >= -tol, min_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Gns,
    Free,
    Cyclic,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Gns => "gns",
            Provenance::Free => "free",
            Provenance::Cyclic => "cyclic",
        })
    }
}

/// The orthogonal action of a cocycle.
#[derive(Debug, Clone)]
pub enum Action {
    /// One `d×d` orthogonal matrix per group element.
    Matrices(Vec<RMatrix>),
    /// Left translation on the prefix basis of a free ball, evaluated on
    /// demand; undefined where a basis vector is sent outside the ball.
    FreeWord { base_dim: usize },
    /// Not computed (truncated GNS cocycles).
    Unavailable,
}

#[derive(Debug, Clone)]
pub struct Cocycle {
    length: LengthFunction,
    vectors: Vec<DVector<f64>>,
    action: Action,
    provenance: Provenance,
    side: Side,
    dim: usize,
}

/// Largest deviations observed in the cocycle identities.
#[derive(Debug, Clone, Serialize)]
pub struct ContractReport {
    pub cocycle_law: Option<f64>,
    pub orthogonality: Option<f64>,
    pub homomorphism: Option<f64>,
    pub norm_identity: f64,
    pub polarization: f64,
    pub metric: f64,
}

impl ContractReport {
    pub fn max_gap(&self) -> f64 {
        [self.cocycle_law, self.orthogonality, self.homomorphism, Some(self.norm_identity), Some(self.polarization), Some(self.metric)]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

impl Cocycle {
    /// Assembles a cocycle without checking any identity.
    pub fn from_parts(length: LengthFunction, vectors: Vec<DVector<f64>>, action: Action, provenance: Provenance, side: Side) -> Result<Self> {
        let dim = vectors.first().map_or(0, |v| v.len());
        if vectors.len() != length.group.order() || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::Dimension("cocycle vectors do not match the group".into()));
        }
        if let Action::Matrices(m) = &action {
            if m.len() != vectors.len() || m.iter().any(|a| a.nrows() != dim || a.ncols() != dim) {
                return Err(Error::Dimension("action matrices do not match the cocycle".into()));
            }
        }
        Ok(Self { length, vectors, action, provenance, side, dim })
    }

    pub fn group(&self) -> &GroupRef {
        &self.length.group
    }

    pub fn length(&self) -> &LengthFunction {
        &self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn vector(&self, g: usize) -> &DVector<f64> {
        &self.vectors[g]
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// `α_g` as a dense matrix.
    pub fn action_matrix(&self, g: usize) -> Result<RMatrix> {
        match &self.action {
            Action::Matrices(m) => Ok(m[g].clone()),
            Action::FreeWord { .. } => {
                let mut a = RMatrix::zeros(self.dim, self.dim);
                for i in 0..self.dim {
                    let (j, s) = self.free_image(g, i).ok_or(Error::PartialAction)?;
                    a[(j, i)] = s;
                }
                Ok(a)
            }
            Action::Unavailable => Err(Error::PartialAction),
        }
    }

    /// Whether `α` is defined on every basis vector for every element.
    pub fn action_is_total(&self) -> bool {
        match &self.action {
            Action::Matrices(_) => true,
            Action::FreeWord { .. } => (0..self.group().order()).all(|g| (0..self.dim).all(|i| self.free_image(g, i).is_some())),
            Action::Unavailable => false,
        }
    }

    /// Image of basis vector `i` under `α_g` on a free ball:
    /// `λ(g)(δ_h − δ_{h⁻}) = ξ_{gh}` when `(gh)⁻ = g h⁻`, else `−ξ_{g h⁻}`.
    fn free_image(&self, g: usize, i: usize) -> Option<(usize, f64)> {
        let Action::FreeWord { base_dim } = self.action else { return None };
        if i >= base_dim {
            return Some((i, 1.0));
        }
        let ball = self.group().as_free().ok()?;
        let h = ball.word(i + 1);
        let gw = ball.word(g);
        let gh = word_mul(gw, h);
        let gh_parent = word_mul(gw, &h[..h.len() - 1]);
        if !gh.is_empty() && gh[..gh.len() - 1] == gh_parent[..] {
            ball.index_of(&gh).map(|j| (j - 1, 1.0))
        } else {
            ball.index_of(&gh_parent).map(|j| (j - 1, -1.0))
        }
    }

    /// `α_g v`.
    pub fn apply_action(&self, g: usize, v: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.action {
            Action::Matrices(m) => Ok(&m[g] * v),
            Action::FreeWord { .. } => {
                let mut out = DVector::zeros(self.dim);
                for (i, &x) in v.iter().enumerate() {
                    if x != 0.0 {
                        let (j, s) = self.free_image(g, i).ok_or(Error::PartialAction)?;
                        out[j] += s * x;
                    }
                }
                Ok(out)
            }
            Action::Unavailable => Err(Error::PartialAction),
        }
    }

    /// Gram matrix `⟨b(g), b(h)⟩`.
    pub fn gram(&self) -> RMatrix {
        let n = self.vectors.len();
        let b = RMatrix::from_columns(&self.vectors);
        if self.dim == 0 {
            return RMatrix::zeros(n, n);
        }
        b.transpose() * b
    }

    /// Change of orthonormal basis: `b ↦ Q b`, `α ↦ Q α Qᵀ`.
    pub fn rotate(&self, q: &RMatrix) -> Result<Self> {
        if q.nrows() != self.dim || q.ncols() != self.dim {
            return Err(Error::Dimension("rotation size".into()));
        }
        let action = match &self.action {
            Action::Matrices(m) => Action::Matrices(m.iter().map(|a| q * a * q.transpose()).collect()),
            Action::Unavailable => Action::Unavailable,
            Action::FreeWord { .. } => Action::Matrices(
                (0..self.group().order()).map(|g| self.action_matrix(g).map(|a| q * a * q.transpose())).collect::<Result<_>>()?,
            ),
        };
        Ok(Self { vectors: self.vectors.iter().map(|v| q * v).collect(), action, dim: self.dim, length: self.length.clone(), ..*self })
    }

    /// Appends `extra` zero coordinates; the action is the identity on them.
    pub fn pad(&self, extra: usize) -> Self {
        let d = self.dim + extra;
        let vectors = self.vectors.iter().map(|v| v.clone().resize_vertically(d, 0.0)).collect();
        let action = match &self.action {
            Action::Matrices(m) => Action::Matrices(
                m.iter()
                    .map(|a| {
                        let mut big = RMatrix::identity(d, d);
                        big.view_mut((0, 0), (self.dim, self.dim)).copy_from(a);
                        big
                    })
                    .collect(),
            ),
            other => other.clone(),
        };
        Self { vectors, action, dim: d, length: self.length.clone(), ..*self }
    }

    /// Checks the cocycle identities against the stored length.
    pub fn check_contracts(&self) -> Result<ContractReport> {
        let group = self.group().clone();
        let n = group.order();
        let psi = &self.length;
        let norm_identity = (0..n).map(|g| (self.vectors[g].norm_squared() - psi.value(g)).abs()).fold(0.0, f64::max);
        let gram = self.gram();
        let k = gromov_form(psi, self.side)?;
        let polarization = (&gram - &k).amax();
        let mut metric: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                let d = (&self.vectors[g] - &self.vectors[h]).norm_squared();
                let q = match self.side {
                    Side::Left => psi.left_quotient(g, h)?,
                    Side::Right => psi.right_quotient(g, h)?,
                };
                metric = metric.max((d - q).abs());
            }
        }
        let (mut law, mut orth, mut hom) = (None, None, None);
        if !matches!(self.action, Action::Unavailable) {
            let mut law_gap: f64 = 0.0;
            for g in 0..n {
                for h in 0..n {
                    let lhs = match self.apply_action(g, &self.vectors[h]) {
                        Ok(v) => v,
                        Err(Error::PartialAction) => continue,
                        Err(e) => return Err(e),
                    };
                    let rhs = match self.side {
                        Side::Left => group.mul(g, h).map(|gh| &self.vectors[gh] - &self.vectors[g]),
                        Side::Right => group
                            .mul(h, group.inv(g))
                            .map(|hg| &self.vectors[hg] - &self.vectors[group.inv(g)]),
                    };
                    if let Some(r) = rhs {
                        law_gap = law_gap.max((lhs - r).amax());
                    }
                }
            }
            law = Some(law_gap);
            if let Action::Matrices(m) = &self.action {
                orth = Some(m.iter().map(orthogonality_defect).fold(0.0, f64::max));
                let mut hom_gap: f64 = 0.0;
                for g in 0..n {
                    for h in 0..n {
                        if let Some(gh) = group.mul(g, h) {
                            hom_gap = hom_gap.max((&m[g] * &m[h] - &m[gh]).amax());
                        }
                    }
                }
                hom = Some(hom_gap);
            }
        }
        Ok(ContractReport { cocycle_law: law, orthogonality: orth, homomorphism: hom, norm_identity, polarization, metric })
    }

    pub fn dump(&self) -> CocycleDump {
        CocycleDump {
            dimension: self.dim,
            provenance: self.provenance,
            side: self.side,
            length_id: self.length.id.clone(),
            vectors: self.vectors.iter().map(|v| v.iter().copied().collect()).collect(),
            action: match &self.action {
                Action::Matrices(m) => Some(m.iter().map(|a| a.row_iter().map(|r| r.iter().copied().collect()).collect()).collect()),
                _ => None,
            },
            action_extension: "identity on the orthogonal complement of the cocycle span".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleDump {
    pub dimension: usize,
    pub provenance: Provenance,
    pub side: Side,
    pub length_id: String,
    pub vectors: Vec<Vec<f64>>,
    pub action: Option<Vec<Vec<Vec<f64>>>>,
    pub action_extension: String,
}

/// GNS cocycle from the left Gromov form.
pub fn build_cocycle_gns(psi: &LengthFunction, tol: f64) -> Result<Cocycle> {
    build_cocycle_gns_side(psi, Side::Left, tol)
}

/// GNS cocycle from either Gromov form. The rank cutoff is `tol·λ_max`.
///
/// On the right side the action satisfies `α_g b(h) = b(hg⁻¹) − b(g⁻¹)`.
pub fn build_cocycle_gns_side(psi: &LengthFunction, side: Side, tol: f64) -> Result<Cocycle> {
    let k = gromov_form(psi, side)?;
    let (vals, vecs) = symmetric_eigen(&k);
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    if vals.first().copied().unwrap_or(0.0) < -tol.max(1e-9) * lmax.max(1.0) {
        return Err(Error::NotConditionallyNegative { min_eigenvalue: vals[0] });
    }
    let cutoff = tol * lmax;
    let kept: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > cutoff && vals[i] > 0.0).collect();
    let d = kept.len();
    let n = vals.len();
    let vectors: Vec<DVector<f64>> =
        (0..n).map(|g| DVector::from_iterator(d, kept.iter().map(|&i| vals[i].sqrt() * vecs[(g, i)]))).collect();
    let action = match psi.group.as_ref() {
        Group::Finite(_) => Action::Matrices(solve_action(psi.group(), &vectors, side)?),
        Group::FreeBall(_) => Action::Unavailable,
    };
    Cocycle::from_parts(psi.clone(), vectors, action, Provenance::Gns, side).map(|mut c| {
        c.dim = d;
        c
    })
}

/// Solves `α_g B = T_g` through the pseudo-inverse of `B = [b(h)]` and checks
/// the result is orthogonal and consistent.
fn solve_action(group: &GroupRef, vectors: &[DVector<f64>], side: Side) -> Result<Vec<RMatrix>> {
    let n = group.order();
    let d = vectors.first().map_or(0, |v| v.len());
    if d == 0 {
        return Ok(vec![RMatrix::zeros(0, 0); n]);
    }
    let b = RMatrix::from_columns(vectors);
    let pinv = b.clone().pseudo_inverse(1e-12).map_err(|e| Error::InconsistentAction(e.to_string()))?;
    let scale = vectors.iter().map(|v| v.norm()).fold(1.0, f64::max);
    crate::par::map_range(n, |g| {
        let target = RMatrix::from_fn(d, n, |r, h| match side {
            Side::Left => {
                let gh = group.mul(g, h).expect("finite group");
                vectors[gh][r] - vectors[g][r]
            }
            Side::Right => {
                let gi = group.inv(g);
                let hg = group.mul(h, gi).expect("finite group");
                vectors[hg][r] - vectors[gi][r]
            }
        });
        let a = &target * &pinv;
        let residual = (&a * &b - &target).amax();
        if residual > 1e-8 * scale {
            return Err(Error::InconsistentAction(format!("residual {residual:e} at element {g}")));
        }
        let defect = orthogonality_defect(&a);
        if defect > 1e-8 {
            return Err(Error::InconsistentAction(format!("orthogonality defect {defect:e} at element {g}")));
        }
        Ok(a)
    })
    .into_iter()
    .collect()
}

/// Prefix cocycle of a free ball: basis `ξ_h` for `h ≠ e` and
/// `⟨b(g), ξ_h⟩ = 1` exactly when `h` is a prefix of `g`.
pub fn free_word_cocycle(group: &GroupRef) -> Result<Cocycle> {
    let ball = group.as_free()?;
    if ball.radius() == 0 {
        return Err(Error::InvalidGroup("free ball of radius 0 carries no cocycle".into()));
    }
    let d = ball.len() - 1;
    let vectors = (0..ball.len())
        .map(|g| {
            let mut v = DVector::zeros(d);
            let mut cur = Some(g);
            while let Some(h) = cur {
                if h != 0 {
                    v[h - 1] = 1.0;
                }
                cur = ball.parent(h);
            }
            v
        })
        .collect();
    let psi = LengthFunction::free_word(group)?;
    Cocycle::from_parts(psi, vectors, Action::FreeWord { base_dim: d }, Provenance::Free, Side::Left)
}

/// Interval cocycle of `Z_{2m}` with word length: `⟨b(j), φ_k⟩ = 1` iff
/// `j ∈ Λ_k = {k, …, k+m−1} mod 2m`, `k = 1..m`. Returns the cocycle and the
/// sets `Λ_k`.
pub fn cyclic_word_cocycle(m: usize) -> Result<(Cocycle, Vec<Vec<usize>>)> {
    if m == 0 {
        return Err(Error::InvalidGroup("half-order must be positive".into()));
    }
    let n = 2 * m;
    let group = Group::Finite(crate::groups::FiniteGroup::cyclic(n)?).into_ref();
    let psi = crate::groups::word_length(&group, &[1])?;
    let member = |j: usize, k: usize| (j + n - k) % n < m;
    let sets: Vec<Vec<usize>> = (1..=m).map(|k| (0..n).filter(|&j| member(j, k)).collect()).collect();
    let vectors: Vec<DVector<f64>> =
        (0..n).map(|j| DVector::from_iterator(m, (1..=m).map(|k| if member(j, k) { 1.0 } else { 0.0 }))).collect();
    let action = Action::Matrices(solve_action(&group, &vectors, Side::Left)?);
    Ok((Cocycle::from_parts(psi, vectors, action, Provenance::Cyclic, Side::Left)?, sets))
}

/// `K(j,k) = j ∧ (2m−k) ∧ (m−k+j)₊` for `j ≤ k`, extended symmetrically.
pub fn cyclic_kernel_closed_form(m: usize, j: usize, k: usize) -> f64 {
    let (j, k) = if j <= k { (j as i64, k as i64) } else { (k as i64, j as i64) };
    let m = m as i64;
    j.min(2 * m - k).min((m - k + j).max(0)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FiniteGroup, FreeGroupBall};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(n: usize) -> GroupRef {
        Group::Finite(FiniteGroup::cyclic(n).unwrap()).into_ref()
    }

    fn psi(g: &GroupRef, v: &[f64]) -> LengthFunction {
        LengthFunction::new(g.clone(), v.to_vec(), "test").unwrap()
    }

    #[test]
    fn length_validation() {
        let g = z(4);
        assert!(LengthFunction::new(g.clone(), vec![1.0, 1.0, 2.0, 1.0], "x").is_err());
        assert!(LengthFunction::new(g.clone(), vec![0.0, 1.0, 2.0, 3.0], "x").is_err());
        assert!(LengthFunction::new(g, vec![0.0, 1.0, 2.0], "x").is_err());
    }

    #[test]
    fn gromov_examples() {
        let g = z(4);
        let p = psi(&g, &[0.0, 1.0, 2.0, 1.0]);
        let k = gromov_form(&p, Side::Left).unwrap();
        let sub = k.view((1, 1), (3, 3)).into_owned();
        assert_eq!(sub, RMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 1.0]));
        assert!(k.row(0).iter().all(|&x| x == 0.0));
        assert_eq!(k, gromov_form(&p, Side::Right).unwrap());
        assert!((0..4).all(|i| k[(i, i)] == p.value(i)));
    }

    #[test]
    fn negativity_examples() {
        let g = z(4);
        let good = is_conditionally_negative(&psi(&g, &[0.0, 1.0, 2.0, 1.0]), 1e-9).unwrap();
        assert!(good.verdict && good.witness.is_none());
        let bad_psi = psi(&g, &[0.0, 1.0, 3.0, 1.0]);
        let bad = is_conditionally_negative(&bad_psi, 1e-9).unwrap();
        assert!(!bad.verdict);
        // the stated witness over {1,2,3}: quadratic form of the Gromov matrix
        let k = gromov_form(&bad_psi, Side::Left).unwrap();
        let c = nalgebra::DVector::from_vec(vec![0.0, 1.0, -1.0, 1.0]);
        assert!(((c.transpose() * &k * &c)[(0, 0)] + 2.0).abs() < 1e-12);
        let w = bad.witness.unwrap();
        assert!(w.iter().sum::<f64>().abs() < 1e-12);
        assert!(negativity_form(&bad_psi, &w).unwrap() > 0.0);
        assert!(is_conditionally_negative(&psi(&g, &[0.0; 4]), 1e-9).unwrap().verdict);
    }

    #[test]
    fn schoenberg_examples() {
        let g = z(4);
        let p = psi(&g, &[0.0, 1.0, 2.0, 1.0]);
        for t in [0.1f64, 1.0, 3.0] {
            let entry = &schoenberg_check(&p, &[t], 1e-12).unwrap()[0];
            // circulant eigenvalues from the discrete Fourier transform
            let q = (-t).exp();
            let expected = [(1.0 + q) * (1.0 + q), 1.0 - q * q, (1.0 - q) * (1.0 - q), 1.0 - q * q];
            let min = expected.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((entry.min_eigenvalue - min).abs() < 1e-12);
            assert!(entry.positive);
        }
        let bad = psi(&g, &[0.0, 1.0, 3.0, 1.0]);
        // circulant oracle for the smallest eigenvalue: 1 − 2e^{−t} + e^{−3t};
        // positive at t = 1, negative near t = 0.2
        for (t, positive) in [(1.0f64, true), (0.1, false), (0.2, false)] {
            let e = &schoenberg_check(&bad, &[t], 1e-12).unwrap()[0];
            let oracle = 1.0 - 2.0 * (-t).exp() + (-3.0 * t).exp();
            assert!((e.min_eigenvalue - oracle).abs() < 1e-12);
            assert_eq!(e.positive, positive);
        }
    }

    #[test]
    fn gns_dimensions() {
        let g = z(4);
        let c = build_cocycle_gns(&psi(&g, &[0.0, 1.0, 2.0, 1.0]), 1e-9).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.check_contracts().unwrap().max_gap() < 1e-9);
        for m in 1..=6 {
            let g = z(2 * m);
            let p = crate::groups::word_length(&g, &[1]).unwrap();
            assert_eq!(build_cocycle_gns(&p, 1e-9).unwrap().dim(), m);
        }
        let b = Group::Finite(FiniteGroup::cyclic(4).unwrap()).into_ref();
        assert!(matches!(build_cocycle_gns(&psi(&b, &[0.0, 1.0, 3.0, 1.0]), 1e-9), Err(Error::NotConditionallyNegative { .. })));
    }

    #[test]
    fn free_cocycle_examples() {
        let g = Group::FreeBall(FreeGroupBall::new(2, 2).unwrap()).into_ref();
        let c = free_word_cocycle(&g).unwrap();
        let ball = g.as_free().unwrap();
        let ab = ball.index_of(&[1, 2]).unwrap();
        let a = ball.index_of(&[1]).unwrap();
        let v = c.vector(ab);
        assert_eq!(v.iter().filter(|&&x| x != 0.0).count(), 2);
        assert_eq!(v[a - 1], 1.0);
        assert_eq!(v[ab - 1], 1.0);
        for h in 0..ball.len() {
            assert_eq!(c.vector(h).norm_squared(), ball.length(h) as f64);
        }
        let report = c.check_contracts().unwrap();
        assert_eq!(report.max_gap(), 0.0);
        let gns = build_cocycle_gns(&LengthFunction::free_word(&g).unwrap(), 1e-9).unwrap();
        assert_eq!(gns.dim(), 16);
        assert!((gns.gram() - c.gram()).amax() < 1e-9);
        assert!(!c.action_is_total());
    }

    #[test]
    fn cyclic_cocycle_examples() {
        let (c, sets) = cyclic_word_cocycle(2).unwrap();
        assert_eq!(sets, vec![vec![1, 2], vec![2, 3]]);
        assert_eq!(cyclic_kernel_closed_form(2, 1, 3), 0.0);
        assert_eq!(c.gram()[(1, 3)], 0.0);
        for m in 1..=8 {
            let (c, _) = cyclic_word_cocycle(m).unwrap();
            assert!(c.check_contracts().unwrap().max_gap() < 1e-9);
            for j in 0..2 * m {
                assert_eq!(c.vector(j).sum(), j.min(2 * m - j) as f64);
            }
        }
    }

    #[test]
    fn density_lengths() {
        let g = z(4);
        let p = length_from_density(&AlgebraElement::delta(&g, 0)).unwrap();
        assert_eq!(p.values(), &[0.0, 2.0, 2.0, 2.0]);
        assert!(length_from_density(&AlgebraElement::zero(&g)).unwrap().values().iter().all(|&x| x == 0.0));
        // two point masses at characters γ = 1, 2 of Z_6 with weights w
        let z6 = z(6);
        let w = [(1usize, 0.7), (2usize, 0.4)];
        let mut omega = AlgebraElement::zero(&z6);
        for g in 0..6 {
            let mut v = num_complex::Complex64::new(0.0, 0.0);
            for &(gamma, wt) in &w {
                v += wt * num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (gamma * g) as f64 / 6.0);
            }
            // w_γ times the spectral projection of the character γ
            omega.coeffs_mut()[g] = v / 6.0;
        }
        let p = length_from_density(&omega).unwrap();
        for g in 0..6 {
            let oracle: f64 = w
                .iter()
                .map(|&(gamma, wt)| wt / 6.0 * (2.0 - 2.0 * (2.0 * std::f64::consts::PI * (gamma * g) as f64 / 6.0).cos()))
                .sum();
            assert!((p.value(g) - oracle).abs() < 1e-12);
        }
        assert!(is_conditionally_negative(&p, 1e-9).unwrap().verdict);
        let mut not_pos = AlgebraElement::delta(&g, 0);
        not_pos.coeffs_mut()[2] = num_complex::Complex64::new(3.0, 0.0);
        assert!(matches!(length_from_density(&not_pos), Err(Error::NotPositive(_))));
    }

    #[test]
    fn functional_examples() {
        let g = z(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let good = functional_from_length(&psi(&g, &[0.0, 1.0, 2.0, 1.0]), 10, 1e-9, &mut rng).unwrap();
        assert_eq!(good.basis_values[0], 1.0);
        assert!(good.positive);
        assert_eq!(functional_value(&psi(&g, &[0.0, 1.0, 2.0, 1.0]), &[0.0; 4]).unwrap(), 0.0);
        let bad = functional_from_length(&psi(&g, &[0.0, 1.0, 3.0, 1.0]), 10, 1e-9, &mut rng).unwrap();
        assert!(!bad.positive);
    }

    #[test]
    fn zero_set_is_subgroup() {
        // ψ pulled back from Z_3 through Z_6 → Z_3 vanishes on {0,3}
        let g = z(6);
        let p = psi(&g, &[0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        let zs = p.zero_set(1e-12);
        assert_eq!(zs, vec![0, 3]);
        assert!(g.as_finite().unwrap().is_subgroup(&zs));
        let c = build_cocycle_gns(&p, 1e-9).unwrap();
        assert!(c.check_contracts().unwrap().max_gap() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn gns_contracts_on_density_lengths(n in 2usize..10, seed in any::<u64>()) {
            let g = z(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = AlgebraElement::random(&g, &mut rng);
            let omega = a.adjoint().mul(&a).unwrap();
            let p = length_from_density(&omega).unwrap();
            let left = build_cocycle_gns(&p, 1e-9).unwrap();
            let report = left.check_contracts().unwrap();
            let scale = p.max_value().max(1.0);
            prop_assert!(report.max_gap() < 1e-9 * scale, "{:?}", report);
            let right = build_cocycle_gns_side(&p, Side::Right, 1e-9).unwrap();
            prop_assert!(right.check_contracts().unwrap().max_gap() < 1e-9 * scale);
            let (gl, gr) = (left.gram(), right.gram());
            for x in 0..n {
                for y in 0..n {
                    prop_assert!((gl[(x, y)] - gr[(g.inv(x), g.inv(y))]).abs() < 1e-9 * scale);
                }
            }
        }
    }
}
