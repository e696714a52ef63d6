//! Thin wrappers over nalgebra for the spectral computations used throughout:
//! Hermitian eigendecompositions, normalized-trace Schatten norms and the
//! orthogonal solves behind cocycle actions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Eigenvalues (ascending) and eigenvectors (columns) of a real symmetric matrix.
pub fn symmetric_eigen(m: &RMatrix) -> (Vec<f64>, RMatrix) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    sort_eigen(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    sort_eigen(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn sort_eigen<T: nalgebra::Scalar + Copy>(vals: Vec<f64>, vecs: DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

/// `((1/N) Σ λᵢ^{p/2})^{1/p}` over the (clamped) eigenvalues of a positive
/// matrix, i.e. the normalized-trace L_p norm of its square root.
/// `p = ∞` gives the square root of the largest eigenvalue.
pub fn root_norm_from_eigenvalues(eigs: &[f64], p: f64) -> f64 {
    if eigs.is_empty() {
        return 0.0;
    }
    let clamped = eigs.iter().map(|&l| l.max(0.0));
    if p.is_infinite() {
        return clamped.fold(0.0, f64::max).sqrt();
    }
    let n = eigs.len() as f64;
    let s: f64 = clamped.map(|l| l.powf(p / 2.0)).sum::<f64>() / n;
    s.powf(1.0 / p)
}

/// Normalized-trace Schatten norm `((1/N) Tr |M|^p)^{1/p}`.
pub fn normalized_schatten(m: &CMatrix, p: f64) -> f64 {
    let gram = m.adjoint() * m;
    root_norm_from_eigenvalues(&hermitian_eigenvalues(&gram), p)
}

/// `‖X^{1/2}‖_p` for a positive semidefinite Hermitian matrix `X`.
pub fn psd_root_norm(x: &CMatrix, p: f64) -> f64 {
    root_norm_from_eigenvalues(&hermitian_eigenvalues(x), p)
}

/// Largest eigenvalue of a symmetric positive semidefinite real matrix.
pub fn spectral_radius_sym(m: &RMatrix) -> f64 {
    let (vals, _) = symmetric_eigen(m);
    vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Haar-distributed orthogonal matrix from the QR factorization of a gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> RMatrix {
    let g = RMatrix::from_fn(d, d, |_, _| standard_normal(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column signs so the distribution is Haar
    let mut q = q;
    for c in 0..d {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// Box-Muller draw from N(0,1).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Solves `X·A = B` in the least-squares sense through the pseudo-inverse of
/// `A` (A has full row rank in every use: columns span the cocycle space).
pub fn solve_right(a: &RMatrix, b: &RMatrix, tol: f64) -> Option<RMatrix> {
    let pinv = a.clone().pseudo_inverse(tol).ok()?;
    Some(b * pinv)
}

/// Maximum absolute entry of `aᵀa − I`.
pub fn orthogonality_defect(a: &RMatrix) -> f64 {
    let d = a.ncols();
    let g = a.transpose() * a;
    (g - RMatrix::identity(d, d)).amax()
}

pub fn real_to_complex(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schatten_of_unitary_is_one() {
        let m = CMatrix::from_fn(3, 3, |r, c| {
            if (r + 1) % 3 == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((normalized_schatten(&m, p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random_orthogonal(6, &mut rng);
        assert!(orthogonality_defect(&q) < 1e-12);
    }

    #[test]
    fn eigen_sorted_ascending() {
        let m = RMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let v = vecs.column(1);
        assert!((v[0].abs() - v[1].abs()).abs() < 1e-12);
    }
}
