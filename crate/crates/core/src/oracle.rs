//! Brute-force computations the closed forms are tested against. Nothing in
//! here calls the closed-form path it is meant to check.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::homogeneous::HomogeneousSpace;
use crate::lie_core::ReductiveData;
use crate::norms::MinkowskiNorm;
use crate::sampling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("the plane spanned by x and y is degenerate")]
    DegeneratePlane,
    #[error("the bi-invariant sectional formula needs h = 0")]
    NonTrivialIsotropy,
    #[error("the inner product is not ad-invariant (defect {0:e})")]
    NotBiInvariant(f64),
    #[error("random frame or fundamental tensor is singular")]
    Singular,
    #[error("zero base vector")]
    ZeroVector,
}

/// Central-difference Hessian with a fixed step, symmetrized.
pub fn central_hessian(f: &dyn Fn(&DVector<f64>) -> f64, y: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let n = y.len();
    let f0 = f(y);
    let shifted = |i: usize, si: f64, j: usize, sj: f64| {
        let mut z = y.clone();
        z[i] += si;
        z[j] += sj;
        f(&z)
    };
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        hess[(i, i)] = (shifted(i, h, i, 0.0) - 2.0 * f0 + shifted(i, -h, i, 0.0)) / (h * h);
        for j in 0..i {
            let v = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Step used by [`fd_hessian`]: `ε^{1/4}·max(1, |y|)`.
pub fn hessian_step(y: &DVector<f64>) -> f64 {
    f64::EPSILON.powf(0.25) * y.norm().max(1.0)
}

/// Central-difference Hessian of `f` at `y`. Returns the matrix and whether
/// the step reaches the origin, where homogeneous integrands are singular.
pub fn fd_hessian(f: &dyn Fn(&DVector<f64>) -> f64, y: &DVector<f64>) -> (DMatrix<f64>, bool) {
    let h = hessian_step(y);
    (central_hessian(f, y, h), 2.0 * h >= y.norm())
}

/// `½·∇²F²` by finite differences.
pub fn fundamental_tensor_fd(norm: &MinkowskiNorm, y: &DVector<f64>) -> DMatrix<f64> {
    let f2 = |z: &DVector<f64>| {
        let f = norm.f_value(z);
        f * f
    };
    fd_hessian(&f2, y).0 * 0.5
}

/// `C_y(u, v, w) = ½ d/dt g_{y+tw}(u, v)` by a central difference of the
/// L-form fundamental tensor.
pub fn cartan_fd(norm: &MinkowskiNorm, y: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let h = f64::EPSILON.powf(1.0 / 3.0) * y.norm().max(1e-300);
    let g = |z: DVector<f64>| norm.g_bilinear(&z, u, v).unwrap_or(f64::NAN);
    (g(y + w * h) - g(y - w * h)) / (4.0 * h)
}

/// Sectional curvature `¼|[x,y]|² / (|x|²|y|² - ⟨x,y⟩²)` of a bi-invariant
/// metric on a Lie algebra (`h = 0`).
pub fn bi_invariant_sectional(data: &ReductiveData, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64, OracleError> {
    if data.dims().h != 0 {
        return Err(OracleError::NonTrivialIsotropy);
    }
    let gram = data.ip.gram();
    let n = gram.nrows();
    let mut defect: f64 = 0.0;
    for z in 0..n {
        let a = data.lie.ad_m(z);
        defect = defect.max((a.transpose() * gram + gram * &a).amax());
    }
    if defect > 1e-9 {
        return Err(OracleError::NotBiInvariant(defect));
    }
    let ip = &data.ip;
    let area = ip.dot(x, x) * ip.dot(y, y) - ip.dot(x, y).powi(2);
    if area <= 1e-12 * ip.dot(x, x) * ip.dot(y, y) {
        return Err(OracleError::DegeneratePlane);
    }
    let b = data.lie.bracket(x, y).map_err(|_| OracleError::DegeneratePlane)?;
    Ok(0.25 * ip.dot(&b, &b) / area)
}

/// `η(y)` from the defining identity tested against a random frame
/// `u_1..u_n`: `g_y(η, u_k) = g_y(y, [u_k, y]_m)`, solved by LU.
pub fn spray_bruteforce(space: &HomogeneousSpace, y: &DVector<f64>, seed: u64) -> Result<DVector<f64>, OracleError> {
    let n = space.n();
    if y.norm() == 0.0 {
        return Err(OracleError::ZeroVector);
    }
    let mut rng = sampling::rng(seed);
    let frame: Vec<DVector<f64>> = (0..n).map(|_| sampling::gaussian(&mut rng, n)).collect();
    let norm = space.norm();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for (k, u) in frame.iter().enumerate() {
        // [u, y] over all of g, then the m coordinates.
        let full = space.lie().bracket(u, y).map_err(|_| OracleError::Singular)?;
        let uy = space.lie().m_coords(&full);
        b[k] = norm.g_bilinear(y, y, &uy).map_err(|_| OracleError::Singular)?;
        for j in 0..n {
            let ej = space.basis(j);
            a[(k, j)] = norm.g_bilinear(y, &ej, u).map_err(|_| OracleError::Singular)?;
        }
    }
    a.lu().solve(&b).ok_or(OracleError::Singular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lie_core::InnerProduct;
    use crate::norms::NormFamily;

    #[test]
    fn hessian_of_quadratic_form() {
        let gram = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let g = gram.clone();
        let f = move |z: &DVector<f64>| (z.transpose() * &g * z)[(0, 0)];
        let (h, warn) = fd_hessian(&f, &DVector::from_vec(vec![0.3, -0.8]));
        assert!(!warn);
        assert!((h - gram * 2.0).amax() < 1e-7);
    }

    #[test]
    fn riemannian_f_squared_hessian() {
        let norm = MinkowskiNorm::new(NormFamily::Riemannian { w1: 1.0, w2: 1.0 }, InnerProduct::identity(2, 1)).unwrap();
        let h = fundamental_tensor_fd(&norm, &DVector::from_vec(vec![0.5, 0.2, -0.4]));
        assert!((h - DMatrix::identity(3, 3)).amax() < 1e-7);
    }

    #[test]
    fn step_warning_near_origin() {
        let f = |z: &DVector<f64>| z.norm_squared();
        assert!(fd_hessian(&f, &DVector::from_vec(vec![1e-5, 0.0])).1);
    }

    #[test]
    fn sectional_abelian_and_su2() {
        let abelian = catalog::abelian(1, 1);
        let x = DVector::from_vec(vec![1.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0]);
        assert_eq!(bi_invariant_sectional(&abelian, &x, &y).unwrap(), 0.0);

        let su2 = catalog::su2_split_bi_invariant();
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        // [e1, e2] = e3, so K = 1/4.
        assert!((bi_invariant_sectional(&su2, &x, &y).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(bi_invariant_sectional(&su2, &x, &(&x * 2.0)), Err(OracleError::DegeneratePlane));
    }

    #[test]
    fn sectional_refuses_isotropy() {
        let data = catalog::euclidean_diag_so2();
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(bi_invariant_sectional(&data, &x, &y), Err(OracleError::NonTrivialIsotropy));
    }
}
