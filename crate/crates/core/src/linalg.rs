//! Fixed-size 4×4 complex helpers shared by the physics modules.

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Eigenvalues below this magnitude are treated as exact zeros when forming
/// matrix square roots.
pub(crate) const RANK_EPS: f64 = 1e-14;

pub(crate) const PSD_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn paulis() -> [Mat2; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Kronecker product `a ⊗ b` in the (|00⟩, |01⟩, |10⟩, |11⟩) ordering.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &Mat4) -> Result<(Vector4<f64>, Mat4)> {
    let eig = SymmetricEigen::try_new(*m, f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector4::from_fn(|i, _| eig.eigenvalues[order[i]]);
    let vectors = Mat4::from_fn(|i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat4) -> Result<Vector4<f64>> {
    let eig = SymmetricEigen::try_new(*m, f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let mut v = eig.eigenvalues;
    v.as_mut_slice().sort_by(f64::total_cmp);
    Ok(v)
}

pub fn min_eigenvalue(m: &Mat4) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Square root of a positive semidefinite Hermitian matrix. Eigenvalues in
/// `[-PSD_TOL, RANK_EPS)` are clamped to zero; anything more negative is an
/// error.
pub fn sqrt_psd(m: &Mat4) -> Result<Mat4> {
    let (values, vectors) = hermitian_eigen(m)?;
    if values[0] < -PSD_TOL {
        return Err(Error::InvalidState(format!(
            "matrix square root of non-PSD matrix (eigenvalue {:e})",
            values[0]
        )));
    }
    let roots = values.map(|v| if v < RANK_EPS { 0.0 } else { v.sqrt() });
    Ok(reconstruct(&vectors, &roots))
}

/// `V diag(d) V†`.
pub(crate) fn reconstruct(vectors: &Mat4, diag: &Vector4<f64>) -> Mat4 {
    let mut scaled = *vectors;
    for j in 0..4 {
        let d = diag[j];
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= d);
    }
    scaled * vectors.adjoint()
}

/// Largest entry of `|m - m†|`.
pub fn hermiticity_defect(m: &Mat4) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &Mat4) -> Mat4 {
    (m + m.adjoint()).map(|z| z * 0.5)
}

pub fn trace(m: &Mat4) -> C64 {
    m.trace()
}
