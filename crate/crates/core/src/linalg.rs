//! Small dense helpers on Hermitian matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigen-decomposition of a Hermitian matrix (only the lower triangle is read).
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    (eig.eigenvalues, eig.eigenvectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    m.clone().symmetric_eigenvalues()
}

/// `(m + m†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Frobenius norm of the anti-Hermitian part.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    ((m - m.adjoint()).scale(0.5)).norm()
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let mapped = DMatrix::from_diagonal(&vals.map(|v| Complex64::new(f(v), 0.0)));
    &vecs * mapped * vecs.adjoint()
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let sqrt_rho = hermitian_map(rho, |v| v.max(0.0).sqrt());
    let inner = hermitian_part(&(&sqrt_rho * sigma * &sqrt_rho));
    let root_trace: f64 = hermitian_eigenvalues(&inner)
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    root_trace * root_trace
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let diff = hermitian_part(&(rho - sigma));
    0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>()
}

/// Largest entrywise modulus of `a − b`.
pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> CMatrix {
        DMatrix::from_diagonal(&DVector::from_iterator(
            v.len(),
            v.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    #[test]
    fn fidelity_of_identical_states_is_one() {
        let rho = diag(&[0.25, 0.75]);
        assert!((fidelity(&rho, &rho) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_states() {
        let a = diag(&[1.0, 0.0]);
        let b = diag(&[0.0, 1.0]);
        assert!(fidelity(&a, &b).abs() < 1e-12);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commuting_fidelity_is_classical() {
        let a = diag(&[0.5, 0.5]);
        let b = diag(&[0.9, 0.1]);
        let expected = ((0.5f64 * 0.9).sqrt() + (0.5f64 * 0.1).sqrt()).powi(2);
        assert!((fidelity(&a, &b) - expected).abs() < 1e-12);
        assert!((trace_distance(&a, &b) - 0.4).abs() < 1e-12);
    }
}
