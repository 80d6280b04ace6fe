use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Hermiticity tolerance applied on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for a physical state.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue is `−EIGEN_TOL`.
pub const EIGEN_TOL: f64 = 1e-10;

/// A state `ρ[m][n] = ⟨m|T|n⟩` on the truncated Fock space.
///
/// Construction enforces exact Hermiticity (the input is symmetrized after a
/// tolerance check), a trace condition and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Physical state: trace within 1e-12 of 1, eigenvalues ≥ −1e-10.
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::with_trace_tolerance(entries, TRACE_TOL)
    }

    /// As [`DensityMatrix::new`] but with a looser trace window, used for
    /// truncations of infinite-dimensional states that lose some mass.
    pub fn with_trace_tolerance(entries: CMatrix, trace_tol: f64) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidConfig(format!(
                "density matrix must be square and non-empty, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidConfig("density matrix has non-finite entries".into()));
        }
        let deviation = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let entries = linalg::hermitian_part(&entries);
        let trace = entries.trace().re;
        if (trace - 1.0).abs() > trace_tol {
            return Err(Error::TraceMismatch {
                trace,
                tolerance: trace_tol,
            });
        }
        let min_eigenvalue = linalg::hermitian_eigenvalues(&entries).min();
        if min_eigenvalue < -EIGEN_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue,
                tolerance: EIGEN_TOL,
            });
        }
        Ok(Self { entries })
    }

    /// `|n⟩⟨n|`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::InvalidConfig(format!("Fock level {n} outside dim {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(n, n)] = Complex64::new(1.0, 0.0);
        Self::new(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        Self::new(&v * v.adjoint())
    }

    /// Diagonal state from populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| Complex64::new(p, 0.0)),
        );
        Self::new(DMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = linalg::hermitian_eigenvalues(&self.entries)
            .iter()
            .copied()
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// `Σ_{n ≥ dim−2} ρ[n][n]`: population near the truncation edge.
    pub fn edge_mass(&self) -> f64 {
        let d = self.dim();
        (d.saturating_sub(2)..d).map(|n| self.entries[(n, n)].re).sum()
    }

    /// Zero-padded copy on a larger truncation.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.entries);
        Ok(Self { entries: m })
    }

    pub fn fidelity(&self, other: &DensityMatrix) -> f64 {
        linalg::fidelity(&self.entries, &other.entries)
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        linalg::trace_distance(&self.entries, &other.entries)
    }

    pub fn to_file_format(&self) -> DensityMatrixFile {
        DensityMatrixFile::from_matrix(&self.entries)
    }

    /// Parses the JSON file form; Hermiticity and the trace are enforced.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DensityMatrixFile = serde_json::from_str(text)?;
        Self::new(file.to_matrix()?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file_format())?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Reads a file whose trace may deviate from 1 by up to `trace_tol`, as for
    /// truncated states.
    pub fn read_with_trace_tolerance(path: impl AsRef<Path>, trace_tol: f64) -> Result<Self> {
        let file: DensityMatrixFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::with_trace_tolerance(file.to_matrix()?, trace_tol)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// `{"dim": d, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DensityMatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let row = |f: fn(&Complex64) -> f64, i: usize| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect();
        Self {
            dim,
            re: (0..dim).map(|i| row(|z| z.re, i)).collect(),
            im: (0..dim).map(|i| row(|z| z.im, i)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let d = self.dim;
        let shape_ok = |a: &Vec<Vec<f64>>| a.len() == d && a.iter().all(|r| r.len() == d);
        if d == 0 || !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Parse(format!(
                "density matrix arrays must be {d}×{d} (re and im)"
            )));
        }
        Ok(CMatrix::from_fn(d, d, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

/// `a`, `a†` and `N` on the truncated space.
#[derive(Debug, Clone)]
pub struct LadderOperators {
    pub a: DMatrix<f64>,
    pub a_dagger: DMatrix<f64>,
    /// Built directly as `diag(0, …, dim−1)`, so it has no truncation artifact.
    pub number: DMatrix<f64>,
}

impl LadderOperators {
    pub fn new(dim: usize) -> Self {
        let a = DMatrix::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                (j as f64).sqrt()
            } else {
                0.0
            }
        });
        let a_dagger = a.transpose();
        let number = DMatrix::from_fn(dim, dim, |i, j| if i == j { i as f64 } else { 0.0 });
        Self { a, a_dagger, number }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `Q = (a† + a)/√2`.
    pub fn position(&self) -> DMatrix<f64> {
        (&self.a + &self.a_dagger) / std::f64::consts::SQRT_2
    }

    /// `Q_θ = e^{iθN} Q e^{−iθN} = (a e^{−iθ} + a† e^{iθ})/√2`.
    pub fn quadrature(&self, theta: f64) -> CMatrix {
        let phase = Complex64::from_polar(1.0, -theta);
        let a = self.a.map(|v| Complex64::new(v, 0.0) * phase);
        let ad = self.a_dagger.map(|v| Complex64::new(v, 0.0) * phase.conj());
        (a + ad).unscale(std::f64::consts::SQRT_2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_matches_product_away_from_edge() {
        let ops = LadderOperators::new(6);
        let prod = &ops.a_dagger * &ops.a;
        for n in 0..6 {
            assert!((prod[(n, n)] - n as f64).abs() < 1e-14);
            assert_eq!(ops.number[(n, n)], n as f64);
        }
        assert_eq!(ops.a_dagger, ops.a.transpose());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_bad_trace_and_negative_spectrum() {
        assert!(matches!(
            DensityMatrix::diagonal(&[0.5, 0.4]),
            Err(Error::TraceMismatch { .. })
        ));
        assert!(matches!(
            DensityMatrix::diagonal(&[1.2, -0.2]),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let psi = [
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ];
        let rho = DensityMatrix::pure(&psi).unwrap();
        let back = DensityMatrix::from_json(&rho.to_json().unwrap()).unwrap();
        assert_eq!(rho, back);

        let bad = r#"{"dim": 2, "re": [[1.0, 0.2],[0.0, 0.0]], "im": [[0,0],[0,0]]}"#;
        assert!(DensityMatrix::from_json(bad).is_err());
        let ragged = r#"{"dim": 2, "re": [[1.0],[0.0, 0.0]], "im": [[0,0],[0,0]]}"#;
        assert!(matches!(DensityMatrix::from_json(ragged), Err(Error::Parse(_))));
    }

    #[test]
    fn quadrature_expectation_of_number_states_vanishes() {
        let ops = LadderOperators::new(8);
        for theta in [0.0, 0.7, 2.9] {
            let q = ops.quadrature(theta);
            for n in 0..8 {
                assert_eq!(q[(n, n)], Complex64::new(0.0, 0.0));
            }
        }
    }
}
