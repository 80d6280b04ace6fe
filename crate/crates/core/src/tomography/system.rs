use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockConfig;
use crate::special::{
    derivative_scale, diagonal_closed_form, pattern_system_entry, pattern_system_entry_quadrature,
};

const ZERO_TOL: f64 = 1e-9;
const DIAGONAL_TOL: f64 = 1e-7;

/// Per-row conditioning data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowCondition {
    pub l: usize,
    pub diagonal: f64,
    /// Largest `|M[l][n] / M[l][l]|` over `n ≤ l`.
    pub scaled_row_max: f64,
}

/// Lower-triangular system `M[l][n] = ⟨n+k|f^(k+2l)(Q)|n⟩` for one offset `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSystem {
    pub k: usize,
    pub l_max: usize,
    /// Raw matrix elements, including the (vanishing) upper triangle.
    pub matrix: DMatrix<f64>,
    /// Rows divided by their diagonal.
    pub scaled: DMatrix<f64>,
    pub condition: Vec<RowCondition>,
}

/// Fills and checks the system for offset `k` and rows `0..=l_max`.
pub fn build_pattern_system(k: usize, l_max: usize) -> Result<PatternSystem> {
    let size = l_max + 1;
    let mut matrix = DMatrix::zeros(size, size);
    for l in 0..size {
        for n in 0..size {
            matrix[(l, n)] = pattern_system_entry(k, l, n)?;
        }
    }
    for l in 0..size {
        for n in l + 1..size {
            if matrix[(l, n)].abs() > ZERO_TOL {
                return Err(Error::Certification(format!(
                    "k={k}: entry ({l},{n}) = {:e} above the diagonal",
                    matrix[(l, n)]
                )));
            }
        }
        let want = diagonal_closed_form(k, l);
        if (matrix[(l, l)] - want).abs() > DIAGONAL_TOL * want.abs() {
            return Err(Error::Certification(format!(
                "k={k}: diagonal {l} is {} instead of {want}",
                matrix[(l, l)]
            )));
        }
    }
    let mut scaled = matrix.clone();
    let mut condition = Vec::with_capacity(size);
    for l in 0..size {
        let d = matrix[(l, l)];
        scaled.row_mut(l).scale_mut(1.0 / d);
        let scaled_row_max = (0..=l).map(|n| scaled[(l, n)].abs()).fold(0.0, f64::max);
        condition.push(RowCondition {
            l,
            diagonal: d,
            scaled_row_max,
        });
    }
    Ok(PatternSystem {
        k,
        l_max,
        matrix,
        scaled,
        condition,
    })
}

impl PatternSystem {
    /// Forward substitution `x_l = (c_l − Σ_{n<l} x_n M[l][n]) / M[l][l]`.
    pub fn solve(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        if c.len() != self.l_max + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.l_max + 1,
                found: c.len(),
            });
        }
        let mut x: Vec<Complex64> = Vec::with_capacity(c.len());
        for l in 0..c.len() {
            let d = self.condition[l].diagonal;
            let mut acc = c[l] / d;
            for (n, xn) in x.iter().enumerate() {
                acc -= xn * self.scaled[(l, n)];
            }
            x.push(acc);
        }
        Ok(x)
    }

    /// Standard errors of the solution from independent coefficient errors,
    /// propagated row by row with off-diagonal correlations ignored.
    pub fn propagate_errors(&self, c_err: &[f64]) -> Vec<f64> {
        let mut var: Vec<f64> = Vec::with_capacity(c_err.len());
        for (l, &e) in c_err.iter().enumerate() {
            let d = self.condition[l].diagonal;
            let mut v = (e / d).powi(2);
            for (n, vn) in var.iter().enumerate() {
                v += vn * self.scaled[(l, n)].powi(2);
            }
            var.push(v);
        }
        var.into_iter().map(f64::sqrt).collect()
    }

    /// Largest scaled difference between the closed-form entries and Gauss–Hermite
    /// quadrature of the same integrals.
    pub fn quadrature_check(&self, cfg: &FockConfig) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for l in 0..=self.l_max {
            let scale = derivative_scale(self.k + 2 * l + 1);
            for n in 0..=self.l_max {
                let q = pattern_system_entry_quadrature(self.k, l, n, cfg)?;
                worst = worst.max((q - self.matrix[(l, n)]).abs() / scale);
            }
        }
        Ok(worst)
    }
}
