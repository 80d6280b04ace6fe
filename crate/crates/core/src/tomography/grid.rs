use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angles at which quadrature statistics are available, increasing in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    angles: Vec<f64>,
    uniform: bool,
}

/// Whether discrete Fourier means on a grid reproduce the angular integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub count: usize,
    pub uniform: bool,
    pub required: usize,
    pub exact: bool,
}

const UNIFORM_TOL: f64 = 1e-12;

impl AngleGrid {
    /// `θ_j = 2πj/J`.
    pub fn uniform(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidConfig("angle grid needs at least one angle".into()));
        }
        Ok(Self {
            angles: (0..count).map(|j| TAU * j as f64 / count as f64).collect(),
            uniform: true,
        })
    }

    /// Arbitrary increasing angles in `[0, 2π)`; uniformity is detected.
    pub fn from_angles(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidConfig("angle grid needs at least one angle".into()));
        }
        if angles.iter().any(|&a| !(0.0..TAU).contains(&a)) {
            return Err(Error::InvalidConfig("angles must lie in [0, 2π)".into()));
        }
        if angles.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("angles must be strictly increasing".into()));
        }
        let count = angles.len();
        let uniform = angles
            .iter()
            .enumerate()
            .all(|(j, &a)| (a - TAU * j as f64 / count as f64).abs() <= UNIFORM_TOL);
        Ok(Self { angles, uniform })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// `2·(dim−1) + 1 + k_max`.
    pub fn required_len(dim: usize, k_max: usize) -> usize {
        2 * dim.saturating_sub(1) + 1 + k_max
    }

    pub fn certificate(&self, dim: usize, k_max: usize) -> GridCertificate {
        let required = Self::required_len(dim, k_max);
        GridCertificate {
            count: self.len(),
            uniform: self.uniform,
            required,
            exact: self.uniform && self.len() >= required,
        }
    }

    /// Quadrature weights for `(1/2π)∫₀^{2π} · dθ`: `1/J` on uniform grids,
    /// periodic trapezoid weights otherwise.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.len();
        if self.uniform {
            return vec![1.0 / n as f64; n];
        }
        (0..n)
            .map(|j| {
                let next = if j + 1 < n { self.angles[j + 1] } else { self.angles[0] + TAU };
                let prev = if j > 0 { self.angles[j - 1] } else { self.angles[n - 1] - TAU };
                (next - prev) / (2.0 * TAU)
            })
            .collect()
    }
}

/// `(1/2π)∫₀^{2π} e^{−ikθ} E_θ dθ` from expectations sampled on `grid`.
///
/// Uniform grids must satisfy the exactness bound for `dim`; the discrete mean
/// is then exact because the integrand is a trigonometric polynomial.
/// Non-uniform grids use periodic trapezoid weights and carry no exactness claim.
pub fn angular_coefficient(
    k: usize,
    grid: &AngleGrid,
    expectations: &[f64],
    dim: usize,
) -> Result<Complex64> {
    if expectations.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: expectations.len(),
        });
    }
    let cert = grid.certificate(dim, k);
    if grid.is_uniform() && !cert.exact {
        return Err(Error::GridTooCoarse {
            found: cert.count,
            required: cert.required,
        });
    }
    Ok(weighted_coefficient(k, grid, &grid.weights(), expectations))
}

pub(crate) fn weighted_coefficient(k: usize, grid: &AngleGrid, weights: &[f64], values: &[f64]) -> Complex64 {
    grid.angles()
        .iter()
        .zip(weights)
        .zip(values)
        .map(|((&theta, &w), &e)| Complex64::from_polar(w * e, -(k as f64) * theta))
        .sum()
}
