//! State reconstruction from rotated-quadrature statistics.
//!
//! For each offset `k`, the angular Fourier coefficients
//! `c_{k,l} = (1/2π)∫ e^{−ikθ} E_θ[f^(k+2l)] dθ` satisfy
//! `c_{k,l} = Σ_{n≤l} ρ[n][n+k]·⟨n+k|f^(k+2l)(Q)|n⟩`, a lower-triangular system
//! with nonzero diagonal that is solved by forward substitution.

mod grid;
mod reconstruct;
mod system;

use num_complex::Complex64;

pub use grid::{angular_coefficient, AngleGrid, GridCertificate};
pub use reconstruct::{
    exact_expectations, reconstruct, reconstruct_with, sample_expectations, DataMode, Diagnostics,
    QuadratureData, ReconstructOptions, ReconstructionResult, RowReport, SystemReport, MIN_SAMPLES,
};
pub use system::{build_pattern_system, PatternSystem, RowCondition};

use crate::error::Result;
use crate::fock::{operator_matrix, DensityMatrix, FockConfig};

/// `Σ_n ρ[n][n+k]·⟨n+k|g(Q)|n⟩` with matrix elements by Gauss–Hermite quadrature.
pub fn direct_coefficient(
    rho: &DensityMatrix,
    k: usize,
    g: impl Fn(f64) -> f64,
    cfg: &FockConfig,
) -> Result<Complex64> {
    let dim = rho.dim();
    if k >= dim {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let gm = operator_matrix(g, dim, cfg)?;
    Ok((0..dim - k).map(|n| rho.get(n, n + k) * gm[(n + k, n)]).sum())
}
