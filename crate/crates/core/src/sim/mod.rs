//! Synthetic measurement data: canonical states, seeded quadrature sampling
//! and first-moment tables.

mod sampling;
mod states;

use serde::Serialize;

pub use sampling::{
    sample_angles, sample_quadrature, BatchMetadata, QuadratureSampler, SampleBatch, CDF_POINTS,
    RNG_NAME,
};
pub use states::{make_state, make_state_projected, StateKind, StateSpec, TRUNCATED_TRACE_TOL};

use crate::error::Result;
use crate::fock::{quadrature_pdf, DensityMatrix, FockConfig, LadderOperators, QuadratureDistribution};
use crate::tomography::AngleGrid;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationRow {
    pub state: String,
    pub theta: f64,
    pub mean: f64,
}

/// `tr[ρ Q_θ]` for every state and angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationTable {
    pub rows: Vec<ExpectationRow>,
}

impl ExpectationTable {
    pub fn max_abs(&self) -> f64 {
        self.rows.iter().map(|r| r.mean.abs()).fold(0.0, f64::max)
    }
}

pub fn expectation_report(states: &[StateSpec], angles: &AngleGrid) -> Result<ExpectationTable> {
    let mut rows = Vec::with_capacity(states.len() * angles.len());
    for spec in states {
        let rho = make_state(spec)?;
        let ops = LadderOperators::new(spec.dim);
        for &theta in angles.angles() {
            let q = ops.quadrature(theta);
            let mean = (rho.entries() * q).trace().re;
            rows.push(ExpectationRow {
                state: spec.label(),
                theta,
                mean,
            });
        }
    }
    Ok(ExpectationTable { rows })
}

/// Exact quadrature densities of `rho` on the configuration's grid, one per angle.
pub fn exact_distributions(
    rho: &DensityMatrix,
    angles: &[f64],
    cfg: &FockConfig,
) -> Result<Vec<QuadratureDistribution>> {
    let table = crate::fock::HermiteTable::new(rho.dim() - 1, &cfg.x_grid);
    angles.iter().map(|&t| quadrature_pdf(rho, t, &table)).collect()
}
