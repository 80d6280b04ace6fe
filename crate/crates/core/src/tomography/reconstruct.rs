use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{weighted_coefficient, AngleGrid, GridCertificate};
use super::system::{build_pattern_system, PatternSystem};
use crate::error::{Error, Result, Warning};
use crate::fock::{trapezoid, DensityMatrix, DensityMatrixFile, FockConfig, QuadratureDistribution};
use crate::linalg::{self, CMatrix};
use crate::sim::SampleBatch;
use crate::special::{DawsonEvaluator, PatternTable};

/// Batches smaller than this raise an insufficient-samples warning.
pub const MIN_SAMPLES: usize = 1000;

const TABLE_STEP: f64 = 1.0 / 128.0;

/// Per-angle input to a reconstruction.
#[derive(Debug, Clone)]
pub enum QuadratureData {
    Exact(Vec<QuadratureDistribution>),
    Samples(Vec<SampleBatch>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataMode {
    Exact,
    Samples,
}

impl QuadratureData {
    pub fn mode(&self) -> DataMode {
        match self {
            QuadratureData::Exact(_) => DataMode::Exact,
            QuadratureData::Samples(_) => DataMode::Samples,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            QuadratureData::Exact(d) => d.len(),
            QuadratureData::Samples(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angles(&self) -> Vec<f64> {
        match self {
            QuadratureData::Exact(d) => d.iter().map(|d| d.theta).collect(),
            QuadratureData::Samples(b) => b.iter().map(|b| b.theta).collect(),
        }
    }

    fn sort_by_angle(&mut self) {
        match self {
            QuadratureData::Exact(d) => d.sort_by(|a, b| a.theta.total_cmp(&b.theta)),
            QuadratureData::Samples(b) => b.sort_by(|a, b| a.theta.total_cmp(&b.theta)),
        }
    }
}

/// `E_θ[f^(j)]` for `j = 0..=j_max` by the trapezoid rule on the density's grid.
pub fn exact_expectations(dist: &QuadratureDistribution, j_max: usize) -> Result<Vec<f64>> {
    let eval = DawsonEvaluator::default();
    let mut weighted = vec![Vec::with_capacity(dist.x.len()); j_max + 1];
    for (&x, &p) in dist.x.iter().zip(&dist.p) {
        for (j, f) in eval.pattern_values(j_max, x)?.into_iter().enumerate() {
            weighted[j].push(p * f);
        }
    }
    Ok(weighted.iter().map(|y| trapezoid(&dist.x, y)).collect())
}

/// Sample means and variances of `f^(j)` for `j = 0..=j_max`.
pub fn sample_expectations(batch: &SampleBatch, table: &PatternTable) -> (Vec<f64>, Vec<f64>) {
    let width = table.j_max() + 1;
    let mut sum = vec![0.0; width];
    let mut sq = vec![0.0; width];
    let mut buf = vec![0.0; width];
    for &x in &batch.values {
        table.values_into(x, &mut buf);
        for j in 0..width {
            sum[j] += buf[j];
            sq[j] += buf[j] * buf[j];
        }
    }
    let n = batch.count() as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let var = sq
        .iter()
        .zip(&mean)
        .map(|(s, m)| if n > 1.0 { ((s / n - m * m) * n / (n - 1.0)).max(0.0) } else { 0.0 })
        .collect();
    (mean, var)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Solve one row beyond the truncation and report its residual.
    pub extra_row: bool,
    pub min_samples: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            extra_row: true,
            min_samples: MIN_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub l: usize,
    /// Angular coefficient `c_{k,l}`.
    pub coefficient: Complex64,
    pub diagonal: f64,
    pub scaled_row_max: f64,
    /// Approximate standard error of `ρ̂[l][l+k]` (sampled data only).
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub k: usize,
    pub rows: Vec<RowReport>,
    /// `|c − Σ ρ̂ M| / M[l][l]` for the row just past the truncation.
    pub extra_row_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mode: DataMode,
    pub grid: GridCertificate,
    pub angles: Vec<f64>,
    pub sample_counts: Vec<usize>,
    pub systems: Vec<SystemReport>,
    /// `max |ρ̂ − ρ̂†|`.
    pub hermiticity_defect: f64,
    pub trace_hat: f64,
    pub min_eigenvalue_hat: f64,
    /// Total negative eigenvalue weight removed when forming `rho_phys`.
    pub clipped_weight: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Direct solution of the triangular systems.
    pub rho_hat: CMatrix,
    /// Hermitized, eigenvalue-clipped and renormalized `rho_hat`.
    pub rho_phys: DensityMatrix,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize, Deserialize)]
struct ResultFile {
    rho_hat: DensityMatrixFile,
    rho_phys: DensityMatrixFile,
    diagnostics: Diagnostics,
}

impl ReconstructionResult {
    pub fn to_json(&self) -> Result<String> {
        let file = ResultFile {
            rho_hat: DensityMatrixFile::from_matrix(&self.rho_hat),
            rho_phys: self.rho_phys.to_file_format(),
            diagnostics: self.diagnostics.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ResultFile = serde_json::from_str(text)?;
        Ok(Self {
            rho_hat: file.rho_hat.to_matrix()?,
            rho_phys: DensityMatrix::new(file.rho_phys.to_matrix()?)?,
            diagnostics: file.diagnostics,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rho_hat.nrows()
    }
}

/// Reconstruction with default options.
pub fn reconstruct(data: &QuadratureData, dim: usize, cfg: &FockConfig) -> Result<ReconstructionResult> {
    reconstruct_with(data, dim, cfg, &ReconstructOptions::default())
}

pub fn reconstruct_with(
    data: &QuadratureData,
    dim: usize,
    cfg: &FockConfig,
    options: &ReconstructOptions,
) -> Result<ReconstructionResult> {
    if dim == 0 {
        return Err(Error::InvalidConfig("dim must be at least 1".into()));
    }
    if data.is_empty() {
        return Err(Error::InvalidConfig("no quadrature data".into()));
    }
    let mut data = data.clone();
    data.sort_by_angle();
    let grid = AngleGrid::from_angles(data.angles())?;
    let k_max = dim - 1;
    let certificate = grid.certificate(dim, k_max);
    if grid.is_uniform() && !certificate.exact {
        return Err(Error::GridTooCoarse {
            found: certificate.count,
            required: certificate.required,
        });
    }

    let extra = usize::from(options.extra_row);
    // rows l = 0..dim−k (+1), orders k + 2l
    let j_max = 2 * (dim - 1) + 2 * extra;
    let max_order = DawsonEvaluator::default().max_derivative_order - 1;
    if j_max > max_order {
        return Err(Error::DerivativeOrderOverflow {
            requested: j_max,
            max: max_order,
        });
    }

    let mut warnings = Vec::new();
    let (means, variances, counts): (Vec<Vec<f64>>, Option<Vec<Vec<f64>>>, Vec<usize>) = match &data {
        QuadratureData::Exact(dists) => {
            for d in dists {
                warnings.extend(d.warnings.iter().cloned());
            }
            let means = dists
                .par_iter()
                .map(|d| exact_expectations(d, j_max))
                .collect::<Result<Vec<_>>>()?;
            (means, None, vec![])
        }
        QuadratureData::Samples(batches) => {
            let reach = batches
                .iter()
                .flat_map(|b| b.values.iter())
                .fold(cfg.x_grid[cfg.x_grid.len() - 1], |m, v| m.max(v.abs()));
            let table = PatternTable::new(j_max, reach + TABLE_STEP, TABLE_STEP)?;
            let mut counts = Vec::with_capacity(batches.len());
            for b in batches {
                warnings.extend(b.warnings.iter().cloned());
                if b.count() < options.min_samples {
                    warnings.push(Warning::InsufficientSamples {
                        theta: b.theta,
                        count: b.count(),
                    });
                }
                counts.push(b.count());
            }
            let stats: Vec<(Vec<f64>, Vec<f64>)> =
                batches.par_iter().map(|b| sample_expectations(b, &table)).collect();
            let variances = stats
                .iter()
                .zip(&counts)
                .map(|((_, v), &n)| v.iter().map(|v| v / n as f64).collect())
                .collect();
            (stats.into_iter().map(|s| s.0).collect(), Some(variances), counts)
        }
    };

    let weights = grid.weights();
    let mut rho_hat: CMatrix = DMatrix::zeros(dim, dim);
    let mut systems = Vec::with_capacity(dim);
    for k in 0..dim {
        let rows = dim - k;
        let l_max = rows - 1 + extra;
        let system: PatternSystem = build_pattern_system(k, l_max)?;
        let mut c = Vec::with_capacity(l_max + 1);
        let mut c_err = Vec::with_capacity(l_max + 1);
        for l in 0..=l_max {
            let j = k + 2 * l;
            let values: Vec<f64> = means.iter().map(|m| m[j]).collect();
            c.push(weighted_coefficient(k, &grid, &weights, &values));
            if let Some(vars) = &variances {
                let v: f64 = vars.iter().zip(&weights).map(|(v, w)| w * w * v[j]).sum();
                c_err.push(v.sqrt());
            }
        }
        let solution = system.solve(&c)?;
        for l in 0..rows {
            rho_hat[(l, l + k)] = solution[l];
            if k > 0 {
                rho_hat[(l + k, l)] = solution[l].conj();
            }
        }
        let extra_row_residual = (extra == 1).then(|| {
            let l = rows;
            let mut r = c[l];
            for (n, s) in solution.iter().take(rows).enumerate() {
                r -= s * system.matrix[(l, n)];
            }
            r.norm() / system.matrix[(l, l)].abs()
        });
        let std_errors = (!c_err.is_empty()).then(|| system.propagate_errors(&c_err));
        let row_reports = (0..rows)
            .map(|l| RowReport {
                l,
                coefficient: c[l],
                diagonal: system.condition[l].diagonal,
                scaled_row_max: system.condition[l].scaled_row_max,
                std_error: std_errors.as_ref().map(|e| e[l]),
            })
            .collect();
        systems.push(SystemReport {
            k,
            rows: row_reports,
            extra_row_residual,
        });
    }

    let hermiticity_defect = linalg::hermiticity_defect(&rho_hat);
    let herm = linalg::hermitian_part(&rho_hat);
    let (eigenvalues, vectors) = linalg::hermitian_eigen(&herm);
    let min_eigenvalue_hat = eigenvalues.min();
    let clipped_weight: f64 = eigenvalues.iter().filter(|&&e| e < 0.0).map(|e| -e).sum();
    let kept: Vec<f64> = eigenvalues.iter().map(|&e| e.max(0.0)).collect();
    let total: f64 = kept.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Certification(
            "reconstruction has no positive spectrum to project onto".into(),
        ));
    }
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        kept.iter().map(|&e| Complex64::new(e / total, 0.0)),
    ));
    let phys = linalg::hermitian_part(&(&vectors * diag * vectors.adjoint()));
    let rho_phys = DensityMatrix::new(phys)?;

    Ok(ReconstructionResult {
        diagnostics: Diagnostics {
            mode: data.mode(),
            grid: certificate,
            angles: grid.angles().to_vec(),
            sample_counts: counts,
            systems,
            hermiticity_defect,
            trace_hat: rho_hat.trace().re,
            min_eigenvalue_hat,
            clipped_weight,
            warnings,
        },
        rho_hat,
        rho_phys,
    })
}
