//! Python bindings: density matrices, Dawson and pattern functions, quadrature
//! densities and sampling, reconstruction, phase-space surfaces and the
//! verification suites.

use std::str::FromStr;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use quadtomo::fock::HermiteTable;
use quadtomo::phase_space::{self, PhaseSpaceGrid};
use quadtomo::sim::{self, StateKind, StateSpec};
use quadtomo::tomography::{self, AngleGrid, QuadratureData};
use quadtomo::{special, Complex64, FockConfig};

create_exception!(quadtomo_py, ValidationError, PyValueError);
create_exception!(quadtomo_py, CertificationError, PyRuntimeError);

fn to_py(err: quadtomo::Error) -> PyErr {
    if err.is_numerical() {
        CertificationError::new_err(format!("{}: {err}", err.kind()))
    } else {
        ValidationError::new_err(format!("{}: {err}", err.kind()))
    }
}

type Matrix = Vec<Vec<f64>>;

/// Density matrix on a truncated Fock space.
#[pyclass(name = "DensityMatrix", frozen)]
struct PyDensityMatrix {
    inner: quadtomo::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// From row-major real and imaginary parts.
    #[new]
    fn new(re: Matrix, im: Matrix) -> PyResult<Self> {
        let file = quadtomo::fock::DensityMatrixFile { dim: re.len(), re, im };
        let m = file.to_matrix().map_err(to_py)?;
        Ok(Self {
            inner: quadtomo::DensityMatrix::new(m).map_err(to_py)?,
        })
    }

    /// `|n⟩⟨n|` in dimension `dim`.
    #[staticmethod]
    fn fock(n: usize, dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: quadtomo::DensityMatrix::fock(n, dim).map_err(to_py)?,
        })
    }

    /// Canonical states: `vacuum`, `number:N`, `coherent:RE[,IM]`, `thermal:MEAN`,
    /// `cat:RE[,IM]`, `random:RANK[,SEED]`. `projected` renormalizes the truncation.
    #[staticmethod]
    #[pyo3(signature = (spec, dim, projected = false))]
    fn state(spec: &str, dim: usize, projected: bool) -> PyResult<Self> {
        let kind = StateKind::from_str(spec).map_err(to_py)?;
        let spec = StateSpec::new(kind, dim);
        let inner = if projected {
            sim::make_state_projected(&spec)
        } else {
            sim::make_state(&spec)
        }
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: quadtomo::DensityMatrix::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    /// `(re, im)` as nested lists.
    fn to_lists(&self) -> (Matrix, Matrix) {
        let f = self.inner.to_file_format();
        (f.re, f.im)
    }

    fn entry(&self, m: usize, n: usize) -> PyResult<(f64, f64)> {
        if m >= self.inner.dim() || n >= self.inner.dim() {
            return Err(ValidationError::new_err("index out of range"));
        }
        let z: Complex64 = self.inner.get(m, n);
        Ok((z.re, z.im))
    }

    fn fidelity(&self, other: &PyDensityMatrix) -> f64 {
        self.inner.fidelity(&other.inner)
    }

    fn trace_distance(&self, other: &PyDensityMatrix) -> f64 {
        self.inner.trace_distance(&other.inner)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={}, purity={:.6})", self.inner.dim(), self.inner.purity())
    }
}

/// Outcome of a reconstruction.
#[pyclass(name = "Reconstruction", frozen)]
struct PyReconstruction {
    inner: tomography::ReconstructionResult,
}

#[pymethods]
impl PyReconstruction {
    /// Hermitized, eigenvalue-clipped estimate.
    #[getter]
    fn rho_phys(&self) -> PyDensityMatrix {
        PyDensityMatrix {
            inner: self.inner.rho_phys.clone(),
        }
    }

    /// Raw solution `(re, im)` of the triangular systems.
    #[getter]
    fn rho_hat(&self) -> (Matrix, Matrix) {
        let f = quadtomo::fock::DensityMatrixFile::from_matrix(&self.inner.rho_hat);
        (f.re, f.im)
    }

    #[getter]
    fn min_eigenvalue_hat(&self) -> f64 {
        self.inner.diagnostics.min_eigenvalue_hat
    }

    /// Full result, diagnostics included, as JSON.
    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }
}

#[pyfunction]
fn dawson(x: f64) -> f64 {
    special::dawson(x)
}

/// `k`-th derivative of Dawson's integral, `k ≤ 47`.
#[pyfunction]
fn dawson_derivative(k: usize, x: f64) -> PyResult<f64> {
    special::DawsonEvaluator::default().derivative(k, x).map_err(to_py)
}

/// `f^(m)(x) = 2·daw^(m+1)(x)`.
#[pyfunction]
fn pattern_function(m: usize, x: f64) -> PyResult<f64> {
    special::pattern_function(m, x).map_err(to_py)
}

#[pyfunction]
fn hermite_function(n: usize, x: f64) -> f64 {
    quadtomo::hermite_function(n, x)
}

/// Quadrature density of `rho` at angle `theta` on the points `xs`.
#[pyfunction]
fn quadrature_pdf(rho: &PyDensityMatrix, theta: f64, xs: Vec<f64>) -> PyResult<Vec<f64>> {
    let table = HermiteTable::new(rho.inner.dim() - 1, &xs);
    Ok(quadtomo::quadrature_pdf(&rho.inner, theta, &table).map_err(to_py)?.p)
}

/// Seeded samples, one list per angle; angle `j` uses substream `j`.
#[pyfunction]
fn sample_quadratures(rho: &PyDensityMatrix, thetas: Vec<f64>, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let cfg = FockConfig::new(rho.inner.dim()).map_err(to_py)?;
    let batches = sim::sample_angles(&rho.inner, &thetas, count, seed, &cfg).map_err(to_py)?;
    Ok(batches.into_iter().map(|b| b.values).collect())
}

/// `J` uniformly spaced angles `2πj/J`.
#[pyfunction]
#[pyo3(signature = (dim, count = None))]
fn uniform_angles(dim: usize, count: Option<usize>) -> PyResult<Vec<f64>> {
    let n = count.unwrap_or_else(|| AngleGrid::required_len(dim, dim.saturating_sub(1)));
    Ok(AngleGrid::uniform(n).map_err(to_py)?.angles().to_vec())
}

/// Reconstruction from the exact quadrature densities of `rho` on the smallest exact grid.
#[pyfunction]
fn reconstruct_exact(rho: &PyDensityMatrix) -> PyResult<PyReconstruction> {
    let dim = rho.inner.dim();
    let cfg = FockConfig::new(dim).map_err(to_py)?;
    let grid = AngleGrid::uniform(AngleGrid::required_len(dim, dim - 1)).map_err(to_py)?;
    let dists = sim::exact_distributions(&rho.inner, grid.angles(), &cfg).map_err(to_py)?;
    let inner = tomography::reconstruct(&QuadratureData::Exact(dists), dim, &cfg).map_err(to_py)?;
    Ok(PyReconstruction { inner })
}

/// Reconstruction from per-angle sample lists.
#[pyfunction]
#[pyo3(signature = (thetas, samples, dim, seed = 0))]
fn reconstruct_samples(thetas: Vec<f64>, samples: Vec<Vec<f64>>, dim: usize, seed: u64) -> PyResult<PyReconstruction> {
    if thetas.len() != samples.len() {
        return Err(ValidationError::new_err("one sample list per angle is required"));
    }
    let batches = thetas
        .into_iter()
        .zip(samples)
        .enumerate()
        .map(|(j, (theta, values))| sim::SampleBatch {
            theta: quadtomo::fock::reduce_angle(theta),
            values,
            seed,
            stream: j as u64,
            rng: sim::RNG_NAME.to_string(),
            warnings: Vec::new(),
        })
        .collect();
    let cfg = FockConfig::new(dim).map_err(to_py)?;
    let inner = tomography::reconstruct(&QuadratureData::Samples(batches), dim, &cfg).map_err(to_py)?;
    Ok(PyReconstruction { inner })
}

fn grid(q: Vec<f64>, p: Vec<f64>) -> PyResult<PhaseSpaceGrid> {
    PhaseSpaceGrid::new(q, p).map_err(to_py)
}

fn rows(g: &PhaseSpaceGrid) -> Matrix {
    (0..g.q.len()).map(|i| g.values.row(i).iter().copied().collect()).collect()
}

/// Wigner function on the grid `q × p`; `values[i][j]` sits at `(q[i], p[j])`.
#[pyfunction]
fn wigner(rho: &PyDensityMatrix, q: Vec<f64>, p: Vec<f64>) -> PyResult<Matrix> {
    Ok(rows(&phase_space::wigner_direct(&rho.inner, &grid(q, p)?)))
}

/// Husimi function `⟨z|ρ|z⟩/π`, `z = (q + ip)/√2`.
#[pyfunction]
fn husimi(rho: &PyDensityMatrix, q: Vec<f64>, p: Vec<f64>) -> PyResult<Matrix> {
    Ok(rows(&phase_space::husimi(&rho.inner, &grid(q, p)?)))
}

/// Filtered back-projection from exact projections of `rho`; returns `(axis, values)`.
#[pyfunction]
#[pyo3(signature = (rho, angles = 64, bins = 256, half_width = 6.0, grid_points = 129, filter = "shepp-logan"))]
fn wigner_back_projection(
    rho: &PyDensityMatrix,
    angles: usize,
    bins: usize,
    half_width: f64,
    grid_points: usize,
    filter: &str,
) -> PyResult<(Vec<f64>, Matrix)> {
    let cfg = phase_space::RadonConfig {
        grid_points,
        ..phase_space::RadonConfig::new(angles, bins, half_width)
            .with_filter(phase_space::RadonFilter::from_str(filter).map_err(to_py)?)
    };
    let dists = phase_space::radon_projections(&rho.inner, &cfg).map_err(to_py)?;
    let g = phase_space::wigner_inverse_radon(&dists, &cfg).map_err(to_py)?;
    Ok((g.q.clone(), rows(&g)))
}

/// Runs the verification suites and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (dual_states = 50))]
fn verify_suites(dual_states: usize) -> PyResult<String> {
    let cfg = quadtomo::verify::VerifyConfig {
        dual_states,
        ..Default::default()
    };
    quadtomo::verify::run_all(&cfg).to_json().map_err(to_py)
}

#[pymodule]
pub fn quadtomo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyReconstruction>()?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("CertificationError", m.py().get_type::<CertificationError>())?;
    m.add_function(wrap_pyfunction!(dawson, m)?)?;
    m.add_function(wrap_pyfunction!(dawson_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(pattern_function, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_function, m)?)?;
    m.add_function(wrap_pyfunction!(quadrature_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(sample_quadratures, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_angles, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_exact, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_samples, m)?)?;
    m.add_function(wrap_pyfunction!(wigner, m)?)?;
    m.add_function(wrap_pyfunction!(husimi, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_back_projection, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suites, m)?)?;
    Ok(())
}
