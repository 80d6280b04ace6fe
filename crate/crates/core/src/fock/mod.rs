//! Truncated Fock-space linear algebra.

mod density;
mod gauss_hermite;
mod hermite;

use std::f64::consts::{SQRT_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{DensityMatrix, DensityMatrixFile, LadderOperators, EIGEN_TOL, HERMITIAN_TOL, TRACE_TOL};
pub use gauss_hermite::GaussHermite;
pub use hermite::{hermite_function, hermite_functions, hermite_polynomials, HermiteTable};

use crate::error::{Error, Result, Warning};

/// Default Gauss–Hermite order for matrix-element integrals.
pub const DEFAULT_GH_ORDER: usize = 256;
/// Default certification threshold for the order-doubling check.
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
/// Population on the top two levels above which densities are flagged.
pub const EDGE_WARN: f64 = 1e-6;

/// Truncation and discretization parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    pub dim: usize,
    pub x_grid: Vec<f64>,
    pub gh_order: usize,
    /// Largest change tolerated when the Gauss–Hermite order is doubled.
    pub quad_tol: f64,
}

impl FockConfig {
    /// Default discretization: grid spacing 0.05 over `±(√(2·dim) + 6)`,
    /// Gauss–Hermite order `max(256, 2·dim)`.
    pub fn new(dim: usize) -> Result<Self> {
        let half = Self::min_half_width(dim) + 3.0;
        Self::from_parts(dim, symmetric_grid(half, 0.05), DEFAULT_GH_ORDER.max(2 * dim))
    }

    pub fn from_parts(dim: usize, x_grid: Vec<f64>, gh_order: usize) -> Result<Self> {
        let cfg = Self {
            dim,
            x_grid,
            gh_order,
            quad_tol: DEFAULT_QUAD_TOL,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_gh_order(mut self, gh_order: usize) -> Result<Self> {
        self.gh_order = gh_order;
        self.validate()?;
        Ok(self)
    }

    pub fn with_grid(mut self, half_width: f64, spacing: f64) -> Result<Self> {
        self.x_grid = symmetric_grid(half_width, spacing);
        self.validate()?;
        Ok(self)
    }

    /// Classical turning point `√(2·dim)` plus a margin of 3.
    pub fn min_half_width(dim: usize) -> f64 {
        (2.0 * dim as f64).sqrt() + 3.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be at least 1".into()));
        }
        if self.gh_order < 2 * self.dim {
            return Err(Error::InvalidConfig(format!(
                "gh_order {} must be at least 2·dim = {}",
                self.gh_order,
                2 * self.dim
            )));
        }
        let x = &self.x_grid;
        if x.len() < 3 || x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("x_grid must be strictly increasing".into()));
        }
        let scale = x[x.len() - 1].abs().max(1.0);
        if x.iter().zip(x.iter().rev()).any(|(a, b)| (a + b).abs() > 1e-12 * scale) {
            return Err(Error::InvalidConfig("x_grid must be symmetric about 0".into()));
        }
        let need = Self::min_half_width(self.dim);
        if x[x.len() - 1] < need - 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "x_grid reaches {:.3}, dim {} needs at least ±{need:.3}",
                x[x.len() - 1],
                self.dim
            )));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::InvalidConfig("quad_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn hermite_table(&self) -> HermiteTable {
        HermiteTable::new(self.dim.saturating_sub(1), &self.x_grid)
    }
}

/// Uniform grid on `[−half, half]` with spacing at most `spacing`, symmetric by construction.
pub fn symmetric_grid(half_width: f64, spacing: f64) -> Vec<f64> {
    let steps = (half_width / spacing).ceil().max(1.0) as usize;
    let h = half_width / steps as f64;
    (0..=2 * steps)
        .map(|i| {
            let k = i as isize - steps as isize;
            k as f64 * h
        })
        .collect()
}

/// Composite trapezoid rule on an arbitrary increasing grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Angle reduced to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Exact density of `Q_θ` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDistribution {
    /// Angle in `[0, 2π)`.
    pub theta: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// Largest imaginary part left over from the double sum.
    pub imaginary_residue: f64,
    pub warnings: Vec<Warning>,
}

/// `{"theta": t, "x": [...], "p": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDensityFile {
    pub theta: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl QuadratureDistribution {
    pub fn from_values(theta: f64, x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() || x.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "density needs matching x/p arrays of length ≥ 2 (got {} and {})",
                x.len(),
                p.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("density grid must be strictly increasing".into()));
        }
        Ok(Self {
            theta: reduce_angle(theta),
            x,
            p,
            imaginary_residue: 0.0,
            warnings: Vec::new(),
        })
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.x, &self.p)
    }

    /// `∫ p(x) g(x) dx` by the trapezoid rule, `g` given on the same grid.
    pub fn expectation_on_grid(&self, g: &[f64]) -> f64 {
        debug_assert_eq!(g.len(), self.x.len());
        let y: Vec<f64> = self.p.iter().zip(g).map(|(p, g)| p * g).collect();
        trapezoid(&self.x, &y)
    }

    pub fn to_file(&self) -> ExactDensityFile {
        ExactDensityFile {
            theta: self.theta,
            x: self.x.clone(),
            p: self.p.clone(),
        }
    }

    pub fn from_file(file: ExactDensityFile) -> Result<Self> {
        Self::from_values(file.theta, file.x, file.p)
    }
}

/// `p_θ(x) = Σ_{m,n} ρ[m][n] e^{−iθ(m−n)} h_m(x) h_n(x)` on the table's grid.
pub fn quadrature_pdf(
    rho: &DensityMatrix,
    theta: f64,
    table: &HermiteTable,
) -> Result<QuadratureDistribution> {
    let dim = rho.dim();
    if table.order() + 1 < dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: table.order() + 1,
        });
    }
    if !theta.is_finite() {
        return Err(Error::InvalidConfig("theta must be finite".into()));
    }
    let theta = reduce_angle(theta);
    let rotated = DMatrix::from_fn(dim, dim, |m, n| {
        rho.get(m, n) * Complex64::from_polar(1.0, -theta * (m as f64 - n as f64))
    });

    let mut p = Vec::with_capacity(table.len());
    let mut residue = 0.0f64;
    let mut h = vec![0.0; dim];
    for i in 0..table.len() {
        for (n, hn) in h.iter_mut().enumerate() {
            *hn = table.function(n)[i];
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for n in 0..dim {
                row += rotated[(m, n)] * h[n];
            }
            acc += row * h[m];
        }
        residue = residue.max(acc.im.abs());
        p.push(acc.re);
    }

    let mut warnings = Vec::new();
    let mass = rho.edge_mass();
    if mass > EDGE_WARN {
        warnings.push(Warning::Truncation { mass });
    }
    Ok(QuadratureDistribution {
        theta,
        x: table.x().to_vec(),
        p,
        imaginary_residue: residue,
        warnings,
    })
}

fn gh_operator_matrix(g: &dyn Fn(f64) -> f64, size: usize, rule: &GaussHermite) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(size, size);
    if size == 0 {
        return out;
    }
    for (&t, &lambda) in rule.nodes().iter().zip(rule.lambdas()) {
        let gt = g(t);
        if gt == 0.0 {
            continue;
        }
        let h = hermite_functions(size - 1, t);
        let s = lambda * gt;
        for m in 0..size {
            let hm = s * h[m];
            for n in 0..=m {
                out[(m, n)] += hm * h[n];
            }
        }
    }
    for m in 0..size {
        for n in 0..m {
            out[(n, m)] = out[(m, n)];
        }
    }
    out
}

/// `⟨m|g(Q)|n⟩` for all `m, n < size` by Gauss–Hermite quadrature at
/// `cfg.gh_order`, certified by recomputing at twice the order.
pub fn operator_matrix(
    g: impl Fn(f64) -> f64,
    size: usize,
    cfg: &FockConfig,
) -> Result<DMatrix<f64>> {
    let base = gh_operator_matrix(&g, size, &GaussHermite::cached(cfg.gh_order));
    let refined = gh_operator_matrix(&g, size, &GaussHermite::cached(2 * cfg.gh_order));
    let change = (&base - &refined).amax();
    if !(change <= cfg.quad_tol) {
        return Err(Error::InsufficientQuadrature {
            order: cfg.gh_order,
            change,
        });
    }
    Ok(base)
}

/// Single matrix element `⟨m|g(Q)|n⟩ = ∫ h_m g h_n dx`.
pub fn matrix_element(
    g: impl Fn(f64) -> f64,
    m: usize,
    n: usize,
    cfg: &FockConfig,
) -> Result<f64> {
    let size = m.max(n) + 1;
    let eval = |order: usize| -> f64 {
        let rule = GaussHermite::cached(order);
        rule.nodes()
            .iter()
            .zip(rule.lambdas())
            .map(|(&t, &lambda)| {
                let h = hermite_functions(size - 1, t);
                lambda * h[m] * h[n] * g(t)
            })
            .sum()
    };
    let base = eval(cfg.gh_order);
    let change = (base - eval(2 * cfg.gh_order)).abs();
    if !(change <= cfg.quad_tol) {
        return Err(Error::InsufficientQuadrature {
            order: cfg.gh_order,
            change,
        });
    }
    Ok(base)
}

/// Which of the two elementary commutation relations to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorRelation {
    /// `(g(Q)a† − a†g(Q))φ = g′(Q)φ/√2`.
    Raising,
    /// `(g(Q)a − a g(Q))φ = −g′(Q)φ/√2`.
    Lowering,
}

/// Norm of the defect in the commutation relation between `g(Q)` and a ladder
/// operator, evaluated with truncated matrices on a state supported below `dim/2`.
pub fn commutator_residual(
    g: impl Fn(f64) -> f64,
    g_prime: impl Fn(f64) -> f64,
    phi: &[Complex64],
    cfg: &FockConfig,
    relation: CommutatorRelation,
) -> Result<f64> {
    let dim = cfg.dim;
    if phi.len() > dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: phi.len(),
        });
    }
    let support = dim.div_ceil(2);
    if phi.iter().enumerate().any(|(i, z)| i >= support && z.norm() != 0.0) {
        return Err(Error::InvalidConfig(format!(
            "φ must be supported on indices below dim/2 = {support}"
        )));
    }
    let norm: f64 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!("φ must be normalized (‖φ‖ = {norm})")));
    }

    let to_c = |m: DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
    let gm = to_c(operator_matrix(&g, dim, cfg)?);
    let gpm = to_c(operator_matrix(&g_prime, dim, cfg)?);
    let ops = LadderOperators::new(dim);
    let mut v = nalgebra::DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for (i, z) in phi.iter().enumerate() {
        v[i] = *z;
    }
    let (ladder, sign) = match relation {
        CommutatorRelation::Raising => (to_c(ops.a_dagger), 1.0),
        CommutatorRelation::Lowering => (to_c(ops.a), -1.0),
    };
    let lhs = &gm * (&ladder * &v) - &ladder * (&gm * &v);
    let rhs = (&gpm * &v).scale(sign / SQRT_2);
    Ok((lhs - rhs).norm())
}
