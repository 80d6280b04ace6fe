//! Phase-space views of a state: Wigner function (directly and by filtered
//! back-projection of quadrature densities), Husimi function and the
//! characteristic-function zero scan.
//!
//! Conventions: `z = (q + ip)/√2`, the Wigner function's marginal along
//! `x = q cosθ + p sinθ` is the quadrature density at angle `θ`, and the
//! Husimi function `⟨z|ρ|z⟩/π` is a density with respect to `d²z = dq dp/2`.

mod grid;
mod radon;

use std::f64::consts::{FRAC_1_PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

pub use grid::PhaseSpaceGrid;
pub use radon::{radon_projections, wigner_inverse_radon, RadonConfig, RadonFilter};

use crate::error::Warning;
use crate::fock::{DensityMatrix, EDGE_WARN};
use crate::special::ln_factorial;

const SUPPORT_WARN: f64 = 1e-6;

/// `L_n^{(α)}(x)` for `n = 0..=n_max`.
fn laguerre(n_max: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(1.0 + alpha - x);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

fn sqrt_factorial_ratio(n: usize, m: usize) -> f64 {
    (0.5 * (ln_factorial(n) - ln_factorial(m))).exp()
}

/// `W_ρ(q, p)` from the Fock-basis Laguerre kernel.
pub fn wigner_point(rho: &DensityMatrix, q: f64, p: f64) -> f64 {
    let dim = rho.dim();
    let r2 = q * q + p * p;
    let gauss = (-r2).exp();
    let w = Complex64::new(SQRT_2 * q, -SQRT_2 * p);
    let mut total = 0.0;
    let mut wd = Complex64::new(1.0, 0.0);
    for d in 0..dim {
        let lag = laguerre(dim - 1 - d, d as f64, 2.0 * r2);
        for n in 0..dim - d {
            let m = n + d;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let kernel = wd * (sign * FRAC_1_PI * sqrt_factorial_ratio(n, m) * gauss * lag[n]);
            if d == 0 {
                total += rho.get(n, n).re * kernel.re;
            } else {
                // ρ[m][n]·K + ρ[n][m]·conj(K) = 2 Re(ρ[m][n]·K)
                total += 2.0 * (rho.get(m, n) * kernel).re;
            }
        }
        wd *= w;
    }
    total
}

/// Wigner function on `grid`; warns when the boundary carries more than `1e−6`.
pub fn wigner_direct(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> PhaseSpaceGrid {
    let mut out = grid.blank_like();
    for (i, &q) in grid.q.iter().enumerate() {
        for (j, &p) in grid.p.iter().enumerate() {
            out.values[(i, j)] = wigner_point(rho, q, p);
        }
    }
    let boundary_max = out.boundary_max();
    if out.q.len() > 2 && boundary_max > SUPPORT_WARN {
        out.warnings.push(Warning::Support { boundary_max });
    }
    out
}

fn coherent_overlaps(dim: usize, z: Complex64) -> Vec<Complex64> {
    let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    let mut out = Vec::with_capacity(dim);
    for n in 0..dim {
        if n > 0 {
            c = c * z / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

/// `⟨z|ρ|z⟩/π` with `z = (q + ip)/√2`; the returned grid integrates in `d²z`.
pub fn husimi(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> PhaseSpaceGrid {
    let dim = rho.dim();
    let mut out = grid.blank_like();
    out.measure = 0.5;
    for (i, &q) in grid.q.iter().enumerate() {
        for (j, &p) in grid.p.iter().enumerate() {
            let c = coherent_overlaps(dim, Complex64::new(q, p) / SQRT_2);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..dim {
                let row: Complex64 = (0..dim).map(|n| rho.get(m, n) * c[n]).sum();
                acc += c[m].conj() * row;
            }
            out.values[(i, j)] = acc.re * FRAC_1_PI;
        }
    }
    let mass = rho.edge_mass();
    if mass > EDGE_WARN {
        out.warnings.push(Warning::Truncation { mass });
    }
    out
}

/// Convolves a Wigner surface with the Gaussian `e^{−(u²+v²)}/π` (variance ½ per
/// axis) and doubles it, which yields the Husimi surface in the `d²z` measure.
pub fn smooth_to_husimi(wigner: &PhaseSpaceGrid) -> PhaseSpaceGrid {
    let axis_pass = |axis: &[f64]| -> nalgebra::DMatrix<f64> {
        let n = axis.len();
        let h = if n > 1 { axis[1] - axis[0] } else { 1.0 };
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let d = axis[i] - axis[j];
            let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
            w * h * (-d * d).exp() / std::f64::consts::PI.sqrt()
        })
    };
    let kq = axis_pass(&wigner.q);
    let kp = axis_pass(&wigner.p);
    let mut out = wigner.blank_like();
    out.values = &kq * &wigner.values * kp.transpose() * 2.0;
    out.measure = 0.5;
    out
}

/// `tr[D(α)·ρ]` with `α = (q + ip)/√2`, from Laguerre-form displacement elements.
pub fn characteristic_point(rho: &DensityMatrix, q: f64, p: f64) -> Complex64 {
    let dim = rho.dim();
    let alpha = Complex64::new(q, p) / SQRT_2;
    let a2 = alpha.norm_sqr();
    let gauss = (-0.5 * a2).exp();
    let mut total = Complex64::new(0.0, 0.0);
    let mut ad = Complex64::new(1.0, 0.0);
    let mut nad = Complex64::new(1.0, 0.0);
    for d in 0..dim {
        let lag = laguerre(dim - 1 - d, d as f64, a2);
        for n in 0..dim - d {
            let m = n + d;
            let scale = sqrt_factorial_ratio(n, m) * gauss * lag[n];
            // ⟨m|D|n⟩ = √(n!/m!) α^d e^{−|α|²/2} L_n^{(d)}(|α|²); ⟨n|D|m⟩ uses (−α*)^d
            let lower = ad * scale;
            total += rho.get(n, m) * lower;
            if d > 0 {
                total += rho.get(m, n) * nad * scale;
            }
        }
        ad *= alpha;
        nad *= -alpha.conj();
    }
    total
}

/// Outcome of scanning `|tr[W_{qp} D]|` over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylReport {
    pub threshold: f64,
    /// Fraction of grid points with `|tr[W_{qp} D]| < threshold`.
    pub fraction_below: f64,
    /// Set when `fraction_below` exceeds `1e−3`.
    pub suspect: bool,
    /// Grid cells whose corners bracket a zero of both real and imaginary parts.
    pub nodal_cells: usize,
    pub zero_set_detected: bool,
    pub min_magnitude: f64,
    pub points: usize,
    pub note: &'static str,
}

/// Grid scan for zeros of the characteristic function of `d`; a finite grid
/// witnesses zeros but cannot establish their measure.
pub fn weyl_condition_scan(d: &DensityMatrix, grid: &PhaseSpaceGrid) -> (WeylReport, PhaseSpaceGrid) {
    let threshold = 1e-10;
    let (nq, np) = grid.shape();
    let mut values = vec![Complex64::new(0.0, 0.0); nq * np];
    let mut magnitude = grid.blank_like();
    for (i, &q) in grid.q.iter().enumerate() {
        for (j, &p) in grid.p.iter().enumerate() {
            let v = characteristic_point(d, q, p);
            values[i * np + j] = v;
            magnitude.values[(i, j)] = v.norm();
        }
    }
    let below = magnitude.values.iter().filter(|&&m| m < threshold).count();
    let points = nq * np;
    let fraction_below = below as f64 / points as f64;

    // a component changes sign across the cell, or vanishes identically on it
    let brackets = |vals: [f64; 4]| -> bool {
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = 1e-14 * scale.max(1e-300);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo <= 0.0 && hi >= 0.0) || vals.iter().all(|v| v.abs() <= tiny)
    };
    let mut nodal_cells = 0;
    for i in 0..nq.saturating_sub(1) {
        for j in 0..np.saturating_sub(1) {
            let c = [
                values[i * np + j],
                values[(i + 1) * np + j],
                values[i * np + j + 1],
                values[(i + 1) * np + j + 1],
            ];
            let scale = c.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let im_zero = c.iter().all(|v| v.im.abs() <= 1e-13 * scale.max(1e-300));
            let re_zero = c.iter().all(|v| v.re.abs() <= 1e-13 * scale.max(1e-300));
            let re = brackets([c[0].re, c[1].re, c[2].re, c[3].re]) || re_zero;
            let im = brackets([c[0].im, c[1].im, c[2].im, c[3].im]) || im_zero;
            if re && im && !(re_zero && im_zero) {
                nodal_cells += 1;
            }
        }
    }
    let min_magnitude = magnitude.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let report = WeylReport {
        threshold,
        fraction_below,
        suspect: fraction_below > 1e-3,
        nodal_cells,
        zero_set_detected: nodal_cells > 0 || below > 0,
        min_magnitude,
        points,
        note: "grid witness only; a zero set of measure zero does not affect completeness",
    };
    (report, magnitude)
}

#[cfg(test)]
mod tests;
