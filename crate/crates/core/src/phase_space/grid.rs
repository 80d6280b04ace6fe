use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};

/// Real surface over a rectangular `(q, p)` grid; `values[(i, j)]` sits at `(q_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub values: DMatrix<f64>,
    /// Area element of the surface's reference measure per unit `dq·dp`.
    pub measure: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    q: Vec<f64>,
    p: Vec<f64>,
    values: Vec<Vec<f64>>,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidConfig(format!("{name} axis is empty")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig(format!("{name} axis must be strictly increasing")));
    }
    if axis.len() > 2 {
        let h = axis[1] - axis[0];
        if axis.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
            return Err(Error::InvalidConfig(format!("{name} axis must be uniform")));
        }
    }
    Ok(())
}

impl PhaseSpaceGrid {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        check_axis("q", &q)?;
        check_axis("p", &p)?;
        let values = DMatrix::zeros(q.len(), p.len());
        Ok(Self {
            q,
            p,
            values,
            measure: 1.0,
            warnings: Vec::new(),
        })
    }

    /// `n × n` points on `[−half_width, half_width]²`.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        if n < 2 || !(half_width > 0.0) {
            return Err(Error::InvalidConfig("square grid needs n ≥ 2 and half_width > 0".into()));
        }
        let axis: Vec<f64> = (0..n)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
            .collect();
        Self::new(axis.clone(), axis)
    }

    /// Same axes, zero values.
    pub fn blank_like(&self) -> Self {
        Self {
            q: self.q.clone(),
            p: self.p.clone(),
            values: DMatrix::zeros(self.q.len(), self.p.len()),
            measure: 1.0,
            warnings: Vec::new(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.q.len(), self.p.len())
    }

    fn step(axis: &[f64]) -> f64 {
        if axis.len() > 1 {
            axis[1] - axis[0]
        } else {
            0.0
        }
    }

    /// Two-dimensional trapezoid integral in the surface's reference measure.
    pub fn integral(&self) -> f64 {
        let (nq, np) = self.shape();
        let wq = |i: usize| if i == 0 || i + 1 == nq { 0.5 } else { 1.0 };
        let wp = |j: usize| if j == 0 || j + 1 == np { 0.5 } else { 1.0 };
        let mut acc = 0.0;
        for i in 0..nq {
            for j in 0..np {
                acc += wq(i) * wp(j) * self.values[(i, j)];
            }
        }
        acc * Self::step(&self.q) * Self::step(&self.p) * self.measure
    }

    pub fn max_abs_diff(&self, other: &PhaseSpaceGrid) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.q.len() * self.p.len(),
                found: other.q.len() * other.p.len(),
            });
        }
        Ok((&self.values - &other.values).amax())
    }

    /// Largest `|value|` on the outer ring of grid points.
    pub fn boundary_max(&self) -> f64 {
        let (nq, np) = self.shape();
        let mut m: f64 = 0.0;
        for i in 0..nq {
            for j in 0..np {
                if i == 0 || j == 0 || i + 1 == nq || j + 1 == np {
                    m = m.max(self.values[(i, j)].abs());
                }
            }
        }
        m
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, q: f64, p: f64) -> f64 {
        let (nq, np) = self.shape();
        if nq < 2 || np < 2 {
            return 0.0;
        }
        let (hq, hp) = (Self::step(&self.q), Self::step(&self.p));
        let u = (q - self.q[0]) / hq;
        let v = (p - self.p[0]) / hp;
        if u < 0.0 || v < 0.0 || u > (nq - 1) as f64 || v > (np - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(nq - 2);
        let j = (v.floor() as usize).min(np - 2);
        let (s, t) = (u - i as f64, v - j as f64);
        let z = &self.values;
        (1.0 - s) * (1.0 - t) * z[(i, j)]
            + s * (1.0 - t) * z[(i + 1, j)]
            + (1.0 - s) * t * z[(i, j + 1)]
            + s * t * z[(i + 1, j + 1)]
    }

    /// Line integrals `∫ W(x cosθ − y sinθ, x sinθ + y cosθ) dy` through the
    /// interpolated surface.
    pub fn project(&self, theta: f64, xs: &[f64]) -> Vec<f64> {
        let h = Self::step(&self.q).min(Self::step(&self.p));
        let reach = self
            .q
            .iter()
            .chain(&self.p)
            .fold(0.0f64, |m, v| m.max(v.abs()))
            * std::f64::consts::SQRT_2;
        let steps = (reach / h).ceil() as i64;
        let (c, s) = (theta.cos(), theta.sin());
        xs.iter()
            .map(|&x| {
                (-steps..=steps)
                    .map(|k| {
                        let y = k as f64 * h;
                        self.interpolate(x * c - y * s, x * s + y * c)
                    })
                    .sum::<f64>()
                    * h
            })
            .collect()
    }

    /// Rows `q,p,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["q", "p", "value"])?;
        for (i, q) in self.q.iter().enumerate() {
            for (j, p) in self.p.iter().enumerate() {
                w.write_record([format!("{q:.16e}"), format!("{p:.16e}"), format!("{:.16e}", self.values[(i, j)])])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `{"q": [...], "p": [...], "values": [[...]]}` with `values[i][j]` at `(q_i, p_j)`.
    pub fn to_json(&self) -> Result<String> {
        let file = GridFile {
            q: self.q.clone(),
            p: self.p.clone(),
            values: (0..self.q.len())
                .map(|i| (0..self.p.len()).map(|j| self.values[(i, j)]).collect())
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GridFile = serde_json::from_str(text)?;
        let mut grid = Self::new(file.q, file.p)?;
        if file.values.len() != grid.q.len() || file.values.iter().any(|r| r.len() != grid.p.len()) {
            return Err(Error::Parse("grid values do not match the axes".into()));
        }
        for (i, row) in file.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                grid.values[(i, j)] = *v;
            }
        }
        Ok(grid)
    }
}
