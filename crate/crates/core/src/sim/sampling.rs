use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::fock::{quadrature_pdf, reduce_angle, DensityMatrix, FockConfig, HermiteTable};

/// Name recorded in batch metadata.
pub const RNG_NAME: &str = "chacha20(seed_from_u64, stream=angle index)";
/// Points in the inverse-CDF grid.
pub const CDF_POINTS: usize = 4096;

/// Quadrature outcomes drawn at one angle.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub theta: f64,
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    pub rng: String,
    pub warnings: Vec<Warning>,
}

/// `{"theta": …, "count": …, "seed": …, "rng": "…"}` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchMetadata {
    pub theta: f64,
    pub count: usize,
    pub seed: u64,
    pub rng: String,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn metadata(&self) -> BatchMetadata {
        BatchMetadata {
            theta: self.theta,
            count: self.count(),
            seed: self.seed,
            rng: self.rng.clone(),
        }
    }

    /// Writes `theta_radians,x_value` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["theta_radians", "x_value"])?;
        let theta = format!("{:.17e}", self.theta);
        for v in &self.values {
            w.write_record([theta.as_str(), &format!("{v:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_metadata(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(&self.metadata())?)?;
        Ok(())
    }

    /// Reads a `theta_radians,x_value` file; every row must carry the same angle.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut r = csv::Reader::from_path(path)?;
        let headers = r.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "theta_radians" || &headers[1] != "x_value" {
            return Err(Error::Parse(format!(
                "{}: expected header theta_radians,x_value",
                path.display()
            )));
        }
        let mut theta = None;
        let mut values = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec[i].trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("{}: row {}: bad number `{}`", path.display(), row + 2, &rec[i]))
                })
            };
            let t = parse(0)?;
            match theta {
                None => theta = Some(t),
                Some(t0) if t0 != t => {
                    return Err(Error::Parse(format!(
                        "{}: row {}: mixed angles {t0} and {t}",
                        path.display(),
                        row + 2
                    )))
                }
                _ => {}
            }
            values.push(parse(1)?);
        }
        let theta = theta.ok_or_else(|| Error::Parse(format!("{}: no samples", path.display())))?;
        Ok(Self {
            theta: reduce_angle(theta),
            values,
            seed: 0,
            stream: 0,
            rng: String::new(),
            warnings: Vec::new(),
        })
    }
}

/// Monotone cubic (Fritsch–Carlson) interpolant of a strictly increasing table.
#[derive(Debug, Clone)]
struct MonotoneCubic {
    u: Vec<f64>,
    x: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    fn new(u: Vec<f64>, x: Vec<f64>) -> Self {
        let n = u.len();
        let secant: Vec<f64> = (0..n - 1).map(|i| (x[i + 1] - x[i]) / (u[i + 1] - u[i])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secant[0];
        slopes[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secant[i - 1] * secant[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secant[i - 1] + secant[i])
            };
        }
        for i in 0..n - 1 {
            if secant[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / secant[i];
            let b = slopes[i + 1] / secant[i];
            let r = a * a + b * b;
            if r > 9.0 {
                let t = 3.0 / r.sqrt();
                slopes[i] = t * a * secant[i];
                slopes[i + 1] = t * b * secant[i];
            }
        }
        Self { u, x, slopes }
    }

    fn eval(&self, u: f64) -> f64 {
        let n = self.u.len();
        let i = match self.u.partition_point(|&v| v <= u) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.u[i + 1] - self.u[i];
        let t = ((u - self.u[i]) / h).clamp(0.0, 1.0);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.x[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.x[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }
}

/// Inverse-CDF sampler for the quadrature distributions of one state.
#[derive(Debug, Clone)]
pub struct QuadratureSampler {
    rho: DensityMatrix,
    table: HermiteTable,
}

impl QuadratureSampler {
    /// The CDF grid has [`CDF_POINTS`] points spanning the configuration's x range.
    pub fn new(rho: &DensityMatrix, cfg: &FockConfig) -> Result<Self> {
        if rho.dim() > cfg.dim {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim,
                found: rho.dim(),
            });
        }
        let lo = cfg.x_grid[0];
        let hi = cfg.x_grid[cfg.x_grid.len() - 1];
        let grid: Vec<f64> = (0..CDF_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (CDF_POINTS - 1) as f64)
            .collect();
        Ok(Self {
            rho: rho.clone(),
            table: HermiteTable::new(rho.dim() - 1, &grid),
        })
    }

    fn inverse_cdf(&self, theta: f64) -> Result<(MonotoneCubic, Vec<Warning>)> {
        let dist = quadrature_pdf(&self.rho, theta, &self.table)?;
        let x = &dist.x;
        let p: Vec<f64> = dist.p.iter().map(|&v| v.max(0.0)).collect();
        let mut cdf = Vec::with_capacity(x.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..x.len() {
            acc += 0.5 * (x[i] - x[i - 1]) * (p[i] + p[i - 1]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Certification("quadrature density has no mass on the grid".into()));
        }
        let mut u = Vec::with_capacity(x.len());
        let mut xs = Vec::with_capacity(x.len());
        for (c, &xi) in cdf.iter().zip(x) {
            let c = c / acc;
            if u.last().is_none_or(|&last| c > last) {
                u.push(c);
                xs.push(xi);
            }
        }
        if u.len() < 2 {
            return Err(Error::Certification("degenerate quadrature CDF".into()));
        }
        Ok((MonotoneCubic::new(u, xs), dist.warnings))
    }

    /// `count` i.i.d. draws at `theta` from substream `stream` of `seed`.
    pub fn sample(&self, theta: f64, count: usize, seed: u64, stream: u64) -> Result<SampleBatch> {
        if count == 0 {
            return Err(Error::InvalidConfig("sample count must be at least 1".into()));
        }
        let (inv, warnings) = self.inverse_cdf(theta)?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let values = (0..count).map(|_| inv.eval(rng.random::<f64>())).collect();
        Ok(SampleBatch {
            theta: reduce_angle(theta),
            values,
            seed,
            stream,
            rng: RNG_NAME.to_string(),
            warnings,
        })
    }
}

/// Draws `count` samples at `theta` (stream 0 of `seed`).
pub fn sample_quadrature(
    rho: &DensityMatrix,
    theta: f64,
    count: usize,
    seed: u64,
    cfg: &FockConfig,
) -> Result<SampleBatch> {
    QuadratureSampler::new(rho, cfg)?.sample(theta, count, seed, 0)
}

/// One batch per angle; angle `j` uses substream `j` of `seed`.
pub fn sample_angles(
    rho: &DensityMatrix,
    angles: &[f64],
    count: usize,
    seed: u64,
    cfg: &FockConfig,
) -> Result<Vec<SampleBatch>> {
    use rayon::prelude::*;
    let sampler = QuadratureSampler::new(rho, cfg)?;
    angles
        .par_iter()
        .enumerate()
        .map(|(j, &theta)| sampler.sample(theta, count, seed, j as u64))
        .collect()
}
