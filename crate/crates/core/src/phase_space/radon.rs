use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::PhaseSpaceGrid;
use crate::error::{Error, Result};
use crate::fock::{quadrature_pdf, reduce_angle, DensityMatrix, HermiteTable, QuadratureDistribution};

/// Ramp-filter apodization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RadonFilter {
    /// Bare ramp `|ν|`.
    RamLak,
    /// Ramp times `sinc(ν / 2ν_c)`.
    #[default]
    SheppLogan,
}

impl std::str::FromStr for RadonFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ram-lak" | "ramlak" => Ok(Self::RamLak),
            "shepp-logan" | "shepplogan" => Ok(Self::SheppLogan),
            _ => Err(Error::Parse(format!("unknown filter {s:?} (ram-lak, shepp-logan)"))),
        }
    }
}

/// Filtered back-projection settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadonConfig {
    pub filter: RadonFilter,
    /// Filter cutoff as a fraction of the bin Nyquist frequency, in `(0, 1]`.
    pub cutoff: f64,
    /// Number of projection angles, uniform over `[0, π)`.
    pub angles: usize,
    /// Number of `x` bins on `[−half_width, half_width]`.
    pub bins: usize,
    pub half_width: f64,
    /// Output grid is `grid_points × grid_points` over the same square.
    pub grid_points: usize,
}

impl RadonConfig {
    pub fn new(angles: usize, bins: usize, half_width: f64) -> Self {
        Self {
            filter: RadonFilter::default(),
            cutoff: 1.0,
            angles,
            bins,
            half_width,
            grid_points: 129,
        }
    }

    pub fn with_filter(mut self, filter: RadonFilter) -> Self {
        self.filter = filter;
        self
    }

    /// Checks the knobs; `dim` is the Fock dimension of the state being imaged.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.cutoff > 0.0 && self.cutoff <= 1.0) {
            return Err(Error::InvalidConfig(format!("cutoff {} must lie in (0, 1]", self.cutoff)));
        }
        if self.angles < 2 * dim.max(1) {
            return Err(Error::InvalidConfig(format!(
                "{} angles is below 2·dim = {}",
                self.angles,
                2 * dim
            )));
        }
        if self.bins < 8 || self.grid_points < 2 || !(self.half_width > 0.0) {
            return Err(Error::InvalidConfig("need ≥ 8 bins, ≥ 2 grid points and half_width > 0".into()));
        }
        Ok(())
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        let n = self.bins;
        (0..n)
            .map(|i| -self.half_width + 2.0 * self.half_width * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn bin_width(&self) -> f64 {
        2.0 * self.half_width / (self.bins - 1) as f64
    }

    /// Spatial filter kernel at offset `s`: `2∫_0^{ν_c} ν w(ν) cos(2πνs) dν`.
    pub fn kernel(&self, s: f64) -> f64 {
        let nu_c = self.cutoff / (2.0 * self.bin_width());
        match self.filter {
            RadonFilter::RamLak => {
                let sinc = |x: f64| if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
                nu_c * nu_c * (2.0 * sinc(2.0 * nu_c * s) - sinc(nu_c * s).powi(2))
            }
            RadonFilter::SheppLogan => {
                let a = PI / (2.0 * nu_c);
                let b = 2.0 * PI * s;
                let sn = (2.0 * PI * s * nu_c).sin();
                let plus = (1.0 + sn) / (a + b);
                let diff = a - b;
                let minus = if diff.abs() < 1e-12 * a { 0.0 } else { (1.0 - sn) / diff };
                (4.0 * nu_c / PI) * 0.5 * (plus + minus)
            }
        }
    }
}

/// Exact quadrature densities of `rho` at `θ_j = πj/K` on the bin grid.
pub fn radon_projections(rho: &DensityMatrix, cfg: &RadonConfig) -> Result<Vec<QuadratureDistribution>> {
    cfg.validate(rho.dim())?;
    let table = HermiteTable::new(rho.dim() - 1, &cfg.bin_centers());
    (0..cfg.angles)
        .map(|j| quadrature_pdf(rho, PI * j as f64 / cfg.angles as f64, &table))
        .collect()
}

fn resample(d: &QuadratureDistribution, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let n = d.x.len();
            if x < d.x[0] || x > d.x[n - 1] {
                return 0.0;
            }
            let k = d.x.partition_point(|&v| v <= x).clamp(1, n - 1);
            let (x0, x1) = (d.x[k - 1], d.x[k]);
            let t = (x - x0) / (x1 - x0);
            (1.0 - t) * d.p[k - 1] + t * d.p[k]
        })
        .collect()
}

/// Angles folded to `[0, π)`, checked to form the uniform grid `πj/K`.
fn check_coverage(dists: &[QuadratureDistribution]) -> Result<Vec<f64>> {
    let k = dists.len();
    if k < 2 {
        return Err(Error::AngleCoverage(format!("{k} angle(s) cannot span [0, π)")));
    }
    let mut folded: Vec<f64> = dists.iter().map(|d| reduce_angle(d.theta) % PI).collect();
    folded.sort_by(f64::total_cmp);
    let step = PI / k as f64;
    let offset = folded[0];
    for (j, a) in folded.iter().enumerate() {
        if (a - offset - step * j as f64).abs() > 1e-6 {
            return Err(Error::AngleCoverage(format!(
                "{k} angles are not uniformly spread over [0, π)"
            )));
        }
    }
    Ok(folded)
}

/// Filtered back-projection `W(q,p) ≈ (π/K) Σ_θ (h ∗ p_θ)(q cosθ + p sinθ)`.
///
/// Angles may be given in `[0, 2π)`; densities at `θ + π` are mirrored onto `θ`.
pub fn wigner_inverse_radon(dists: &[QuadratureDistribution], cfg: &RadonConfig) -> Result<PhaseSpaceGrid> {
    check_coverage(dists)?;
    if dists.len() != cfg.angles {
        return Err(Error::InvalidConfig(format!(
            "config expects {} angles, got {}",
            cfg.angles,
            dists.len()
        )));
    }
    cfg.validate(0)?;
    let xs = cfg.bin_centers();
    let tau = cfg.bin_width();
    let nb = xs.len();
    let h: Vec<f64> = (0..nb).map(|n| cfg.kernel(n as f64 * tau)).collect();

    let mut out = PhaseSpaceGrid::square(cfg.half_width, cfg.grid_points)?;
    for d in dists {
        let theta = reduce_angle(d.theta);
        let mut p = resample(d, &xs);
        let theta = if theta >= PI {
            p.reverse();
            theta - PI
        } else {
            theta
        };
        let filtered: Vec<f64> = (0..nb)
            .map(|i| tau * (0..nb).map(|j| h[i.abs_diff(j)] * p[j]).sum::<f64>())
            .collect();
        let (c, s) = (theta.cos(), theta.sin());
        for (i, &q) in out.q.iter().enumerate() {
            for (j, &pv) in out.p.iter().enumerate() {
                let u = (q * c + pv * s + cfg.half_width) / tau;
                if u < 0.0 || u > (nb - 1) as f64 {
                    continue;
                }
                let k = (u.floor() as usize).min(nb - 2);
                let t = u - k as f64;
                out.values[(i, j)] += (1.0 - t) * filtered[k] + t * filtered[k + 1];
            }
        }
    }
    out.values *= PI / dists.len() as f64;
    Ok(out)
}
