use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, EDGE_WARN};

/// Trace tolerance for truncated infinite-dimensional states; the edge-mass
/// check bounds the discarded tail well below it.
pub const TRUNCATED_TRACE_TOL: f64 = 1e-6;

/// Family and parameters of a canonical state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateKind {
    Number { n: usize },
    Coherent { re: f64, im: f64 },
    Thermal { mean: f64 },
    /// Even superposition `|α⟩ + |−α⟩`, normalized.
    Cat { re: f64, im: f64 },
    /// `G·G†/tr` for a `dim × rank` complex Ginibre matrix `G`.
    RandomMixed { rank: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(flatten)]
    pub kind: StateKind,
    pub dim: usize,
}

impl StateSpec {
    pub fn new(kind: StateKind, dim: usize) -> Self {
        Self { kind, dim }
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateKind::Number { n } if *n == 0 => write!(f, "vacuum"),
            StateKind::Number { n } => write!(f, "number:{n}"),
            StateKind::Coherent { re, im } if *im == 0.0 => write!(f, "coherent:{re}"),
            StateKind::Coherent { re, im } => write!(f, "coherent:{re},{im}"),
            StateKind::Thermal { mean } => write!(f, "thermal:{mean}"),
            StateKind::Cat { re, im } if *im == 0.0 => write!(f, "cat:{re}"),
            StateKind::Cat { re, im } => write!(f, "cat:{re},{im}"),
            StateKind::RandomMixed { rank, seed } => write!(f, "random:{rank},{seed}"),
        }
    }
}

impl FromStr for StateKind {
    type Err = Error;

    /// `vacuum`, `number:N`, `coherent:RE[,IM]`, `thermal:MEAN`, `cat:RE[,IM]`,
    /// `random:RANK[,SEED]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = |count: usize| -> Result<Vec<f64>> {
            let parts: Vec<&str> = if args.is_empty() { vec![] } else { args.split(',').collect() };
            if parts.is_empty() || parts.len() > count {
                return Err(Error::Parse(format!("state `{s}`: expected 1 to {count} parameters")));
            }
            parts
                .iter()
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("state `{s}`: bad number `{p}`")))
                })
                .collect()
        };
        let index = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Parse(format!("state `{s}`: expected a nonnegative integer")))
            }
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "vacuum" if args.is_empty() => Ok(StateKind::Number { n: 0 }),
            "number" | "fock" => Ok(StateKind::Number { n: index(nums(1)?[0])? }),
            "coherent" => {
                let v = nums(2)?;
                Ok(StateKind::Coherent { re: v[0], im: v.get(1).copied().unwrap_or(0.0) })
            }
            "thermal" => Ok(StateKind::Thermal { mean: nums(1)?[0] }),
            "cat" => {
                let v = nums(2)?;
                Ok(StateKind::Cat { re: v[0], im: v.get(1).copied().unwrap_or(0.0) })
            }
            "random" => {
                let v = nums(2)?;
                Ok(StateKind::RandomMixed {
                    rank: index(v[0])?,
                    seed: v.get(1).map_or(Ok(0), |&x| index(x).map(|i| i as u64))?,
                })
            }
            _ => Err(Error::Parse(format!("unknown state `{s}`"))),
        }
    }
}

fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

fn outer(v: &[Complex64]) -> DMatrix<Complex64> {
    let v = DVector::from_column_slice(v);
    &v * v.adjoint()
}

fn raw_matrix(spec: &StateSpec) -> Result<DMatrix<Complex64>> {
    let dim = spec.dim;
    if dim == 0 {
        return Err(Error::InvalidConfig("dim must be at least 1".into()));
    }
    Ok(match spec.kind {
        StateKind::Number { n } => {
            if n >= dim {
                return Err(Error::InvalidConfig(format!("number state {n} needs dim > {n}")));
            }
            let mut m = DMatrix::zeros(dim, dim);
            m[(n, n)] = Complex64::new(1.0, 0.0);
            m
        }
        StateKind::Coherent { re, im } => outer(&coherent_amplitudes(Complex64::new(re, im), dim)),
        StateKind::Thermal { mean } => {
            if !(mean >= 0.0 && mean.is_finite()) {
                return Err(Error::InvalidConfig(format!("thermal mean {mean} must be ≥ 0")));
            }
            let q = mean / (1.0 + mean);
            let mut m = DMatrix::zeros(dim, dim);
            let mut p = 1.0 / (1.0 + mean);
            for n in 0..dim {
                m[(n, n)] = Complex64::new(p, 0.0);
                p *= q;
            }
            m
        }
        StateKind::Cat { re, im } => {
            let alpha = Complex64::new(re, im);
            if alpha.norm() == 0.0 {
                return Err(Error::InvalidConfig("cat amplitude must be nonzero".into()));
            }
            let plus = coherent_amplitudes(alpha, dim);
            let minus = coherent_amplitudes(-alpha, dim);
            let norm = (2.0 * (1.0 + (-2.0 * alpha.norm_sqr()).exp())).sqrt();
            let v: Vec<Complex64> = plus.iter().zip(&minus).map(|(a, b)| (a + b) / norm).collect();
            outer(&v)
        }
        StateKind::RandomMixed { rank, seed } => {
            if rank == 0 || rank > dim {
                return Err(Error::InvalidConfig(format!("rank {rank} must lie in 1..={dim}")));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let g = DMatrix::from_fn(dim, rank, |_, _| {
                Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let m = &g * g.adjoint();
            let tr = m.trace().re;
            m / Complex64::new(tr, 0.0)
        }
    })
}

/// Fock-basis matrix of the state, truncated without renormalization.
/// Fails when more than `1e−6` of the population sits on the top two levels.
pub fn make_state(spec: &StateSpec) -> Result<DensityMatrix> {
    let m = raw_matrix(spec)?;
    let dim = spec.dim;
    if !matches!(spec.kind, StateKind::RandomMixed { .. } | StateKind::Number { .. }) {
        let mass: f64 = (dim.saturating_sub(2)..dim).map(|n| m[(n, n)].re).sum();
        if mass >= EDGE_WARN {
            return Err(Error::TruncationEdge {
                mass,
                tolerance: EDGE_WARN,
            });
        }
    }
    DensityMatrix::with_trace_tolerance(m, TRUNCATED_TRACE_TOL)
}

/// Projection of the state onto the first `dim` levels, renormalized to unit
/// trace. No edge-mass requirement; the result is a different state whenever
/// the truncation discards population.
pub fn make_state_projected(spec: &StateSpec) -> Result<DensityMatrix> {
    let m = raw_matrix(spec)?;
    let tr = m.trace().re;
    if !(tr > 0.0) {
        return Err(Error::InvalidConfig("state has no population below dim".into()));
    }
    DensityMatrix::new(m / Complex64::new(tr, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let cases = [
            ("vacuum", StateKind::Number { n: 0 }),
            ("number:3", StateKind::Number { n: 3 }),
            ("coherent:1.5", StateKind::Coherent { re: 1.5, im: 0.0 }),
            ("coherent:0.5,-1", StateKind::Coherent { re: 0.5, im: -1.0 }),
            ("thermal:0.25", StateKind::Thermal { mean: 0.25 }),
            ("cat:1.5", StateKind::Cat { re: 1.5, im: 0.0 }),
            ("random:3,9", StateKind::RandomMixed { rank: 3, seed: 9 }),
        ];
        for (text, kind) in cases {
            let parsed: StateKind = text.parse().unwrap();
            assert_eq!(parsed, kind);
            assert_eq!(parsed.to_string().parse::<StateKind>().unwrap(), kind);
        }
        for bad in ["number:1.5", "number:-1", "squeezed:1", "coherent:", "cat:1,2,3"] {
            assert!(bad.parse::<StateKind>().is_err(), "{bad}");
        }
    }

    #[test]
    fn vacuum_and_zero_coherent_coincide() {
        let vac = make_state(&StateSpec::new(StateKind::Number { n: 0 }, 5)).unwrap();
        let coh = make_state(&StateSpec::new(StateKind::Coherent { re: 0.0, im: 0.0 }, 5)).unwrap();
        assert_eq!(vac.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(crate::linalg::max_entry_diff(vac.entries(), coh.entries()), 0.0);
    }

    #[test]
    fn thermal_diagonal_is_geometric() {
        let rho = make_state(&StateSpec::new(StateKind::Thermal { mean: 1.0 }, 30)).unwrap();
        for n in 0..30 {
            assert_eq!(rho.get(n, n).re, 0.5f64.powi(n as i32 + 1));
        }
        assert!((rho.trace() - (1.0 - 0.5f64.powi(30))).abs() < 1e-15);
    }

    #[test]
    fn coherent_entries_follow_poisson_amplitudes() {
        let alpha = Complex64::new(0.8, -0.3);
        let rho = make_state(&StateSpec::new(StateKind::Coherent { re: 0.8, im: -0.3 }, 25)).unwrap();
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        for (m, n) in [(0, 0), (2, 1), (3, 5)] {
            let want = (-alpha.norm_sqr()).exp() * alpha.powu(m as u32) * alpha.conj().powu(n as u32)
                / (fact(m) * fact(n)).sqrt();
            assert!((rho.get(m, n) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn edge_mass_is_enforced() {
        let err = make_state(&StateSpec::new(StateKind::Cat { re: 1.5, im: 0.0 }, 4)).unwrap_err();
        assert!(matches!(err, Error::TruncationEdge { .. }));
        let projected = make_state_projected(&StateSpec::new(StateKind::Cat { re: 1.5, im: 0.0 }, 4)).unwrap();
        assert!((projected.trace() - 1.0).abs() < 1e-14);
        // even cat: odd populations vanish
        assert!(projected.get(1, 1).norm() < 1e-16 && projected.get(3, 3).norm() < 1e-16);
        assert!(make_state(&StateSpec::new(StateKind::Cat { re: 1.5, im: 0.0 }, 24)).is_ok());
    }

    #[test]
    fn random_states_are_valid_and_reproducible() {
        let spec = StateSpec::new(StateKind::RandomMixed { rank: 2, seed: 4 }, 6);
        let a = make_state(&spec).unwrap();
        let b = make_state(&spec).unwrap();
        assert_eq!(a, b);
        let ev = a.eigenvalues();
        assert_eq!(ev.iter().filter(|&&e| e > 1e-12).count(), 2);
        assert!(make_state(&StateSpec::new(StateKind::RandomMixed { rank: 7, seed: 4 }, 6)).is_err());
    }
}
