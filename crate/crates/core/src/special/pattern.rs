use serde::Serialize;

use super::dawson::DawsonEvaluator;
use super::ln_factorial;
use crate::error::{Error, Result};
use crate::fock::{hermite_functions, GaussHermite};

/// `f^(m)(x) = 2·daw^(m+1)(x)`.
pub fn pattern_function(m: usize, x: f64) -> Result<f64> {
    Ok(2.0 * DawsonEvaluator::default().derivative(m + 1, x)?)
}

/// Partial sum of the even-Hermite expansion
/// `f(x) = Σ_{n<N} (−1)^n n!/(2^n (2n)!) H_{2n}(x)`.
///
/// Each term is formed as `b_n·h_{2n}(x)/h_0(x)` with
/// `b_n = (−1)^n n!/√((2n)!)`, so no factorial or polynomial overflows.
pub fn hermite_series_f(x: f64, n_terms: usize) -> Result<f64> {
    if n_terms == 0 {
        return Err(Error::InvalidConfig("n_terms must be at least 1".into()));
    }
    let h = hermite_functions(2 * (n_terms - 1), x);
    let mut b = 1.0;
    let mut sum = 0.0;
    for n in 0..n_terms {
        if n > 0 {
            let nf = n as f64;
            b *= -nf / ((2.0 * nf - 1.0) * (2.0 * nf)).sqrt();
        }
        sum += b * h[2 * n];
    }
    Ok(sum / h[0])
}

/// Partial sum over `n < n_terms` of the `m`-times term-wise differentiated
/// half series `F = f/2`, whose limit is `daw^(m+1)(x)`.
pub fn differentiated_series(m: usize, x: f64, n_terms: usize) -> Result<f64> {
    if n_terms == 0 {
        return Err(Error::InvalidConfig("n_terms must be at least 1".into()));
    }
    let top = 2 * n_terms;
    if top < m {
        return Ok(0.0);
    }
    let h = hermite_functions(top - m, x);
    let half_m = 0.5 * m as f64 * std::f64::consts::LN_2;
    let mut sum = 0.0;
    for n in m.div_ceil(2)..n_terms {
        let j = 2 * n - m;
        let mag = (ln_factorial(n) - 0.5 * ln_factorial(j) + half_m).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * mag * h[j];
    }
    Ok(0.5 * sum / h[0])
}

/// Pattern functions of several orders with sampled sup-norm bounds over the
/// node range of a Gauss–Hermite rule.
#[derive(Debug, Clone, Serialize)]
pub struct PatternFunctionSet {
    orders: Vec<usize>,
    bounds: Vec<f64>,
    range: f64,
    #[serde(skip)]
    evaluator: DawsonEvaluator,
}

impl PatternFunctionSet {
    pub fn new(orders: &[usize], gh_order: usize) -> Result<Self> {
        let evaluator = DawsonEvaluator::default();
        let top = orders.iter().copied().max().unwrap_or(0);
        if top + 1 > evaluator.max_derivative_order {
            return Err(Error::DerivativeOrderOverflow {
                requested: top + 1,
                max: evaluator.max_derivative_order,
            });
        }
        let range = GaussHermite::cached(gh_order).max_node();
        let samples = 4001;
        let mut sup = vec![0.0f64; top + 1];
        for i in 0..samples {
            let x = -range + 2.0 * range * i as f64 / (samples - 1) as f64;
            for (j, v) in evaluator.pattern_values(top, x)?.into_iter().enumerate() {
                sup[j] = sup[j].max(v.abs());
            }
        }
        let bounds = orders.iter().map(|&m| sup[m]).collect::<Vec<_>>();
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::Certification("non-finite pattern-function bound".into()));
        }
        Ok(Self {
            orders: orders.to_vec(),
            bounds,
            range,
            evaluator,
        })
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Sampled `sup |f^(m)|` over the node range.
    pub fn bound(&self, m: usize) -> Option<f64> {
        self.orders.iter().position(|&o| o == m).map(|i| self.bounds[i])
    }

    pub fn node_range(&self) -> f64 {
        self.range
    }

    pub fn evaluate(&self, m: usize, x: f64) -> Result<f64> {
        if !self.orders.contains(&m) {
            return Err(Error::InvalidConfig(format!("order {m} not in the set")));
        }
        Ok(2.0 * self.evaluator.derivative(m + 1, x)?)
    }
}
