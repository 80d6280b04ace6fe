//! Gauss–Hermite rules for the weight `e^{-t²}`.
//!
//! Nodes come from the Golub–Welsch eigenvalue problem and are polished by
//! Newton steps on `h_n`. Weights are stored pre-multiplied by `e^{t²}`:
//! `λ_i = w_i e^{t_i²} = 1/(n·h_{n−1}(t_i)²)`, so that
//! `∫ h_m g h_n dx ≈ Σ_i λ_i h_m(t_i) h_n(t_i) g(t_i)` never exponentiates `t²`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use super::hermite::hermite_functions;

#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    /// `w_i · e^{t_i²}`.
    lambdas: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Hermite order must be positive");
        let n = order;
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        for t in nodes.iter_mut() {
            for _ in 0..4 {
                let h = hermite_functions(n, *t);
                let deriv = (2.0 * n as f64).sqrt() * h[n - 1] - *t * h[n];
                if deriv == 0.0 {
                    break;
                }
                let step = h[n] / deriv;
                *t -= step;
                if step.abs() < 1e-16 * t.abs().max(1.0) {
                    break;
                }
            }
        }
        for i in 0..n / 2 {
            let sym = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            nodes[i] = -sym;
            nodes[n - 1 - i] = sym;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }

        let lambdas = nodes
            .iter()
            .map(|&t| {
                let h = hermite_functions(n - 1, t)[n - 1];
                1.0 / (n as f64 * h * h)
            })
            .collect();
        Self { nodes, lambdas }
    }

    /// Shared, lazily built rule of the given order.
    pub fn cached(order: usize) -> Arc<GaussHermite> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().unwrap().get(&order) {
            return rule.clone();
        }
        let rule = Arc::new(GaussHermite::new(order));
        cache.lock().unwrap().insert(order, rule.clone());
        rule
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Plain weights `w_i` for `∫ e^{-t²} p(t) dt` (underflow to 0 far out).
    pub fn weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.lambdas)
            .map(|(t, l)| l * (-t * t).exp())
            .collect()
    }

    pub fn max_node(&self) -> f64 {
        self.nodes.last().copied().unwrap_or(0.0)
    }
}
