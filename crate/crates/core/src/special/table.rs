use super::dawson::DawsonEvaluator;
use crate::error::{Error, Result};

const TAYLOR_TERMS: usize = 8;

/// Pattern functions `f^(0..=j_max)` tabulated on a uniform node grid and
/// evaluated by Taylor expansion about the nearest node.
#[derive(Debug, Clone)]
pub struct PatternTable {
    j_max: usize,
    start: f64,
    step: f64,
    nodes: usize,
    /// `coeffs[(node·(j_max+1) + j)·TAYLOR_TERMS + p] = f^(j+p)(x_node)/p!`
    coeffs: Vec<f64>,
    evaluator: DawsonEvaluator,
}

impl PatternTable {
    pub fn new(j_max: usize, half_width: f64, step: f64) -> Result<Self> {
        let evaluator = DawsonEvaluator::default();
        let top = j_max + TAYLOR_TERMS;
        if top > evaluator.max_derivative_order {
            return Err(Error::DerivativeOrderOverflow {
                requested: top,
                max: evaluator.max_derivative_order,
            });
        }
        if !(half_width > 0.0 && step > 0.0 && step <= 0.05) {
            return Err(Error::InvalidConfig("table needs half_width > 0 and 0 < step ≤ 0.05".into()));
        }
        let intervals = (2.0 * half_width / step).ceil() as usize;
        let nodes = intervals + 1;
        let start = -half_width;
        let mut inv_fact = [1.0; TAYLOR_TERMS];
        for p in 1..TAYLOR_TERMS {
            inv_fact[p] = inv_fact[p - 1] / p as f64;
        }
        let width = j_max + 1;
        let mut coeffs = vec![0.0; nodes * width * TAYLOR_TERMS];
        for i in 0..nodes {
            let x = start + i as f64 * step;
            let f = evaluator.pattern_values(top - 1, x)?;
            for j in 0..width {
                let base = (i * width + j) * TAYLOR_TERMS;
                for p in 0..TAYLOR_TERMS {
                    coeffs[base + p] = f[j + p] * inv_fact[p];
                }
            }
        }
        Ok(Self {
            j_max,
            start,
            step,
            nodes,
            coeffs,
            evaluator,
        })
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// Writes `f^(j)(x)` for `j = 0..=j_max` into `out`.
    pub fn values_into(&self, x: f64, out: &mut [f64]) {
        let width = self.j_max + 1;
        debug_assert!(out.len() >= width);
        let pos = (x - self.start) / self.step;
        let idx = pos.round();
        if !(idx >= 0.0 && idx < self.nodes as f64) {
            let f = self
                .evaluator
                .pattern_values(self.j_max, x)
                .expect("order checked at construction");
            out[..width].copy_from_slice(&f);
            return;
        }
        let i = idx as usize;
        let t = x - (self.start + i as f64 * self.step);
        let block = &self.coeffs[i * width * TAYLOR_TERMS..(i + 1) * width * TAYLOR_TERMS];
        for (j, c) in block.chunks_exact(TAYLOR_TERMS).enumerate() {
            let mut acc = c[TAYLOR_TERMS - 1];
            for p in (0..TAYLOR_TERMS - 1).rev() {
                acc = acc * t + c[p];
            }
            out[j] = acc;
        }
    }

    pub fn values(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.j_max + 1];
        self.values_into(x, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::derivative_scale;

    #[test]
    fn table_matches_direct_evaluation() {
        let table = PatternTable::new(24, 8.0, 1.0 / 128.0).unwrap();
        let eval = DawsonEvaluator::default();
        for i in 0..2000 {
            let x = -9.0 + 18.0 * (i as f64 + 0.37) / 2000.0;
            let got = table.values(x);
            let want = eval.pattern_values(24, x).unwrap();
            for j in 0..=24 {
                let err = (got[j] - want[j]).abs() / derivative_scale(j + 1);
                assert!(err < 1e-13, "j={j} x={x} err={err:e}");
            }
        }
    }

    #[test]
    fn rejects_orders_beyond_ladder() {
        assert!(PatternTable::new(45, 5.0, 0.01).is_err());
    }
}
