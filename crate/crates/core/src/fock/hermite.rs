//! Hermite functions `h_n(x) = (2^n n! √π)^{-1/2} H_n(x) e^{-x²/2}`.
//!
//! Everything is evaluated through the weighted three-term recursion
//!
//! ```text
//! h_{n+1}(x) = x·√(2/(n+1))·h_n(x) − √(n/(n+1))·h_{n−1}(x)
//! ```
//!
//! which never forms `H_n` or `n!`. `|h_n| ≤ π^{-1/4}` so the recursion cannot
//! overflow; for `x²/2 > 650` the seed `e^{-x²/2}` underflows, and the
//! recursion is carried on a mantissa with a separate logarithmic scale.

use std::f64::consts::PI;

const PLAIN_LIMIT: f64 = 650.0;
const RESCALE_ABOVE: f64 = 1e200;

fn pi_quarter_inv() -> f64 {
    PI.powf(-0.25)
}

/// `h_n(x)` for a single order.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    hermite_functions(n, x)[n]
}

/// `[h_0(x), …, h_nmax(x)]`.
pub fn hermite_functions(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let half_x2 = 0.5 * x * x;
    if half_x2 < PLAIN_LIMIT {
        let mut prev = 0.0;
        let mut cur = pi_quarter_inv() * (-half_x2).exp();
        out.push(cur);
        for n in 0..nmax {
            let nf = n as f64;
            let next = x * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            out.push(cur);
        }
        return out;
    }

    let mut log_scale = -half_x2 + pi_quarter_inv().ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push(cur * log_scale.exp());
    for n in 0..nmax {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
        out.push(cur * log_scale.exp());
    }
    out
}

/// Physicists' Hermite polynomials `[H_0(x), …, H_nmax(x)]` from
/// `H_{n+1} = 2x·H_n − 2n·H_{n−1}`. Overflows to ±∞ for large orders; use the
/// weighted functions for anything numerical.
pub fn hermite_polynomials(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax == 0 {
        return out;
    }
    out.push(2.0 * x);
    for n in 1..nmax {
        let next = 2.0 * x * out[n] - 2.0 * n as f64 * out[n - 1];
        out.push(next);
    }
    out
}

/// Hermite-function values tabulated on a grid.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    order: usize,
    x: Vec<f64>,
    /// `values[n][i] = h_n(x_i)`.
    values: Vec<Vec<f64>>,
}

impl HermiteTable {
    pub fn new(order: usize, x: &[f64]) -> Self {
        let mut values = vec![Vec::with_capacity(x.len()); order + 1];
        for &xi in x {
            for (n, h) in hermite_functions(order, xi).into_iter().enumerate() {
                values[n].push(h);
            }
        }
        Self {
            order,
            x: x.to_vec(),
            values,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `h_n` on the grid.
    pub fn function(&self, n: usize) -> &[f64] {
        &self.values[n]
    }

    /// `H_n` on the grid, weight stripped.
    pub fn polynomial(&self, n: usize) -> Vec<f64> {
        self.x
            .iter()
            .map(|&x| hermite_polynomials(n, x)[n])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((hermite_function(0, 0.0) - 0.751_125_544_4).abs() < 1e-10);
        // 2·(2·1·√π)^{-1/2}·e^{-1/2} from H_1(x) = 2x.
        let direct = 2.0 / (2.0 * PI.sqrt()).sqrt() * (-0.5f64).exp();
        assert!((hermite_function(1, 1.0) - direct).abs() < 1e-15);
        assert!((hermite_function(1, 1.0) - 0.644_288_365_1).abs() < 1e-10);
        assert_eq!(hermite_function(3, 0.0), 0.0);
    }

    #[test]
    fn matches_polynomial_form_at_low_order() {
        for &x in &[-2.3, -0.4, 0.0, 0.9, 3.1] {
            let h = hermite_functions(12, x);
            let p = hermite_polynomials(12, x);
            let mut norm = PI.sqrt();
            for n in 0..=12 {
                if n > 0 {
                    norm *= 2.0 * n as f64;
                }
                let direct = p[n] * (-0.5 * x * x).exp() / norm.sqrt();
                assert!((h[n] - direct).abs() < 1e-13 * (1.0 + direct.abs()), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn scaled_branch_is_continuous() {
        // x = 36.06 sits just past the plain/scaled switch.
        let x0 = (2.0 * PLAIN_LIMIT).sqrt();
        let below = hermite_functions(2000, x0 - 1e-9);
        let above = hermite_functions(2000, x0 + 1e-9);
        for n in [1000, 1500, 2000] {
            let scale = below[n].abs().max(1e-300);
            assert!((below[n] - above[n]).abs() / scale < 1e-6, "n={n}");
        }
    }

    #[test]
    fn large_order_stays_bounded() {
        for &x in &[0.0, 10.0, 40.0, 63.0, 70.0] {
            let h = hermite_functions(2000, x);
            assert!(h.iter().all(|v| v.is_finite() && v.abs() <= pi_quarter_inv() + 1e-12));
        }
        // Inside the oscillatory region the value is not negligible.
        assert!(hermite_function(2000, 40.0).abs() > 1e-4);
    }

    #[test]
    fn polynomial_recursion_consistency() {
        let grid: Vec<f64> = (0..41).map(|i| -4.0 + 0.2 * i as f64).collect();
        let table = HermiteTable::new(20, &grid);
        for n in 1..20 {
            let lo = table.polynomial(n - 1);
            let mid = table.polynomial(n);
            let hi = table.polynomial(n + 1);
            for i in 0..grid.len() {
                let rhs = 2.0 * grid[i] * mid[i] - 2.0 * n as f64 * lo[i];
                assert!((hi[i] - rhs).abs() <= 1e-10 * hi[i].abs().max(1.0));
            }
        }
    }
}
