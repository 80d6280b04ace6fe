//! Dawson's integral, the pattern functions `f^(m) = 2·daw^(m+1)` and the
//! closed-form integrals behind their Fock matrix elements.

mod dawson;
mod elements;
mod pattern;
mod table;

use std::sync::OnceLock;

pub use dawson::{
    asymptotic_derivative, dawson, dawson_asymptotic, dawson_core, dawson_derivative,
    dawson_maclaurin, derivative_scale, gaussian_sum_ladder, maclaurin_derivative, DawsonEvaluator,
    DawsonMethod, LadderCertificate, LadderRoute, MAX_DERIVATIVE_ORDER,
};
pub use elements::{
    diagonal_closed_form, hermite_product_integral, pattern_system_entry,
    pattern_system_entry_quadrature, pattern_matrix_element,
};
pub use pattern::{differentiated_series, hermite_series_f, pattern_function, PatternFunctionSet};
pub use table::PatternTable;

const LN_TABLE: usize = 4096;

/// `ln n!`, tabulated below 4096 and by Stirling's series above.
pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_TABLE);
        let mut acc = 0.0;
        t.push(0.0);
        for i in 1..LN_TABLE {
            acc += (i as f64).ln();
            t.push(acc);
        }
        t
    });
    if n < LN_TABLE {
        return table[n];
    }
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

#[cfg(test)]
mod tests;

#[cfg(test)]
mod ln_tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_product() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(10) - 3628800f64.ln()).abs() < 1e-13);
        let stirling_edge = ln_factorial(LN_TABLE);
        let summed = ln_factorial(LN_TABLE - 1) + (LN_TABLE as f64).ln();
        assert!((stirling_edge - summed).abs() < 1e-10);
    }
}
