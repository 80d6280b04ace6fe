//! Fock matrix elements of the pattern functions.
//!
//! `f(x) = ∫₀^∞ t e^{−t²/4} cos(xt) dt`, so `f^(j)(Q)` is a superposition of
//! displacement operators whose Fock matrix elements are Laguerre polynomials.
//! Integrating the Gaussian weight term by term leaves, for `m = n + d`,
//!
//! `⟨m|f^(j)(Q)|n⟩ = (−1)^p 2^{j/2} √(n!/m!) Σ_{i≤n} (−1)^i C(m, n−i) (p+i)!/i!`
//!
//! with `p = (j+d)/2` when `j + d` is even, and zero otherwise. The sum is
//! evaluated in exact integer arithmetic.

use num_bigint::{BigInt, Sign};
use num_traits::{One, ToPrimitive, Zero};

use super::{dawson::DawsonEvaluator, ln_factorial};
use crate::error::{Error, Result};
use crate::fock::{matrix_element, FockConfig};

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn ln_abs(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map_or(f64::NAN, f64::abs).ln();
    }
    let shift = bits - 900;
    let head: BigInt = v >> shift;
    head.to_f64().map_or(f64::NAN, f64::abs).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `⟨m|f^(j)(Q)|n⟩` in closed form.
pub fn pattern_matrix_element(j: usize, m: usize, n: usize) -> f64 {
    let (m, n) = if m >= n { (m, n) } else { (n, m) };
    let d = m - n;
    if (j + d) % 2 == 1 {
        return 0.0;
    }
    let p = (j + d) / 2;
    // (p+i)!/i! = (i+1)(i+2)…(i+p)
    let mut rising = BigInt::one();
    for t in 1..=p {
        rising *= t;
    }
    let mut sum = BigInt::zero();
    for i in 0..=n {
        if i > 0 {
            rising = rising * (p + i) / i;
        }
        let term = binomial(m, n - i) * &rising;
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let negative = (sum.sign() == Sign::Minus) != (p % 2 == 1);
    let ln = ln_abs(&sum)
        + 0.5 * j as f64 * std::f64::consts::LN_2
        + 0.5 * (ln_factorial(n) - ln_factorial(m));
    let mag = ln.exp();
    if negative {
        -mag
    } else {
        mag
    }
}

/// `2^l (−1)^k √(2^k l! (l+k)!)`, the value of `⟨l+k|f^(k+2l)(Q)|l⟩`.
pub fn diagonal_closed_form(k: usize, l: usize) -> f64 {
    let ln = l as f64 * std::f64::consts::LN_2
        + 0.5 * (k as f64 * std::f64::consts::LN_2 + ln_factorial(l) + ln_factorial(l + k));
    if k % 2 == 0 {
        ln.exp()
    } else {
        -ln.exp()
    }
}

fn check_order(j: usize) -> Result<()> {
    let max = DawsonEvaluator::default().max_derivative_order - 1;
    if j > max {
        return Err(Error::DerivativeOrderOverflow { requested: j, max });
    }
    Ok(())
}

/// `⟨n+k|f^(k+2l)(Q)|n⟩` from the closed form above.
pub fn pattern_system_entry(k: usize, l: usize, n: usize) -> Result<f64> {
    let j = k + 2 * l;
    check_order(j)?;
    Ok(pattern_matrix_element(j, n + k, n))
}

/// `⟨n+k|f^(k+2l)(Q)|n⟩` by Gauss–Hermite quadrature of the pattern function,
/// certified by order doubling. Reliable only while `|f^(k+2l)|` stays small
/// enough for the certification tolerance.
pub fn pattern_system_entry_quadrature(k: usize, l: usize, n: usize, cfg: &FockConfig) -> Result<f64> {
    let j = k + 2 * l;
    check_order(j)?;
    let eval = DawsonEvaluator::default();
    matrix_element(
        |x| 2.0 * eval.derivative(j + 1, x).expect("order checked"),
        n + k,
        n,
        cfg,
    )
}

/// `∫ H_{2k}(x) H_n(x)² e^{−x²} dx = 2^{k+n} √π (2k)! (n!)² / ((n−k)! (k!)²)` for `k ≤ n`.
pub fn hermite_product_integral(k: usize, n: usize) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!(
            "closed form needs k ≤ n (k = {k}, n = {n}); the integral vanishes by orthogonality"
        )));
    }
    let ln = (k + n) as f64 * std::f64::consts::LN_2
        + 0.5 * std::f64::consts::PI.ln()
        + ln_factorial(2 * k)
        + 2.0 * ln_factorial(n)
        - ln_factorial(n - k)
        - 2.0 * ln_factorial(k);
    Ok(ln.exp())
}
