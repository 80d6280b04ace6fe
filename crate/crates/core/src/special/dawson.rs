//! Dawson's integral `daw(x) = e^{−x²} ∫₀ˣ e^{t²} dt` and its derivatives.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Highest derivative order served by the ladder.
pub const MAX_DERIVATIVE_ORDER: usize = 48;

const CORE_STEP: f64 = 0.2;
const CORE_TERMS: usize = 20;
const DERIV_STEP: f64 = 0.15;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Evaluation regime for `daw` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DawsonMethod {
    Maclaurin,
    /// Rybicki's sampled-Gaussian sum.
    Core,
    Asymptotic,
}

/// How a derivative of a given order was obtained at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderRoute {
    Recurrence,
    AsymptoticSeries,
    GaussianSum,
}

/// `daw(x)` by the Maclaurin series `Σ (−2)^m x^{2m+1}/(2m+1)!!`.
pub fn dawson_maclaurin(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut m = 0.0;
    while term.abs() > 1e-17 * sum.abs() && m < 500.0 {
        term *= -2.0 * x2 / (2.0 * m + 3.0);
        sum += term;
        m += 1.0;
    }
    sum
}

/// `daw(x)` by the sampled-Gaussian sum `π^{−1/2} Σ_{n odd} e^{−(x−nh)²}/n`,
/// centered on the even multiple of `h` nearest to `x`.
pub fn dawson_core(x: f64) -> f64 {
    let ax = x.abs();
    let n0 = 2.0 * (0.5 * ax / CORE_STEP).round();
    let xp = ax - n0 * CORE_STEP;
    let mut e1 = (2.0 * xp * CORE_STEP).exp();
    let e2 = e1 * e1;
    let mut d1 = n0 + 1.0;
    let mut d2 = d1 - 2.0;
    let mut sum = 0.0;
    for i in 1..=CORE_TERMS {
        let c = (-((2 * i - 1) as f64 * CORE_STEP).powi(2)).exp();
        sum += c * (e1 / d1 + 1.0 / (d2 * e1));
        d1 += 2.0;
        d2 -= 2.0;
        e1 *= e2;
    }
    FRAC_1_SQRT_PI * (-xp * xp).exp() * sum * x.signum()
}

/// `daw(x)` by `(1/2x) Σ (2j−1)!!/(2x²)^j`, truncated at the smallest term.
pub fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut j = 1.0;
    loop {
        let next = term * (2.0 * j - 1.0) * inv;
        if next.abs() >= term.abs() || next.abs() < 1e-18 * sum.abs() {
            break;
        }
        sum += next;
        term = next;
        j += 1.0;
    }
    sum / (2.0 * x)
}

/// `daw(x)` with the default switchover radii.
pub fn dawson(x: f64) -> f64 {
    DawsonEvaluator::default().value(x)
}

/// `daw^(k)(x)`; panics past [`MAX_DERIVATIVE_ORDER`], use
/// [`DawsonEvaluator::derivative`] for a checked variant.
pub fn dawson_derivative(k: usize, x: f64) -> f64 {
    DawsonEvaluator::default()
        .derivative(k, x)
        .expect("derivative order within the supported range")
}

/// `sup |daw^(k)|` scale: `m!·4^m` with `m = ⌊(k−1)/2⌋`, which is `|daw^(k)(0)|` for odd `k`.
pub fn derivative_scale(k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let m = (k - 1) / 2;
    (1..=m).fold(1.0, |acc, i| acc * 4.0 * i as f64)
}

/// Dawson's integral and its derivative ladder with explicit switchover radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DawsonEvaluator {
    pub switch_small: f64,
    pub switch_large: f64,
    pub max_derivative_order: usize,
}

impl Default for DawsonEvaluator {
    fn default() -> Self {
        Self {
            switch_small: 1.0,
            switch_large: 6.0,
            max_derivative_order: MAX_DERIVATIVE_ORDER,
        }
    }
}

impl DawsonEvaluator {
    pub fn new(switch_small: f64, switch_large: f64, max_derivative_order: usize) -> Result<Self> {
        if !(switch_small > 0.0 && switch_small <= 1.2) {
            return Err(Error::InvalidConfig(format!(
                "switch_small {switch_small} outside (0, 1.2]"
            )));
        }
        if !(switch_large >= 5.5 && switch_large <= 6.5) {
            return Err(Error::InvalidConfig(format!(
                "switch_large {switch_large} outside [5.5, 6.5]"
            )));
        }
        if max_derivative_order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrderOverflow {
                requested: max_derivative_order,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        Ok(Self {
            switch_small,
            switch_large,
            max_derivative_order,
        })
    }

    pub fn method_for(&self, x: f64) -> DawsonMethod {
        let ax = x.abs();
        if ax < self.switch_small {
            DawsonMethod::Maclaurin
        } else if ax < self.switch_large {
            DawsonMethod::Core
        } else {
            DawsonMethod::Asymptotic
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        Self::value_with(self.method_for(x), x)
    }

    pub fn value_with(method: DawsonMethod, x: f64) -> f64 {
        match method {
            DawsonMethod::Maclaurin => dawson_maclaurin(x),
            DawsonMethod::Core => dawson_core(x),
            DawsonMethod::Asymptotic => dawson_asymptotic(x),
        }
    }

    fn check_order(&self, k: usize) -> Result<()> {
        if k > self.max_derivative_order {
            return Err(Error::DerivativeOrderOverflow {
                requested: k,
                max: self.max_derivative_order,
            });
        }
        Ok(())
    }

    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        self.check_order(k)?;
        Ok(self.ladder(k, x)[k])
    }

    /// `[daw(x), daw′(x), …, daw^(k_max)(x)]`.
    pub fn derivatives(&self, k_max: usize, x: f64) -> Result<Vec<f64>> {
        self.check_order(k_max)?;
        Ok(self.ladder(k_max, x))
    }

    /// `[f(x), f′(x), …, f^(j_max)(x)]` with `f = 2·daw′`.
    pub fn pattern_values(&self, j_max: usize, x: f64) -> Result<Vec<f64>> {
        let d = self.derivatives(j_max + 1, x)?;
        Ok(d[1..].iter().map(|v| 2.0 * v).collect())
    }

    /// Routes used for orders `0..=k_max` at `x`.
    pub fn routes(&self, k_max: usize, x: f64) -> Vec<LadderRoute> {
        self.plan(k_max, x).1
    }

    fn ladder(&self, k_max: usize, x: f64) -> Vec<f64> {
        let (mut out, routes) = self.plan(k_max, x);
        if routes.contains(&LadderRoute::GaussianSum) {
            let sums = gaussian_sum_ladder(k_max, x);
            for (k, route) in routes.iter().enumerate() {
                if *route == LadderRoute::GaussianSum {
                    out[k] = sums[k];
                }
            }
        }
        out
    }

    /// Values for recurrence and asymptotic orders, plus the route table.
    fn plan(&self, k_max: usize, x: f64) -> (Vec<f64>, Vec<LadderRoute>) {
        let mut out = vec![0.0; k_max + 1];
        let mut routes = vec![LadderRoute::Recurrence; k_max + 1];
        out[0] = self.value(x);
        if k_max == 0 {
            return (out, routes);
        }
        out[1] = 1.0 - 2.0 * x * out[0];
        let growth = 2.0 * x.abs();
        let mut k = 1;
        while k < k_max {
            if growth.powi(k as i32 + 1) > 1e2 * derivative_scale(k + 1) {
                break;
            }
            out[k + 1] = -2.0 * x * out[k] - 2.0 * k as f64 * out[k - 1];
            k += 1;
        }
        for order in k + 1..=k_max {
            match asymptotic_derivative(order, x) {
                Some(v) => {
                    out[order] = v;
                    routes[order] = LadderRoute::AsymptoticSeries;
                }
                None => routes[order] = LadderRoute::GaussianSum,
            }
        }
        (out, routes)
    }
}

/// Term-wise `k`-th derivative of the asymptotic series, or `None` when it
/// does not reach double precision before its terms start to grow.
pub fn asymptotic_derivative(k: usize, x: f64) -> Option<f64> {
    if x == 0.0 {
        return None;
    }
    let x2 = x * x;
    let kf = k as f64;
    let mut term = 0.5 * x.powi(-(k as i32) - 1);
    for i in 1..=k {
        term *= -(i as f64);
    }
    if !term.is_finite() || term == 0.0 {
        return None;
    }
    let mut sum = term;
    let mut j = 0.0;
    loop {
        let ratio = (2.0 * j + kf + 1.0) * (2.0 * j + kf + 2.0) / (2.0 * (2.0 * j + 2.0) * x2);
        if ratio >= 1.0 {
            return None;
        }
        term *= ratio;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return Some(sum);
        }
        j += 1.0;
    }
}

/// `daw^(k)` for `k ≤ k_max` by differentiating the sampled-Gaussian sum:
/// `π^{−1/2} Σ_{n odd} D^k e^{−u²}/n`, `u = x − n·h`.
pub fn gaussian_sum_ladder(k_max: usize, x: f64) -> Vec<f64> {
    let h = DERIV_STEP;
    let reach = (2.0 * k_max as f64 + 1.0).sqrt() + 8.0;
    let n0 = 2.0 * (0.5 * x / h).round();
    let half = (reach / h).ceil() as i64 + 1;
    let mut acc = vec![0.0; k_max + 1];
    let mut e = vec![0.0; k_max + 1];
    for i in (-half..=half).filter(|i| i.rem_euclid(2) == 1) {
        let n = n0 + i as f64;
        let u = x - n * h;
        if u.abs() > reach {
            continue;
        }
        e[0] = (-u * u).exp();
        if k_max >= 1 {
            e[1] = -2.0 * u * e[0];
        }
        for k in 1..k_max {
            e[k + 1] = -2.0 * u * e[k] - 2.0 * k as f64 * e[k - 1];
        }
        for k in 0..=k_max {
            acc[k] += e[k] / n;
        }
    }
    acc.iter().map(|v| v * FRAC_1_SQRT_PI).collect()
}

/// Unevaluated sum `hi + lo` carrying about 32 significant digits.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn new(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    fn add(self, o: Self) -> Self {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        let lo = err + self.lo + o.lo;
        let hi = s + lo;
        Self { hi, lo: lo - (hi - s) }
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        let lo = err + self.hi * o.lo + self.lo * o.hi;
        let hi = p + lo;
        Self { hi, lo: lo - (hi - p) }
    }

    fn div_f64(self, d: f64) -> Self {
        let q = self.hi / d;
        let r = self.add(DoubleDouble::new(q).mul(DoubleDouble::new(-d)));
        let q2 = r.hi / d;
        let hi = q + q2;
        Self { hi, lo: q2 - (hi - q) }
    }
}

/// `daw^(k)(x)` by term-wise differentiation of the Maclaurin series,
/// accumulated in double-double arithmetic.
pub fn maclaurin_derivative(k: usize, x: f64) -> f64 {
    // daw = Σ c_m x^{2m+1}, c_m = (−2)^m / (2m+1)!!
    let xd = DoubleDouble::new(x);
    let x2 = xd.mul(xd);
    let mut c = DoubleDouble::new(1.0);
    let mut sum = DoubleDouble::new(0.0);
    let mut peak: f64 = 0.0;
    for m in 0..600usize {
        if m > 0 {
            c = c.mul(DoubleDouble::new(-2.0)).div_f64((2 * m + 1) as f64);
        }
        let p = 2 * m + 1;
        if p < k {
            continue;
        }
        let mut t = c;
        for i in (p - k + 1)..=p {
            t = t.mul(DoubleDouble::new(i as f64));
        }
        let e = p - k;
        let mut pow = if e % 2 == 1 { xd } else { DoubleDouble::new(1.0) };
        for _ in 0..e / 2 {
            pow = pow.mul(x2);
        }
        t = t.mul(pow);
        sum = sum.add(t);
        peak = peak.max(t.hi.abs());
        if p > k + 4 && t.hi.abs() < 1e-34 * peak.max(1e-300) {
            break;
        }
        if x == 0.0 {
            break;
        }
    }
    sum.hi + sum.lo
}

/// Agreement of the ladder with term-wise Maclaurin differentiation.
#[derive(Debug, Clone, Serialize)]
pub struct LadderCertificate {
    /// `(k, max_x |ladder − series| / scale_k)` on the test grid.
    pub errors: Vec<(usize, f64)>,
    /// Largest order through which every error stays below the threshold.
    pub certified_order: usize,
    pub threshold: f64,
}

impl DawsonEvaluator {
    /// Compares the ladder against the Maclaurin series on a uniform grid over
    /// `[−half_width, half_width]` for orders `0..=k_max`.
    pub fn certify_ladder(&self, k_max: usize, half_width: f64, points: usize) -> Result<LadderCertificate> {
        self.check_order(k_max)?;
        let threshold = 1e-9;
        let mut worst = vec![0.0f64; k_max + 1];
        for i in 0..points {
            let x = -half_width + 2.0 * half_width * i as f64 / (points - 1).max(1) as f64;
            let ladder = self.ladder(k_max, x);
            for k in 0..=k_max {
                let err = (ladder[k] - maclaurin_derivative(k, x)).abs() / derivative_scale(k);
                worst[k] = worst[k].max(err);
            }
        }
        let certified_order = worst
            .iter()
            .position(|&e| !(e <= threshold))
            .map_or(k_max, |p| p.saturating_sub(1));
        Ok(LadderCertificate {
            errors: worst.into_iter().enumerate().collect(),
            certified_order,
            threshold,
        })
    }

    /// Writes `x, daw, daw′, …, daw^(k_max)` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W, xs: &[f64], k_max: usize) -> Result<()> {
        self.check_order(k_max)?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string(), "daw".to_string()];
        header.extend((1..=k_max).map(|k| format!("daw_{k}")));
        w.write_record(&header)?;
        for &x in xs {
            let mut row = vec![format!("{x:.16e}")];
            row.extend(self.ladder(k_max, x).iter().map(|v| format!("{v:.16e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
