//! Empirical Kolmogorov and Wasserstein distances, and the conversion and
//! concentration inequalities for SVG targets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::special_functions::lgam;
use crate::svg_distribution::{SvgParams, SvgTable};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Kolmogorov,
    Wasserstein,
    BoundedWasserstein,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Kolmogorov => "kolmogorov",
            Metric::Wasserstein => "wasserstein",
            Metric::BoundedWasserstein => "bounded_wasserstein",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "kolmogorov" | "ks" | "dk" => Ok(Metric::Kolmogorov),
            "wasserstein" | "w1" | "dw" => Ok(Metric::Wasserstein),
            "bounded_wasserstein" | "bw" | "dbw" => Ok(Metric::BoundedWasserstein),
            _ => Err(Error::Parse(format!("unknown metric '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MetricValue {
    pub metric: Metric,
    pub value: f64,
    pub n: usize,
    /// Standard error from batch means; 0 for small samples.
    pub se_hint: f64,
}

/// A continuous target law with the partial expectations needed for exact
/// per-interval Wasserstein integrals.
pub trait Target {
    fn cdf(&self, x: f64) -> f64;
    /// `E(x − Z)^+ = ∫_{−∞}^x F`.
    fn lower_partial(&self, x: f64) -> f64;
    /// `E(Z − x)^+ = ∫_x^∞ (1 − F)`.
    fn upper_partial(&self, x: f64) -> f64;
    fn quantile(&self, u: f64) -> f64;
}

impl Target for SvgTable {
    fn cdf(&self, x: f64) -> f64 {
        SvgTable::cdf(self, x)
    }
    fn lower_partial(&self, x: f64) -> f64 {
        SvgTable::lower_partial(self, x)
    }
    fn upper_partial(&self, x: f64) -> f64 {
        SvgTable::upper_partial(self, x)
    }
    fn quantile(&self, u: f64) -> f64 {
        SvgTable::quantile(self, u)
    }
}

const BATCHES: usize = 10;

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::InvalidParams("empty sample".into()));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParams("sample contains non-finite values".into()));
    }
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    Ok(s)
}

/// Batch-means standard error: the statistic scales like `n^{-1/2}`, so
/// the spread of batch values over `√BATCHES` estimates the full-sample SE.
fn batch_se<F: Fn(&[f64]) -> Result<f64>>(sample: &[f64], stat: F) -> Result<f64> {
    let n = sample.len();
    if n < 20 * BATCHES {
        return Ok(0.0);
    }
    let m = n / BATCHES;
    let vals: Vec<f64> = (0..BATCHES)
        .map(|b| stat(&sample[b * m..(b + 1) * m]))
        .collect::<Result<_>>()?;
    let mean = vals.iter().sum::<f64>() / BATCHES as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    Ok(var.sqrt() / BATCHES as f64)
}

fn ks_sorted<F: Fn(f64) -> f64>(s: &[f64], cdf: &F) -> f64 {
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let f = cdf(s[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    d.clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov statistic `sup_x |F_n(x) − F(x)|`.
pub fn kolmogorov_empirical<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<MetricValue> {
    let s = sorted(sample)?;
    let value = ks_sorted(&s, &cdf);
    let se_hint = batch_se(sample, |b| Ok(ks_sorted(&sorted(b)?, &cdf)))?;
    Ok(MetricValue {
        metric: Metric::Kolmogorov,
        value,
        n: sample.len(),
        se_hint,
    })
}

fn w1_sorted<T: Target + ?Sized>(s: &[f64], t: &T) -> f64 {
    let n = s.len();
    let nf = n as f64;
    let mut total = t.lower_partial(s[0]) + t.upper_partial(s[n - 1]);
    for i in 1..n {
        let (a, b) = (s[i - 1], s[i]);
        if b <= a {
            continue;
        }
        let c = i as f64 / nf;
        // ∫_a^b (c − F) over the part where F < c, (F − c) elsewhere.
        let (fa, fb) = (t.cdf(a), t.cdf(b));
        let below = |x0: f64, x1: f64| c * (x1 - x0) - (t.lower_partial(x1) - t.lower_partial(x0));
        let v = if fb <= c {
            below(a, b)
        } else if fa >= c {
            -below(a, b)
        } else {
            let q = t.quantile(c).clamp(a, b);
            below(a, q) - below(q, b)
        };
        total += v.abs();
    }
    total
}

/// Wasserstein-1 distance `∫ |F_n − F|` between a sample and a target,
/// exact per interval between order statistics and in both tails.
pub fn wasserstein_empirical<T: Target + ?Sized>(sample: &[f64], target: &T) -> Result<MetricValue> {
    let s = sorted(sample)?;
    let value = w1_sorted(&s, target);
    let se_hint = batch_se(sample, |b| Ok(w1_sorted(&sorted(b)?, target)))?;
    Ok(MetricValue {
        metric: Metric::Wasserstein,
        value,
        n: sample.len(),
        se_hint,
    })
}

/// [`wasserstein_empirical`] against SVG(r, σ, μ).
pub fn wasserstein_to_svg(sample: &[f64], p: &SvgParams) -> Result<MetricValue> {
    wasserstein_empirical(sample, &SvgTable::new(*p)?)
}

/// [`kolmogorov_empirical`] against SVG(r, σ, μ).
pub fn kolmogorov_to_svg(sample: &[f64], p: &SvgParams) -> Result<MetricValue> {
    let t = SvgTable::new(*p)?;
    kolmogorov_empirical(sample, |x| t.cdf(x))
}

/// Reporting proxy for the bounded Wasserstein distance:
/// `min(d_W, 2 d_K)`. Not an estimator of the exact dual value.
pub fn bounded_wasserstein_proxy<T: Target + ?Sized>(sample: &[f64], target: &T) -> Result<MetricValue> {
    let w = wasserstein_empirical(sample, target)?;
    let k = kolmogorov_empirical(sample, |x| target.cdf(x))?;
    let (value, se_hint) = if w.value <= 2.0 * k.value {
        (w.value, w.se_hint)
    } else {
        (2.0 * k.value, 2.0 * k.se_hint)
    };
    Ok(MetricValue {
        metric: Metric::BoundedWasserstein,
        value,
        n: sample.len(),
        se_hint,
    })
}

/// Evaluate `metric` between a sample and a target.
pub fn empirical<T: Target + ?Sized>(metric: Metric, sample: &[f64], target: &T) -> Result<MetricValue> {
    match metric {
        Metric::Kolmogorov => kolmogorov_empirical(sample, |x| target.cdf(x)),
        Metric::Wasserstein => wasserstein_empirical(sample, target),
        Metric::BoundedWasserstein => bounded_wasserstein_proxy(sample, target),
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn kolmogorov_two_sample(a: &[f64], b: &[f64]) -> Result<MetricValue> {
    let (sa, sb) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(MetricValue {
        metric: Metric::Kolmogorov,
        value: d,
        n: sa.len().min(sb.len()),
        se_hint: 0.0,
    })
}

/// Two-sample Wasserstein-1 distance `∫ |F_a − F_b|`.
pub fn wasserstein_two_sample(a: &[f64], b: &[f64]) -> Result<MetricValue> {
    let (sa, sb) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let mut pts: Vec<(f64, bool)> = sa.iter().map(|&x| (x, true)).collect();
    pts.extend(sb.iter().map(|&x| (x, false)));
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (mut fa, mut fb, mut total) = (0.0, 0.0, 0.0);
    for w in pts.windows(2) {
        if w[0].1 {
            fa += 1.0 / na;
        } else {
            fb += 1.0 / nb;
        }
        total += (fa - fb).abs() * (w[1].0 - w[0].0);
    }
    Ok(MetricValue {
        metric: Metric::Wasserstein,
        value: total,
        n: sa.len().min(sb.len()),
        se_hint: 0.0,
    })
}

fn gamma_ratio(a: f64, b: f64) -> f64 {
    (lgam(a) - lgam(b)).exp()
}

/// Largest `d_W/σ` accepted by the `r = 1` conversion.
pub const R1_CONVERSION_LIMIT: f64 = 0.676;

/// Upper bound on `d_K(W, Z)` from `d_W(W, Z)` for `Z ~ SVG(r, σ, μ)`.
///
/// For `r = 1` the bound is only informative when `d_W/σ < 0.676`; larger
/// values are rejected.
pub fn kolmogorov_from_wasserstein(p: &SvgParams, dw: f64) -> Result<f64> {
    if !(dw >= 0.0) || !dw.is_finite() {
        return Err(Error::InvalidParams(format!("d_W must be nonnegative, got {dw}")));
    }
    let (r, s) = (p.r, p.sigma);
    if r > 1.0 {
        Ok((gamma_ratio(0.5 * (r - 1.0), 0.5 * r) / (s * PI.sqrt()) * dw).sqrt())
    } else if r == 1.0 {
        if dw / s > R1_CONVERSION_LIMIT {
            return Err(Error::Domain(format!(
                "r = 1 conversion needs d_W/sigma <= {R1_CONVERSION_LIMIT}, got {}",
                dw / s
            )));
        }
        if dw == 0.0 {
            return Ok(0.0);
        }
        Ok((2.0 + (2.0 / PI.sqrt()).ln() + 0.5 * (s / dw).ln()) * (dw / (PI * s)).sqrt())
    } else {
        let c = (lgam(0.5 * (1.0 - r)) - 0.5 * PI.ln() - (r - 1.0) * 2f64.ln() - lgam(0.5 * r)).exp();
        Ok(2.0 * c.powf(1.0 / (r + 1.0)) * (dw / s).powf(r / (r + 1.0)))
    }
}

/// `C_{r,σ,α}`: an upper bound for `P(a ≤ Z ≤ a + α)`,
/// `Z ~ SVG(r, σ, μ)`.
///
/// The `r = 1` expression is used for `α ≤ 2σ`; beyond that the trivial
/// value 1 is returned.
pub fn concentration_bound(p: &SvgParams, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    let (r, s) = (p.r, p.sigma);
    Ok(if r > 1.0 {
        alpha / (2.0 * s * PI.sqrt()) * gamma_ratio(0.5 * (r - 1.0), 0.5 * r)
    } else if r == 1.0 {
        if alpha > 2.0 * s {
            1.0
        } else {
            alpha / (PI * s) * (1.0 + (2.0 * s / alpha).ln())
        }
    } else {
        (lgam(0.5 * (1.0 - r)) - 0.5 * PI.ln() - r * 2f64.ln() - lgam(0.5 * r + 1.0)).exp()
            * (alpha / s).powf(r)
    })
}
