//! Seeded Monte Carlo harnesses comparing empirical distances with the
//! closed-form bounds.
//!
//! Draws are split into [`CHUNKS`] fixed chunks; chunk `k` uses RNG stream
//! `k` of the master seed and runs on its own thread. Results are merged in
//! chunk order, so output does not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use serde::Serialize;

use crate::bounds::{self, BoundId, RandomSumInputs};
use crate::distances::{kolmogorov_empirical, kolmogorov_two_sample, wasserstein_empirical};
use crate::quadrature::Quadrature;
use crate::rng;
use crate::special_functions::{inequality_suite, InequalitySummary};
use crate::svg_distribution::{svg_pdf, svg_sample_with, vg_pdf, vg_sample_with, SvgParams, SvgTable, VgParams};
use crate::transforms::{transform_sample, DistKind, DistributionSpec, TransformKind};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const CHUNKS: u64 = 16;
pub const DEFAULT_TRIALS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    D2,
    RandomSum,
    VgCompare,
    InequalitySuite,
    FixedPoint,
    CfDiagnostic,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::D2 => "d2",
            ExperimentKind::RandomSum => "random_sum",
            ExperimentKind::VgCompare => "vg_compare",
            ExperimentKind::InequalitySuite => "inequality_suite",
            ExperimentKind::FixedPoint => "fixed_point",
            ExperimentKind::CfDiagnostic => "cf_diagnostic",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "d2" => ExperimentKind::D2,
            "random_sum" | "randomsum" => ExperimentKind::RandomSum,
            "vg_compare" | "vgcompare" => ExperimentKind::VgCompare,
            "inequality_suite" | "inequalitysuite" | "inequalities" => ExperimentKind::InequalitySuite,
            "fixed_point" | "fixedpoint" => ExperimentKind::FixedPoint,
            "cf_diagnostic" | "cf" => ExperimentKind::CfDiagnostic,
            _ => return Err(Error::Parse(format!("unknown experiment '{s}'"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format '{s}'"))),
        }
    }
}

/// A run description, read from `key=value` lines or CLI flags.
///
/// Keys: `experiment`, `m`, `n`, `p`, `trials`, `seed`, `out`, `format`,
/// `r`, `sigma`, `mu`, `theta` (first law), `r2`, `sigma2`, `mu2` (SVG
/// target of `vg_compare`), `x` (summand law: `rademacher`, `skew` or
/// `atoms:v@p,v@p,...`), `t` (comma-separated grid).
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub m: u64,
    pub n: u64,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub r: f64,
    pub sigma: f64,
    pub mu: f64,
    pub theta: f64,
    pub r2: f64,
    pub sigma2: f64,
    pub mu2: f64,
    pub x: String,
    pub t: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            m: 1000,
            n: 1000,
            p: 0.01,
            trials: DEFAULT_TRIALS,
            seed: 1,
            out: None,
            format: Format::Csv,
            r: 2.0,
            sigma: 1.0,
            mu: 0.0,
            theta: 0.0,
            r2: 2.0,
            sigma2: 1.0,
            mu2: 0.0,
            x: "rademacher".into(),
            t: vec![0.0, 0.5, 1.0, 2.0],
        }
    }

    /// Parse a flat `key=value` file; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(pairs)
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Result<Self> {
        let pairs: Vec<(String, String)> = pairs.into_iter().collect();
        let kind = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "experiment")
            .ok_or_else(|| Error::Parse("missing key 'experiment'".into()))?
            .1
            .parse()?;
        let mut c = Self::new(kind);
        for (k, v) in &pairs {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Parse(format!("bad value '{v}' for '{key}'")))
        }
        match key {
            "experiment" => self.experiment = v.parse()?,
            "m" => self.m = num(key, v)?,
            "n" => self.n = num(key, v)?,
            "p" => self.p = num(key, v)?,
            "trials" => self.trials = num::<f64>(key, v)? as usize,
            "seed" => self.seed = num(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => self.format = v.parse()?,
            "r" => self.r = num(key, v)?,
            "sigma" => self.sigma = num(key, v)?,
            "mu" => self.mu = num(key, v)?,
            "theta" => self.theta = num(key, v)?,
            "r2" => self.r2 = num(key, v)?,
            "sigma2" => self.sigma2 = num(key, v)?,
            "mu2" => self.mu2 = num(key, v)?,
            "x" => self.x = v.to_string(),
            "t" => {
                self.t = v
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParams("m and n must be positive".into()));
        }
        Ok(())
    }

    pub fn x_spec(&self) -> Result<DistributionSpec> {
        parse_x_spec(&self.x)
    }
}

/// `rademacher`, `skew` (−1 w.p. 2/3, 2 w.p. 1/3) or `atoms:v@p,v@p,...`.
pub fn parse_x_spec(s: &str) -> Result<DistributionSpec> {
    match s {
        "rademacher" => Ok(DistributionSpec::rademacher()),
        "skew" => Ok(DistributionSpec::finite_discrete(vec![(-1.0, 2.0 / 3.0), (2.0, 1.0 / 3.0)])?
            .with_name("skew")),
        _ => {
            let body = s
                .strip_prefix("atoms:")
                .ok_or_else(|| Error::Parse(format!("unknown summand law '{s}'")))?;
            let atoms = body
                .split(',')
                .map(|a| {
                    let (v, p) = a
                        .split_once('@')
                        .ok_or_else(|| Error::Parse(format!("bad atom '{a}', expected v@p")))?;
                    let f = |t: &str| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad number in '{a}'")))
                    };
                    Ok((f(v)?, f(p)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DistributionSpec::finite_discrete(atoms)?.with_name(s))
        }
    }
}

/// One experiment outcome. Absent values are NaN (`null` in JSON).
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub n: usize,
    pub empirical_dk: f64,
    pub se_dk: f64,
    pub empirical_dw: f64,
    pub se_dw: f64,
    pub bound_dk: f64,
    pub bound_dw: f64,
    pub ratio_dk: f64,
    pub ratio_dw: f64,
    pub extra: BTreeMap<String, f64>,
    /// An empirical value exceeds a bound below the metric's cap by more
    /// than 3 standard errors.
    pub violation: bool,
    pub wall_time: f64,
}

impl ResultRow {
    fn new(experiment: ExperimentKind, seed: u64, params: &[(&str, f64)]) -> Self {
        ResultRow {
            experiment,
            seed,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            n: 0,
            empirical_dk: f64::NAN,
            se_dk: f64::NAN,
            empirical_dw: f64::NAN,
            se_dw: f64::NAN,
            bound_dk: f64::NAN,
            bound_dw: f64::NAN,
            ratio_dk: f64::NAN,
            ratio_dw: f64::NAN,
            extra: BTreeMap::new(),
            violation: false,
            wall_time: 0.0,
        }
    }

    fn finish(mut self, start: Instant) -> Self {
        let ratio = |e: f64, b: f64| if b > 0.0 { e / b } else { f64::NAN };
        self.ratio_dk = ratio(self.empirical_dk, self.bound_dk);
        self.ratio_dw = ratio(self.empirical_dw, self.bound_dw);
        let over = |e: f64, se: f64, b: f64, cap: f64| {
            b.is_finite() && b < cap && e > b + 3.0 * se.max(0.0)
        };
        self.violation = over(self.empirical_dk, self.se_dk, self.bound_dk, 1.0)
            || over(self.empirical_dw, self.se_dw, self.bound_dw, f64::INFINITY);
        self.wall_time = start.elapsed().as_secs_f64();
        self
    }
}

/// `n` draws of `f`, split over [`CHUNKS`] independent streams.
fn par_draws<F>(n: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = CHUNKS as usize;
    let sizes: Vec<usize> = (0..chunks)
        .map(|k| n / chunks + usize::from(k < n % chunks))
        .collect();
    let parts: Vec<Vec<f64>> = std::thread::scope(|s| {
        let handles: Vec<_> = sizes
            .iter()
            .enumerate()
            .map(|(k, &len)| {
                let f = &f;
                s.spawn(move || {
                    let mut g = rng::stream(seed, k as u64);
                    (0..len).map(|_| f(&mut g)).collect::<Vec<f64>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    parts.concat()
}

/// Simulate the standardized binary `D_2` statistic
/// `W = [(X − m/2)/√(m/4)]·[(Y − n/2)/√(n/4)]`, `X ~ Bin(m, ½)`,
/// `Y ~ Bin(n, ½)`, against SVG(1, 1, 0).
pub fn run_d2(m: u64, n: u64, trials: usize, seed: u64) -> Result<ResultRow> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidParams(format!("need m, n >= 2, got {m}, {n}")));
    }
    let start = Instant::now();
    let bx = Binomial::new(m, 0.5).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let by = Binomial::new(n, 0.5).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let (mf, nf) = (m as f64, n as f64);
    let w = par_draws(trials, seed, |g| {
        let x = bx.sample(g) as f64;
        let y = by.sample(g) as f64;
        (x - mf / 2.0) / (mf / 4.0).sqrt() * ((y - nf / 2.0) / (nf / 4.0).sqrt())
    });
    let target = SvgTable::new(SvgParams::standard(1.0)?)?;
    let dk = kolmogorov_empirical(&w, |x| target.cdf(x))?;
    let dw = wasserstein_empirical(&w, &target)?;
    let [bw, bk] = bounds::d2_bounds(m, n)?;
    let mut row = ResultRow::new(ExperimentKind::D2, seed, &[("m", mf), ("n", nf)]);
    row.n = trials;
    row.empirical_dk = dk.value;
    row.se_dk = dk.se_hint;
    row.empirical_dw = dw.value;
    row.se_dw = dw.se_hint;
    row.bound_dw = bw.bound_value;
    row.bound_dk = bk.bound_value;
    let (mean, var) = mean_var(&w);
    row.extra.insert("sample_mean".into(), mean);
    row.extra.insert("sample_variance".into(), var);
    row.extra.insert("bound_dw_quoted".into(), bw.quoted_value.unwrap_or(f64::NAN));
    Ok(row.finish(start))
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v)
}

fn third_central(x: &[f64]) -> f64 {
    let (m, v) = mean_var(x);
    let n = x.len() as f64;
    x.iter().map(|t| (t - m).powi(3)).sum::<f64>() / n / v.powf(1.5)
}

/// `Σ_{i≤count} X_i`: exact multinomial counts for discrete laws, direct
/// summation otherwise.
fn iid_sum(spec: &DistributionSpec, count: u64, g: &mut ChaCha8Rng) -> f64 {
    match &spec.kind {
        DistKind::FiniteDiscrete(atoms) => {
            let mut left = count;
            let mut mass = 1.0;
            let mut total = 0.0;
            for (j, (x, p)) in atoms.iter().enumerate() {
                if left == 0 {
                    break;
                }
                let c = if j + 1 == atoms.len() || mass <= *p {
                    left
                } else {
                    let q = (p / mass).clamp(0.0, 1.0);
                    Binomial::new(left, q).map(|b| b.sample(g)).unwrap_or(0)
                };
                total += x * c as f64;
                left -= c;
                mass -= p;
            }
            total
        }
        _ => spec
            .sample_with(count as usize, g)
            .map(|v| v.iter().sum())
            .unwrap_or(f64::NAN),
    }
}

/// Simulate `W = √p Σ_{i≤N} X_i` with `N ~ Geo(p)` on `{1, 2, …}`, against
/// Laplace(0, σ/√2) = SVG(2, σ/√2, 0), `σ² = Var X`.
pub fn run_random_sum(p: f64, x_spec: &DistributionSpec, trials: usize, seed: u64) -> Result<ResultRow> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParams(format!("p must lie in (0, 1), got {p}")));
    }
    if x_spec.mean.abs() > 1e-12 {
        return Err(Error::InvalidParams(format!(
            "summands must have mean zero, got {}",
            x_spec.mean
        )));
    }
    let start = Instant::now();
    let sigma = x_spec.variance.sqrt();
    let geo = Geometric::new(p).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let sp = p.sqrt();
    let w = par_draws(trials, seed, |g| {
        let n = 1 + geo.sample(g);
        sp * iid_sum(x_spec, n, g)
    });
    let target = SvgTable::new(SvgParams::new(2.0, sigma / 2f64.sqrt(), 0.0)?)?;
    let dk = kolmogorov_empirical(&w, |x| target.cdf(x))?;
    let dw = wasserstein_empirical(&w, &target)?;

    let mut inp = RandomSumInputs {
        p_geo: Some(p),
        sigma,
        ..Default::default()
    };
    if let DistKind::FiniteDiscrete(atoms) = &x_spec.kind {
        let (a, b) = atoms
            .iter()
            .filter(|a| a.1 > 0.0)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| (a.min(*x), b.max(*x)));
        inp.quantile_gap = Some(bounds::quantile_gap_envelope(a, b));
    }
    inp.rho = x_spec.moment(3.0, true).ok();
    let reports = bounds::random_sum_bounds(&inp)?;
    let get = |id: BoundId| {
        reports
            .iter()
            .find(|r| r.bound_id == id && r.valid)
            .map_or(f64::NAN, |r| r.bound_value)
    };

    let mut row = ResultRow::new(ExperimentKind::RandomSum, seed, &[("p", p), ("sigma", sigma)]);
    row.n = trials;
    row.empirical_dk = dk.value;
    row.se_dk = dk.se_hint;
    row.empirical_dw = dw.value;
    row.se_dw = dw.se_hint;
    row.bound_dk = get(BoundId::GeometricSumKolmogorov);
    row.bound_dw = get(BoundId::GeometricSumWasserstein);
    row.extra.insert("bound_bw".into(), get(BoundId::GeometricSumBoundedWasserstein));
    row.extra.insert("skewness".into(), third_central(&w));
    Ok(row.finish(start))
}

/// One point of the characteristic-function diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct CfRow {
    pub p: f64,
    pub t: f64,
    pub im_phi: f64,
    /// `−(1/6) p^{1/2} t³ E X³ / (1 + σ² t²/2)²`.
    pub leading: f64,
    /// The same with an unsquared denominator, off by `1 + σ²t²/2`.
    pub leading_unsquared: f64,
    /// `im_phi / leading`; NaN when the leading term vanishes.
    pub ratio: f64,
}

/// Exact `Im φ_W(t)` for `W = √p Σ_{i≤N} X_i`, from
/// `φ_W(t) = p φ_X(√p t) / (1 − (1 − p) φ_X(√p t))`.
pub fn run_cf_diagnostic(p: f64, x_spec: &DistributionSpec, t_grid: &[f64]) -> Result<Vec<CfRow>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParams(format!("p must lie in (0, 1), got {p}")));
    }
    let DistKind::FiniteDiscrete(atoms) = &x_spec.kind else {
        return Err(Error::Domain("characteristic function needs a discrete law".into()));
    };
    let m3: f64 = atoms.iter().map(|(x, q)| q * x.powi(3)).sum();
    let s2 = x_spec.variance;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let s = p.sqrt() * t;
            // 1 − φ_X(s) without cancellation.
            let one_minus: Complex64 = atoms
                .iter()
                .map(|(x, q)| {
                    let a = s * x;
                    Complex64::new(2.0 * (a / 2.0).sin().powi(2), -a.sin()) * q
                })
                .sum();
            let phi = Complex64::new(1.0, 0.0) - one_minus;
            let w = phi * p / (one_minus * (1.0 - p) + p);
            let a = 1.0 + s2 * t * t / 2.0;
            let leading_unsquared = -p.sqrt() * t.powi(3) * m3 / 6.0 / a;
            let leading = leading_unsquared / a;
            CfRow {
                p,
                t,
                im_phi: w.im,
                leading,
                leading_unsquared,
                ratio: if leading != 0.0 { w.im / leading } else { f64::NAN },
            }
        })
        .collect())
}

/// `sup|F₁ − F₂|` and `∫|F₁ − F₂|` for two densities by cumulative
/// quadrature of `f₁ − f₂` on a fine grid.
fn density_distances<F1, F2>(f1: F1, f2: F2, lo: f64, hi: f64, breaks: &[f64]) -> Result<(f64, f64)>
where
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    const CELLS: usize = 20_000;
    let mut x: Vec<f64> = (0..=CELLS)
        .map(|i| lo + (hi - lo) * i as f64 / CELLS as f64)
        .collect();
    x.extend(breaks.iter().cloned().filter(|b| *b > lo && *b < hi));
    x.sort_by(|a, b| a.total_cmp(b));
    x.dedup();
    let quad = Quadrature::with_tolerance(1e-15, 1e-10);
    let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
    let mut d = 0.0;
    let (mut sup, mut w) = (0.0f64, 0.0);
    for i in 1..x.len() {
        let step = quad.integrate(|t| finite(f1(t)) - finite(f2(t)), x[i - 1], x[i])?.value;
        let next = d + step;
        sup = sup.max(next.abs());
        w += if d * next >= 0.0 {
            0.5 * (d.abs() + next.abs()) * (x[i] - x[i - 1])
        } else {
            0.5 * (d * d + next * next) / (d.abs() + next.abs()) * (x[i] - x[i - 1])
        };
        d = next;
    }
    Ok((sup, w))
}

/// Compare VG(r₁, θ₁, σ₁, μ₁) with SVG(r₂, σ₂, μ₂).
///
/// `empirical_dk`/`empirical_dw` are computed by quadrature from the two
/// densities; the Monte Carlo values from `trials` VG draws are in `extra`.
pub fn run_vg_compare(p1: &VgParams, p2: &SvgParams, trials: usize, seed: u64) -> Result<ResultRow> {
    let start = Instant::now();
    let [bw, bk] = bounds::vg_svg_bounds(p1, p2);
    let sd = p1.variance().sqrt().max(p2.variance().sqrt());
    let lo = p1.mean().min(p2.mu) - 60.0 * sd;
    let hi = p1.mean().max(p2.mu) + 60.0 * sd;
    let (dk, dw) = density_distances(
        |x| vg_pdf(p1, x).unwrap_or(f64::INFINITY),
        |x| svg_pdf(p2, x).unwrap_or(f64::INFINITY),
        lo,
        hi,
        &[p1.mu, p2.mu],
    )?;
    let mut row = ResultRow::new(
        ExperimentKind::VgCompare,
        seed,
        &[
            ("r1", p1.r),
            ("theta1", p1.theta),
            ("sigma1", p1.sigma),
            ("mu1", p1.mu),
            ("r2", p2.r),
            ("sigma2", p2.sigma),
            ("mu2", p2.mu),
        ],
    );
    row.n = trials;
    row.empirical_dk = dk;
    row.empirical_dw = dw;
    row.se_dk = 0.0;
    row.se_dw = 0.0;
    row.bound_dw = bw.bound_value;
    row.bound_dk = if bk.valid { bk.bound_value } else { f64::NAN };
    row.extra.insert("lower_bound_dw".into(), p1.r * p1.theta.abs());
    let x = par_draws(trials, seed, |g| {
        vg_sample_with(p1, 1, g).map_or(f64::NAN, |v| v[0])
    });
    let target = SvgTable::new(*p2)?;
    let mk = kolmogorov_empirical(&x, |t| target.cdf(t))?;
    let mw = wasserstein_empirical(&x, &target)?;
    row.extra.insert("mc_dk".into(), mk.value);
    row.extra.insert("mc_dw".into(), mw.value);
    Ok(row.finish(start))
}

/// KS distance between `W` and `W^{V_r}`: one-sample against the law of
/// `W` when it is SVG, and two-sample, with a two-sample baseline between
/// independent draws of `W`.
pub fn fixed_point_distance(
    spec: &DistributionSpec,
    svg: Option<&SvgParams>,
    r: f64,
    n: usize,
    seed: u64,
) -> Result<ResultRow> {
    let start = Instant::now();
    let v = transform_sample(spec, TransformKind::CenteredEquilibrium(r), n, seed)?;
    let mut g = rng::stream(seed, CHUNKS);
    let a = draw(spec, svg, n, &mut g)?;
    let b = draw(spec, svg, n, &mut g)?;
    let two = kolmogorov_two_sample(&a, &v)?;
    let base = kolmogorov_two_sample(&a, &b)?;
    let mut row = ResultRow::new(ExperimentKind::FixedPoint, seed, &[("r", r)]);
    row.n = n;
    if let Some(p) = svg {
        row.params.insert("sigma".into(), p.sigma);
        let t = SvgTable::new(*p)?;
        let k = kolmogorov_empirical(&v, |x| t.cdf(x))?;
        row.empirical_dk = k.value;
        row.se_dk = k.se_hint;
    } else {
        row.empirical_dk = two.value;
        row.se_dk = two.se_hint;
    }
    row.extra.insert("two_sample_dk".into(), two.value);
    row.extra.insert("baseline_dk".into(), base.value);
    Ok(row.finish(start))
}

fn draw(spec: &DistributionSpec, svg: Option<&SvgParams>, n: usize, g: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    match svg {
        Some(p) => svg_sample_with(p, n, g),
        None => spec.sample_with(n, g),
    }
}

/// [`fixed_point_distance`] for SVG(r, σ, 0).
pub fn run_fixed_point(r: f64, sigma: f64, n: usize, seed: u64) -> Result<ResultRow> {
    let p = SvgParams::new(r, sigma, 0.0)?;
    let spec = DistributionSpec::svg(p)?;
    fixed_point_distance(&spec, Some(&p), r, n, seed)
}

/// Orders `ν = −0.45 + 0.6k`, `k < 40`, and 80 log-spaced `x` in
/// `[1e−6, 500]`.
pub fn default_inequality_grid() -> (Vec<f64>, Vec<f64>) {
    let nus = (0..40).map(|i| -0.45 + 0.6 * i as f64).collect();
    let xs = (0..80)
        .map(|i| 10f64.powf(-6.0 + (500f64.log10() + 6.0) * i as f64 / 79.0))
        .collect();
    (nus, xs)
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum ExperimentOutput {
    Rows(Vec<ResultRow>),
    Inequalities(Vec<InequalitySummary>),
    Cf(Vec<CfRow>),
}

impl ExperimentOutput {
    pub fn has_violation(&self) -> bool {
        match self {
            ExperimentOutput::Rows(r) => r.iter().any(|r| r.violation),
            ExperimentOutput::Inequalities(s) => s.iter().any(|s| !s.violations.is_empty()),
            ExperimentOutput::Cf(_) => false,
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let c = config;
    Ok(match c.experiment {
        ExperimentKind::D2 => ExperimentOutput::Rows(vec![run_d2(c.m, c.n, c.trials, c.seed)?]),
        ExperimentKind::RandomSum => {
            ExperimentOutput::Rows(vec![run_random_sum(c.p, &c.x_spec()?, c.trials, c.seed)?])
        }
        ExperimentKind::VgCompare => {
            let p1 = VgParams::new(c.r, c.theta, c.sigma, c.mu)?;
            let p2 = SvgParams::new(c.r2, c.sigma2, c.mu2)?;
            ExperimentOutput::Rows(vec![run_vg_compare(&p1, &p2, c.trials, c.seed)?])
        }
        ExperimentKind::FixedPoint => {
            ExperimentOutput::Rows(vec![run_fixed_point(c.r, c.sigma, c.trials, c.seed)?])
        }
        ExperimentKind::InequalitySuite => {
            let (nus, xs) = default_inequality_grid();
            ExperimentOutput::Inequalities(inequality_suite(&nus, &xs)?)
        }
        ExperimentKind::CfDiagnostic => ExperimentOutput::Cf(run_cf_diagnostic(c.p, &c.x_spec()?, &c.t)?),
    })
}

/// Shortest round-trip text for `v`, in exponent form outside
/// `[1e-4, 1e15)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn kv(map: &BTreeMap<String, f64>) -> String {
    map.iter()
        .map(|(k, v)| format!("{k}={}", fmt_num(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

/// CSV with a `# svgstein <table> schema=<v> ...` header comment.
pub fn to_csv(config: &ExperimentConfig, out: &ExperimentOutput) -> String {
    let mut s = String::new();
    let table = match out {
        ExperimentOutput::Rows(_) => "results",
        ExperimentOutput::Inequalities(_) => "inequalities",
        ExperimentOutput::Cf(_) => "cf",
    };
    let _ = writeln!(
        s,
        "# svgstein {table} schema={SCHEMA_VERSION} experiment={} seed={}",
        config.experiment, config.seed
    );
    match out {
        ExperimentOutput::Rows(rows) => {
            s.push_str("experiment,seed,n,params,empirical_dk,se_dk,empirical_dw,se_dw,bound_dk,bound_dw,ratio_dk,ratio_dw,violation,extra,wall_time\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.experiment,
                    r.seed,
                    r.n,
                    kv(&r.params),
                    fmt_num(r.empirical_dk),
                    fmt_num(r.se_dk),
                    fmt_num(r.empirical_dw),
                    fmt_num(r.se_dw),
                    fmt_num(r.bound_dk),
                    fmt_num(r.bound_dw),
                    fmt_num(r.ratio_dk),
                    fmt_num(r.ratio_dw),
                    r.violation,
                    kv(&r.extra),
                    fmt_num(r.wall_time)
                );
            }
        }
        ExperimentOutput::Inequalities(rows) => {
            s.push_str("inequality,points,min_relative_slack,argmin_nu,argmin_x,violations\n");
            for r in rows {
                let id = serde_json::to_value(r.id).ok();
                let id = id.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    id,
                    r.points,
                    fmt_num(r.min_relative_slack),
                    fmt_num(r.argmin.0),
                    fmt_num(r.argmin.1),
                    r.violations.len()
                );
            }
        }
        ExperimentOutput::Cf(rows) => {
            s.push_str("p,t,im_phi,leading,leading_unsquared,ratio\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    fmt_num(r.p),
                    fmt_num(r.t),
                    fmt_num(r.im_phi),
                    fmt_num(r.leading),
                    fmt_num(r.leading_unsquared),
                    fmt_num(r.ratio)
                );
            }
        }
    }
    s
}

pub fn to_json(config: &ExperimentConfig, out: &ExperimentOutput) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        config: &'a ExperimentConfig,
        results: &'a ExperimentOutput,
    }
    Ok(serde_json::to_string_pretty(&Doc {
        schema: SCHEMA_VERSION,
        config,
        results: out,
    })?)
}

/// Render in the configured format and write to `out` (stdout when unset).
pub fn write_output(config: &ExperimentConfig, out: &ExperimentOutput) -> Result<()> {
    let text = match config.format {
        Format::Csv => to_csv(config, out),
        Format::Json => to_json(config, out)? + "\n",
    };
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn config_parsing() {
        let c = ExperimentConfig::parse("experiment = d2\n# comment\nm=100\nn=200 # trailing\nseed=7\n").unwrap();
        assert_eq!((c.experiment, c.m, c.n, c.seed), (ExperimentKind::D2, 100, 200, 7));
        assert!(ExperimentConfig::parse("m=3").is_err());
        assert!(ExperimentConfig::parse("experiment=d2\nbogus=1").is_err());
        assert!(ExperimentConfig::parse("experiment=d2\ntrials=0").is_err());
    }

    #[test]
    fn cf_vanishes_at_zero() {
        let x = parse_x_spec("skew").unwrap();
        let rows = run_cf_diagnostic(0.01, &x, &[0.0]).unwrap();
        assert_eq!(rows[0].im_phi, 0.0);
    }

    #[test]
    fn chunks_cover_n() {
        let v = par_draws(37, 3, |g| g.random::<f64>());
        assert_eq!(v.len(), 37);
        assert_eq!(v, par_draws(37, 3, |g| g.random::<f64>()));
    }

    #[test]
    fn atoms_spec() {
        let s = parse_x_spec("atoms:-1@0.25,0@0.5,1@0.25").unwrap();
        assert!((s.variance - 0.5).abs() < 1e-15);
        assert!(parse_x_spec("atoms:1@0.5").is_err());
    }
}
