//! Zero-bias, square-bias and centered equilibrium transformations.
//!
//! For mean-zero `W` with variance `rσ²`:
//!
//! - `W^□` has `E W² f(W) = E W² · E f(W^□)`;
//! - `W*` has `E W f(W) = Var(W) · E f'(W*)`, and `W* = U W^□`;
//! - `W^{V_r}` has `E W f(W) = σ² E T_r f'(W^{V_r})` with
//!   `T_r g(x) = x g'(x) + r g(x)`, and `W^{V_r} = B_r W*`,
//!   `B_r ~ Beta(r, 1)`.
//!
//! `σ²` is always derived as `Var(W)/r`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::quadrature::Quadrature;
use crate::rng;
use crate::svg_distribution::{svg_pdf, svg_sample_with, SvgParams};
use crate::{Error, Result};

pub type PdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum DistKind {
    /// `(value, probability)` atoms.
    FiniteDiscrete(Vec<(f64, f64)>),
    AnalyticDensity { pdf: PdfFn, support: (f64, f64) },
    Sampler(SamplerFn),
}

impl fmt::Debug for DistKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistKind::FiniteDiscrete(a) => write!(f, "FiniteDiscrete({a:?})"),
            DistKind::AnalyticDensity { support, .. } => {
                write!(f, "AnalyticDensity(support={support:?})")
            }
            DistKind::Sampler(_) => f.write_str("Sampler"),
        }
    }
}

/// A law `W` with known mean and variance.
#[derive(Clone)]
pub struct DistributionSpec {
    pub kind: DistKind,
    pub mean: f64,
    pub variance: f64,
    pub name: String,
    sampler: Option<SamplerFn>,
    table: Option<Arc<DensityTable>>,
}

impl fmt::Debug for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionSpec")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("mean", &self.mean)
            .field("variance", &self.variance)
            .finish()
    }
}

impl fmt::Debug for DensityTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityTable({} nodes)", self.x.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TransformKind {
    ZeroBias,
    SquareBias,
    CenteredEquilibrium(f64),
}

impl TransformKind {
    pub fn validate(self) -> Result<Self> {
        if let TransformKind::CenteredEquilibrium(r) = self {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidParams(format!("order r must be positive, got {r}")));
            }
        }
        Ok(self)
    }
}

impl FromStr for TransformKind {
    type Err = Error;
    /// `zero-bias`, `square-bias`, or `centered-equilibrium:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        match s.as_str() {
            "zero-bias" | "zero" => return Ok(TransformKind::ZeroBias),
            "square-bias" | "square" => return Ok(TransformKind::SquareBias),
            _ => {}
        }
        if let Some(r) = s
            .strip_prefix("centered-equilibrium:")
            .or_else(|| s.strip_prefix("ce:"))
        {
            let r: f64 = r
                .parse()
                .map_err(|_| Error::Parse(format!("bad order in '{s}'")))?;
            return TransformKind::CenteredEquilibrium(r).validate();
        }
        Err(Error::Parse(format!("unknown transform '{s}'")))
    }
}

/// Cumulative `∫ p`, `∫ x p`, `∫ x² p` of an analytic density on a node
/// grid; values between nodes by Hermite interpolation.
struct DensityTable {
    x: Vec<f64>,
    /// Rows `[F, M1, M2]`, each from the lower end of the table.
    cum: Vec<[f64; 3]>,
    /// `x^k p(x)` at the nodes.
    dens: Vec<[f64; 3]>,
}

const TABLE_CELLS: usize = 4000;

impl DensityTable {
    fn build(pdf: PdfFn, lo: f64, hi: f64, breaks: &[f64]) -> Result<Self> {
        let mut x: Vec<f64> = (0..=TABLE_CELLS)
            .map(|i| lo + (hi - lo) * i as f64 / TABLE_CELLS as f64)
            .collect();
        x.extend(breaks.iter().cloned().filter(|b| *b > lo && *b < hi));
        x.sort_by(|a, b| a.total_cmp(b));
        x.dedup();
        let quad = Quadrature::with_tolerance(1e-16, 1e-12);
        let mut cum = vec![[0.0; 3]; x.len()];
        for i in 1..x.len() {
            let (a, b) = (x[i - 1], x[i]);
            let mut row = cum[i - 1];
            for (k, slot) in row.iter_mut().enumerate() {
                let f = |t: f64| {
                    let p = pdf(t);
                    if p.is_finite() {
                        p * t.powi(k as i32)
                    } else {
                        0.0
                    }
                };
                *slot += quad.integrate(f, a, b)?.value;
            }
            cum[i] = row;
        }
        let dens = x
            .iter()
            .map(|&t| {
                let p = pdf(t);
                [p, t * p, t * t * p]
            })
            .collect();
        Ok(DensityTable { x, cum, dens })
    }

    fn total(&self) -> [f64; 3] {
        *self.cum.last().unwrap()
    }

    /// Cumulative moment `k` at `t`.
    fn cum_at(&self, k: usize, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return 0.0;
        }
        if t >= self.x[n - 1] {
            return self.cum[n - 1][k];
        }
        let j = self.x.partition_point(|v| *v <= t).max(1);
        let (a, b) = (self.x[j - 1], self.x[j]);
        let (ya, yb) = (self.cum[j - 1][k], self.cum[j][k]);
        let (da, db) = (self.dens[j - 1][k], self.dens[j][k]);
        let h = b - a;
        let s = (t - a) / h;
        if !da.is_finite() || !db.is_finite() {
            return ya + s * (yb - ya);
        }
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * ya + h10 * h * da + h01 * yb + h11 * h * db
    }

    /// Smallest `t` with `cum_at(k, t) ≥ u · total`.
    fn invert(&self, k: usize, u: f64) -> f64 {
        let target = u * self.total()[k];
        let j = self.cum.partition_point(|row| row[k] < target);
        if j == 0 {
            return self.x[0];
        }
        if j >= self.x.len() {
            return *self.x.last().unwrap();
        }
        let (mut a, mut b) = (self.x[j - 1], self.x[j]);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if self.cum_at(k, m) < target {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

fn check_moments(name: &str, mean: f64, variance: f64) -> Result<()> {
    if !mean.is_finite() || !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::InvalidParams(format!(
            "{name}: need finite mean and positive variance, got {mean}, {variance}"
        )));
    }
    Ok(())
}

impl DistributionSpec {
    pub fn finite_discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParams("no atoms".into()));
        }
        if atoms.iter().any(|(x, p)| !x.is_finite() || !(*p >= 0.0)) {
            return Err(Error::InvalidParams("atoms need finite values and p >= 0".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("probabilities sum to {total}, not 1")));
        }
        let mean: f64 = atoms.iter().map(|(x, p)| x * p).sum();
        let variance: f64 = atoms.iter().map(|(x, p)| (x - mean).powi(2) * p).sum();
        check_moments("finite_discrete", mean, variance)?;
        Ok(DistributionSpec {
            kind: DistKind::FiniteDiscrete(atoms),
            mean,
            variance,
            name: "discrete".into(),
            sampler: None,
            table: None,
        })
    }

    /// `±1` with probability ½ each.
    pub fn rademacher() -> Self {
        let mut s = Self::finite_discrete(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        s.name = "rademacher".into();
        s
    }

    /// A density with declared mean and variance, checked by quadrature.
    /// `breaks` are points where the density is singular or not smooth.
    pub fn analytic(
        pdf: PdfFn,
        support: (f64, f64),
        mean: f64,
        variance: f64,
        breaks: &[f64],
    ) -> Result<Self> {
        check_moments("analytic", mean, variance)?;
        let (a, b) = support;
        if !(a < b) {
            return Err(Error::InvalidParams(format!("empty support {support:?}")));
        }
        let sd = variance.sqrt();
        let edge = |dir: f64| -> f64 {
            let mut l = 8.0 * sd + mean.abs();
            for _ in 0..60 {
                let t = mean + dir * l;
                let v = pdf(t) * t.abs().powi(3);
                if v < 1e-18 * variance {
                    break;
                }
                l *= 1.5;
            }
            mean + dir * l
        };
        let lo = if a.is_finite() { a } else { edge(-1.0) };
        let hi = if b.is_finite() { b } else { edge(1.0) };
        let mut br = breaks.to_vec();
        br.push(0.0);
        let table = DensityTable::build(pdf.clone(), lo, hi, &br)?;
        let [m0, m1, m2] = table.total();
        let tol = 1e-6;
        if (m0 - 1.0).abs() > tol
            || (m1 - mean).abs() > tol * (1.0 + sd)
            || (m2 - m1 * m1 - variance).abs() > tol * variance.max(1.0)
        {
            return Err(Error::InvalidParams(format!(
                "density moments ({m0}, {m1}, {}) disagree with declared mean {mean}, variance {variance}",
                m2 - m1 * m1
            )));
        }
        Ok(DistributionSpec {
            kind: DistKind::AnalyticDensity { pdf, support },
            mean,
            variance,
            name: "analytic".into(),
            sampler: None,
            table: Some(Arc::new(table)),
        })
    }

    /// A black-box sampler; the declared moments are checked against
    /// 20000 draws (6 standard errors).
    pub fn sampler(sampler: SamplerFn, mean: f64, variance: f64) -> Result<Self> {
        check_moments("sampler", mean, variance)?;
        let mut g = rng::stream(0x5eed, 0);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| sampler(&mut g)).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
        let se_m = (v / n as f64).sqrt();
        let se_v = ((m4 - v * v).max(0.0) / n as f64).sqrt();
        if (m - mean).abs() > 6.0 * se_m + 1e-12 || (v - variance).abs() > 6.0 * se_v + 1e-12 {
            return Err(Error::InvalidParams(format!(
                "sampler moments ({m}, {v}) disagree with declared ({mean}, {variance})"
            )));
        }
        Ok(DistributionSpec {
            kind: DistKind::Sampler(sampler),
            mean,
            variance,
            name: "sampler".into(),
            sampler: None,
            table: None,
        })
    }

    /// SVG(r, σ, μ) with its density and the exact gamma-mixture sampler.
    pub fn svg(p: SvgParams) -> Result<Self> {
        let pdf: PdfFn = Arc::new(move |x| svg_pdf(&p, x).unwrap_or(f64::INFINITY));
        let mut s = Self::analytic(pdf, (f64::NEG_INFINITY, f64::INFINITY), p.mean(), p.variance(), &[p.mu])?;
        s.sampler = Some(Arc::new(move |g: &mut dyn RngCore| {
            svg_sample_with(&p, 1, g).map(|v| v[0]).unwrap_or(f64::NAN)
        }));
        s.name = format!("svg(r={},sigma={},mu={})", p.r, p.sigma, p.mu);
        Ok(s)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `E W^k` (or `E|W|^k`) for discrete and analytic specs.
    pub fn moment(&self, k: f64, absolute: bool) -> Result<f64> {
        let f = move |x: f64| if absolute { x.abs().powf(k) } else { signed_pow(x, k) };
        match &self.kind {
            DistKind::FiniteDiscrete(atoms) => Ok(atoms.iter().map(|(x, p)| p * f(*x)).sum()),
            DistKind::AnalyticDensity { pdf, .. } => {
                let t = self.table.as_ref().unwrap();
                let quad = Quadrature::with_tolerance(1e-15, 1e-12);
                let (lo, hi) = (t.x[0], *t.x.last().unwrap());
                let mut pts = vec![lo, hi];
                if lo < 0.0 && hi > 0.0 {
                    pts.insert(1, 0.0);
                }
                let g = |x: f64| {
                    let p = pdf(x);
                    if p.is_finite() {
                        p * f(x)
                    } else {
                        0.0
                    }
                };
                Ok(quad.integrate_breaks(g, &pts)?.value)
            }
            DistKind::Sampler(_) => Err(Error::Domain(
                "moments of a sampler spec are not available exactly".into(),
            )),
        }
    }

    /// Draw `n` values of `W`.
    pub fn sample_with(&self, n: usize, g: &mut dyn RngCore) -> Result<Vec<f64>> {
        if let Some(s) = &self.sampler {
            return Ok((0..n).map(|_| s(g)).collect());
        }
        match &self.kind {
            DistKind::FiniteDiscrete(atoms) => {
                let cum = cumulative(atoms.iter().map(|a| a.1));
                Ok((0..n).map(|_| atoms[pick(&cum, g.random())].0).collect())
            }
            DistKind::AnalyticDensity { .. } => {
                let t = self.table.as_ref().unwrap();
                Ok((0..n).map(|_| t.invert(0, g.random())).collect())
            }
            DistKind::Sampler(s) => Ok((0..n).map(|_| s(g)).collect()),
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mut g = rng::stream(seed, 0);
        self.sample_with(n, &mut g)
    }

    fn require_mean_zero(&self) -> Result<()> {
        if self.mean.abs() > 1e-9 * self.variance.sqrt().max(1.0) {
            return Err(Error::Domain(format!(
                "transform needs a mean-zero law, mean is {}",
                self.mean
            )));
        }
        Ok(())
    }

    /// `E[W 1(W > s)]`.
    fn upper_first_moment(&self, s: f64) -> Result<f64> {
        match &self.kind {
            DistKind::FiniteDiscrete(atoms) => {
                Ok(atoms.iter().filter(|a| a.0 > s).map(|(x, p)| x * p).sum())
            }
            DistKind::AnalyticDensity { .. } => {
                let t = self.table.as_ref().unwrap();
                Ok(t.total()[1] - t.cum_at(1, s))
            }
            DistKind::Sampler(_) => Err(Error::Domain(
                "densities need a discrete or analytic spec".into(),
            )),
        }
    }

    fn hull(&self) -> (f64, f64) {
        match &self.kind {
            DistKind::FiniteDiscrete(atoms) => atoms
                .iter()
                .filter(|a| a.1 > 0.0)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| (a.min(*x), b.max(*x))),
            DistKind::AnalyticDensity { support, .. } => *support,
            DistKind::Sampler(_) => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

fn signed_pow(x: f64, k: f64) -> f64 {
    if k == k.round() && k.abs() < 64.0 {
        x.powi(k as i32)
    } else {
        x.signum() * x.abs().powf(k)
    }
}

fn cumulative<I: Iterator<Item = f64>>(w: I) -> Vec<f64> {
    let mut acc = 0.0;
    let mut c: Vec<f64> = w
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    let total = acc;
    for v in &mut c {
        *v /= total;
    }
    c
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|c| *c <= u).min(cum.len() - 1)
}

/// Density of the transformed law at `w`.
///
/// Square-bias densities exist only for analytic specs. The centered
/// equilibrium density is infinite at 0 for `r ≤ 1` (a `Singular` error);
/// elsewhere it is exact for discrete specs and uses quadrature otherwise.
pub fn transform_density(spec: &DistributionSpec, kind: TransformKind, w: f64) -> Result<f64> {
    let kind = kind.validate()?;
    let (a, b) = spec.hull();
    match kind {
        TransformKind::SquareBias => match &spec.kind {
            DistKind::AnalyticDensity { pdf, .. } => {
                let m2 = spec.variance + spec.mean * spec.mean;
                let p = pdf(w);
                Ok(if p.is_finite() { w * w * p / m2 } else { f64::INFINITY })
            }
            _ => Err(Error::Domain("square-bias density needs an analytic spec".into())),
        },
        TransformKind::ZeroBias => {
            spec.require_mean_zero()?;
            if w < a || w > b {
                return Ok(0.0);
            }
            Ok((spec.upper_first_moment(w)? / spec.variance).max(0.0))
        }
        TransformKind::CenteredEquilibrium(r) => {
            spec.require_mean_zero()?;
            if w < a || w > b {
                return Ok(0.0);
            }
            let s2 = spec.variance / r;
            if w == 0.0 {
                if r <= 1.0 {
                    return Err(Error::Singular(format!(
                        "centered equilibrium density of order {r} is infinite at 0"
                    )));
                }
                return Ok(spec.upper_first_moment(0.0)? / (s2 * (r - 1.0)));
            }
            // ∫_a^1 t^{r−2} dt.
            let j = |lo: f64| {
                if (r - 1.0).abs() < 1e-12 {
                    -lo.ln()
                } else {
                    (1.0 - lo.powf(r - 1.0)) / (r - 1.0)
                }
            };
            match &spec.kind {
                DistKind::FiniteDiscrete(atoms) => {
                    // E[W 1(W > w/t)] picks the atoms beyond w on its side
                    // once t > |w|/|x|.
                    let v: f64 = atoms
                        .iter()
                        .filter(|(x, _)| x * w > 0.0 && x.abs() > w.abs())
                        .map(|(x, p)| x.abs() * p * j(w.abs() / x.abs()))
                        .sum();
                    Ok(v / s2)
                }
                _ => {
                    let quad = Quadrature::with_tolerance(1e-15, 1e-11);
                    let g = |t: f64| {
                        if t <= 0.0 {
                            return 0.0;
                        }
                        let m = spec.upper_first_moment(w / t).unwrap_or(0.0);
                        // For w < 0 the mean-zero identity gives −E[W 1(W ≤ w/t)].
                        t.powf(r - 2.0) * m
                    };
                    let v = quad.integrate(g, 0.0, 1.0)?.value;
                    Ok((v / s2).max(0.0))
                }
            }
        }
    }
}

/// Draw `n` values of the transformed law.
///
/// Uses `W* = U W^□` and `W^{V_r} = B_r W*`; square-bias draws are exact for
/// discrete specs and come from the tabulated `∫ x² p` otherwise.
pub fn transform_sample_with(
    spec: &DistributionSpec,
    kind: TransformKind,
    n: usize,
    g: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    let kind = kind.validate()?;
    if !matches!(kind, TransformKind::SquareBias) {
        spec.require_mean_zero()?;
    }
    let square: Box<dyn Fn(&mut dyn RngCore) -> f64> = match &spec.kind {
        DistKind::FiniteDiscrete(atoms) => {
            let cum = cumulative(atoms.iter().map(|(x, p)| x * x * p));
            let atoms = atoms.clone();
            Box::new(move |g: &mut dyn RngCore| atoms[pick(&cum, g.random())].0)
        }
        DistKind::AnalyticDensity { .. } => {
            let t = spec.table.clone().unwrap();
            Box::new(move |g: &mut dyn RngCore| t.invert(2, g.random()))
        }
        DistKind::Sampler(_) => {
            return Err(Error::Domain(
                "transforms need a discrete or analytic spec".into(),
            ))
        }
    };
    Ok((0..n)
        .map(|_| {
            let x = square(g);
            match kind {
                TransformKind::SquareBias => x,
                TransformKind::ZeroBias => g.random::<f64>() * x,
                TransformKind::CenteredEquilibrium(r) => {
                    let u: f64 = g.random();
                    let b = g.random::<f64>().powf(1.0 / r);
                    b * u * x
                }
            }
        })
        .collect())
}

pub fn transform_sample(
    spec: &DistributionSpec,
    kind: TransformKind,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut g = rng::stream(seed, 1);
    transform_sample_with(spec, kind, n, &mut g)
}

/// `W^{V_r}` samples; see [`transform_sample`].
pub fn centered_equilibrium_sample(
    spec: &DistributionSpec,
    r: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    transform_sample(spec, TransformKind::CenteredEquilibrium(r), n, seed)
}

pub fn centered_equilibrium_density(spec: &DistributionSpec, r: f64, w: f64) -> Result<f64> {
    transform_density(spec, TransformKind::CenteredEquilibrium(r), w)
}

pub fn zero_bias_density(spec: &DistributionSpec, w: f64) -> Result<f64> {
    transform_density(spec, TransformKind::ZeroBias, w)
}

/// `E (W^{V_r})^p = E W^{p+2} / (σ² (p+1)(p+r))`, `σ² = Var(W)/r`.
///
/// `moment_p2` is `E W^{p+2}` (or `E|W|^{p+2}` for the absolute moment,
/// which the same formula gives).
pub fn transform_moment(moment_p2: f64, variance: f64, r: f64, p: f64) -> Result<f64> {
    if !(p >= 0.0) || !(r > 0.0) || !(variance > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need p >= 0, r > 0, variance > 0; got p={p}, r={r}, variance={variance}"
        )));
    }
    let s2 = variance / r;
    Ok(moment_p2 / (s2 * (p + 1.0) * (p + r)))
}

/// [`transform_moment`] with the `W` moment taken from `spec`.
pub fn spec_transform_moment(spec: &DistributionSpec, r: f64, p: f64, absolute: bool) -> Result<f64> {
    spec.require_mean_zero()?;
    transform_moment(spec.moment(p + 2.0, absolute)?, spec.variance, r, p)
}

/// `G_r f(x) = (x/r) ∫_0^1 ∫_0^1 f(x u b) r b^{r−1} du db`, the right
/// inverse of `T_r D`.
pub fn g_r_apply<F: Fn(f64) -> f64>(f: F, r: f64, x: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // b = v^{1/r} turns r b^{r−1} db into dv.
    let quad = Quadrature::with_tolerance(1e-14, 1e-12);
    let mut err = None;
    let outer = quad.integrate(
        |v: f64| {
            let b = v.powf(1.0 / r);
            match quad.integrate(|u| f(x * u * b), 0.0, 1.0) {
                Ok(i) => i.value,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(x / r * outer.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_zero_bias_is_uniform() {
        let w = DistributionSpec::rademacher();
        for x in [-0.9, -0.2, 0.0, 0.5, 0.99] {
            assert_eq!(zero_bias_density(&w, x).unwrap(), 0.5);
        }
        assert_eq!(zero_bias_density(&w, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn mean_check() {
        let w = DistributionSpec::finite_discrete(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(zero_bias_density(&w, 0.5).is_err());
        assert!(DistributionSpec::finite_discrete(vec![(0.0, 0.4)]).is_err());
    }

    #[test]
    fn moment_formula_normalised() {
        let w = DistributionSpec::rademacher();
        assert_eq!(spec_transform_moment(&w, 2.0, 0.0, false).unwrap(), 1.0);
    }

    #[test]
    fn g_r_monomial() {
        let v = g_r_apply(|x| x * x, 2.0, 1.0).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-13);
        assert_eq!(g_r_apply(|_| 0.0, 2.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("zero-bias".parse::<TransformKind>().unwrap(), TransformKind::ZeroBias);
        assert_eq!(
            "centered-equilibrium:2.5".parse::<TransformKind>().unwrap(),
            TransformKind::CenteredEquilibrium(2.5)
        );
        assert!("centered-equilibrium:-1".parse::<TransformKind>().is_err());
    }
}
