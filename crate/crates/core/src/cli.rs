//! The `svgstein` command line.
//!
//! Exit codes: 0 on success, 2 when an empirical value breaks a bound, 1 on
//! any error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{self, BoundId, BoundReport, RandomSumInputs};
use crate::distances::{self, Metric, MetricValue};
use crate::experiments::{self, fmt_num, parse_x_spec, ExperimentConfig};
use crate::stein_solver::{verify_solution_bounds, SteinSolution, TestFunction};
use crate::svg_distribution::{
    svg_absolute_moment, svg_cdf, svg_pdf, svg_quantile, svg_sample, vg_cdf, vg_pdf, vg_sample, SvgParams,
    SvgTable, VgParams,
};
use crate::transforms::{transform_density, transform_sample, DistributionSpec, TransformKind};
use crate::{Error, Result};

pub const CSV_SCHEMA: u32 = 1;
/// Relative slack allowed before a bound counts as broken.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "svgstein",
    version,
    about = "Symmetric variance-gamma distributions, Stein equation solutions and error bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Density, CDF, quantiles, samples and absolute moments.
    Dist(DistArgs),
    /// Evaluate the Stein solution on a grid, optionally checking its bounds.
    Stein(SteinArgs),
    /// Zero-bias, square-bias and centered equilibrium transforms.
    Transform(TransformArgs),
    /// Distance from a sample file to an SVG law or a second sample.
    Distance(DistanceArgs),
    /// Evaluate one closed-form bound.
    Bound(BoundArgs),
    /// Run a Monte Carlo experiment.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Clone)]
pub struct LawArgs {
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Nonzero selects the asymmetric VG law.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
}

impl LawArgs {
    fn svg(&self) -> Result<SvgParams> {
        if self.theta != 0.0 {
            return Err(Error::InvalidParams("this command needs theta = 0".into()));
        }
        SvgParams::new(self.r, self.sigma, self.mu)
    }

    fn header(&self) -> String {
        format!("r={} sigma={} mu={} theta={}", self.r, self.sigma, self.mu, self.theta)
    }
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Explicit points, comma separated; overrides --from/--to/--points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

impl GridArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        if let Some(x) = &self.x {
            return Ok(x.clone());
        }
        if self.points == 0 || !(self.from <= self.to) {
            return Err(Error::InvalidParams("grid needs points >= 1 and from <= to".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.from]);
        }
        let h = (self.to - self.from) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.from + h * i as f64).collect())
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DistOp {
    Pdf,
    Cdf,
    Quantile,
    Sample,
    Moment,
}

#[derive(Args, Debug)]
pub struct DistArgs {
    #[arg(value_enum)]
    pub op: DistOp,
    #[command(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Sample size.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub k: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SteinArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Test function: sign, indicator:<z>, smoothed:<a>:<eps>, sine:<a> or
    /// constant:<c>.
    #[arg(long, default_value = "sign", allow_hyphen_values = true)]
    pub h: String,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Check every applicable solution bound over the grid.
    #[arg(long)]
    pub verify: bool,
    /// Where the bound report goes (default: stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum TransformMode {
    Sample,
    Density,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Law of W: rademacher, skew, atoms:v@p,..., or svg (with --r/--sigma).
    #[arg(long, default_value = "rademacher")]
    pub spec: String,
    /// zero-bias, square-bias or centered-equilibrium:<r>.
    #[arg(long, default_value = "zero-bias")]
    pub kind: String,
    #[arg(long, value_enum, default_value = "density")]
    pub mode: TransformMode,
    #[command(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    /// kolmogorov (ks), wasserstein (w1) or bounded-wasserstein (bw).
    #[arg(long, default_value = "kolmogorov")]
    pub metric: String,
    /// Sample file, one value per line; `#` lines are skipped.
    #[arg(long)]
    pub sample: PathBuf,
    /// Second sample; when given, the two-sample distance is reported.
    #[arg(long)]
    pub sample2: Option<PathBuf>,
    #[command(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Bound id, e.g. six_moment or product-wasserstein.
    #[arg(long)]
    pub id: String,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub p_exceed: Option<f64>,
    #[arg(long)]
    pub mean_abs_delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k4: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k6: Option<f64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub e_abs_x3: Option<f64>,
    #[arg(long)]
    pub e_abs_y3: Option<f64>,
    #[arg(long)]
    pub e_x4: Option<f64>,
    #[arg(long)]
    pub e_y4: Option<f64>,
    /// Assert E X³ = E Y³ = 0 (needed for product_kolmogorov).
    #[arg(long)]
    pub third_moments_vanish: bool,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub quantile_gap: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub mu_n: Option<f64>,
    #[arg(long)]
    pub mean_abs_xm_delta: Option<f64>,
    #[arg(long)]
    pub sigma_sqrt_nm: Option<f64>,
    #[arg(long)]
    pub dw: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Test function for the Stein solution bounds (see `stein --h`).
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// An observed value to compare with the bound; exit 2 if it exceeds it.
    #[arg(long)]
    pub empirical: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Flat key=value file; flags given here override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// d2, random_sum, vg_compare, inequality_suite, fixed_point or
    /// cf_diagnostic.
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long)]
    pub r2: Option<String>,
    #[arg(long)]
    pub sigma2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<String>,
    /// Summand law: rademacher, skew or atoms:v@p,...
    #[arg(long)]
    pub x: Option<String>,
    /// Comma-separated t grid for cf_diagnostic.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
}

/// Parse `sign`, `indicator:<z>`, `smoothed:<a>:<eps>`, `sine:<a>` or
/// `constant:<c>`.
pub fn parse_test_function(s: &str) -> Result<TestFunction> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<f64> {
        parts
            .get(i)
            .ok_or_else(|| Error::Parse(format!("test function '{s}' is missing a parameter")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad number in test function '{s}'")))
    };
    match parts[0] {
        "sign" => Ok(TestFunction::sign()),
        "indicator" => Ok(TestFunction::indicator(num(1)?)),
        "smoothed" => TestFunction::smoothed_indicator(num(1)?, num(2)?),
        "sine" => TestFunction::sine(num(1)?),
        "constant" => Ok(TestFunction::constant(num(1)?)),
        _ => Err(Error::Parse(format!("unknown test function '{s}'"))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn header(kind: &str, extra: &str) -> String {
    format!("# svgstein {kind} schema={CSV_SCHEMA} {extra}\n")
}

fn dist(a: &DistArgs) -> Result<i32> {
    let l = &a.law;
    let vg = VgParams::new(l.r, l.theta, l.sigma, l.mu)?;
    let svg = vg.symmetric();
    let mut s = header("dist", &format!("op={:?} {} seed={}", a.op, l.header(), a.seed).to_lowercase());
    match a.op {
        DistOp::Sample => {
            let v = match &svg {
                Some(p) => svg_sample(p, a.n, a.seed)?,
                None => vg_sample(&vg, a.n, a.seed)?,
            };
            for x in v {
                let _ = writeln!(s, "{}", fmt_num(x));
            }
        }
        DistOp::Moment => {
            let p = svg.ok_or_else(|| Error::Domain("moments are available for theta = 0 only".into()))?;
            s.push_str("x,value\n");
            for &k in &a.k {
                let _ = writeln!(s, "{},{}", fmt_num(k), fmt_num(svg_absolute_moment(&p, k)?));
            }
        }
        op => {
            s.push_str("x,value\n");
            for x in a.grid.grid()? {
                let v = match (op, &svg) {
                    (DistOp::Pdf, Some(p)) => svg_pdf(p, x)?,
                    (DistOp::Pdf, None) => vg_pdf(&vg, x)?,
                    (DistOp::Cdf, Some(p)) => svg_cdf(p, x)?,
                    (DistOp::Cdf, None) => vg_cdf(&vg, x)?,
                    (DistOp::Quantile, Some(p)) => svg_quantile(p, x)?,
                    _ => return Err(Error::Domain("quantiles are available for theta = 0 only".into())),
                };
                let _ = writeln!(s, "{},{}", fmt_num(x), fmt_num(v));
            }
        }
    }
    emit(a.out.as_deref(), &s)?;
    Ok(0)
}

#[derive(Serialize)]
struct SupRatio {
    bound_id: BoundId,
    sup_ratio: f64,
    argmax_x: f64,
    bound_value: f64,
    empirical: f64,
    test_function: String,
}

fn stein(a: &SteinArgs) -> Result<i32> {
    let p = a.law.svg()?;
    let h = parse_test_function(&a.h)?;
    let sol = SteinSolution::new(p, h.clone())?;
    let xs = a.grid.grid()?;
    let pts = sol.evaluate_grid(&xs)?;
    let res = sol.residual_grid(&xs)?;
    let mut s = header("stein", &format!("{} h={}", a.law.header(), h.label()));
    s.push_str("x,f,f1,f2,residual\n");
    for (pt, r) in pts.iter().zip(&res) {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_num(pt.x),
            fmt_num(pt.f),
            fmt_num(pt.f1),
            fmt_num(pt.f2),
            fmt_num(*r)
        );
    }
    emit(a.out.as_deref(), &s)?;
    if !a.verify {
        return Ok(0);
    }
    let reports = verify_solution_bounds(&p, &[h], &xs)?;
    let rows: Vec<SupRatio> = reports
        .iter()
        .map(|r| SupRatio {
            bound_id: r.bound_id,
            sup_ratio: r.ratio.unwrap_or(f64::NAN),
            argmax_x: r.argmax_x.unwrap_or(f64::NAN),
            bound_value: r.bound_value,
            empirical: r.empirical.unwrap_or(f64::NAN),
            test_function: r.test_function.clone().unwrap_or_default(),
        })
        .collect();
    let json = serde_json::to_string_pretty(&rows)? + "\n";
    match &a.report {
        Some(path) => std::fs::write(path, json)?,
        None => eprint!("{json}"),
    }
    let broken = rows.iter().any(|r| r.sup_ratio > 1.0 + BOUND_TOL);
    Ok(if broken { 2 } else { 0 })
}

fn transform_spec(a: &TransformArgs) -> Result<DistributionSpec> {
    if a.spec == "svg" {
        DistributionSpec::svg(a.law.svg()?)
    } else {
        parse_x_spec(&a.spec)
    }
}

fn transform(a: &TransformArgs) -> Result<i32> {
    let spec = transform_spec(a)?;
    let kind: TransformKind = a.kind.parse()?;
    let mut s = header(
        "transform",
        &format!("spec={} kind={} seed={}", spec.name, a.kind, a.seed),
    );
    match a.mode {
        TransformMode::Sample => {
            for v in transform_sample(&spec, kind, a.n, a.seed)? {
                let _ = writeln!(s, "{}", fmt_num(v));
            }
        }
        TransformMode::Density => {
            s.push_str("x,value\n");
            for x in a.grid.grid()? {
                let v = match transform_density(&spec, kind, x) {
                    Err(Error::Singular(_)) => f64::INFINITY,
                    other => other?,
                };
                let _ = writeln!(s, "{},{}", fmt_num(x), fmt_num(v));
            }
        }
    }
    emit(a.out.as_deref(), &s)?;
    Ok(0)
}

/// Read one value per line, skipping blank and `#` lines.
pub fn read_sample(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{}:{}: not a number: '{l}'", path.display(), i + 1)))
        })
        .collect()
}

fn distance(a: &DistanceArgs) -> Result<i32> {
    let metric: Metric = a.metric.parse()?;
    let x = read_sample(&a.sample)?;
    let v: MetricValue = match &a.sample2 {
        Some(path) => {
            let y = read_sample(path)?;
            match metric {
                Metric::Kolmogorov => distances::kolmogorov_two_sample(&x, &y)?,
                Metric::Wasserstein => distances::wasserstein_two_sample(&x, &y)?,
                Metric::BoundedWasserstein => {
                    return Err(Error::Domain("bounded-wasserstein needs an SVG target".into()))
                }
            }
        }
        None => distances::empirical(metric, &x, &SvgTable::new(a.law.svg()?)?)?,
    };
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&v)? + "\n"))?;
    Ok(0)
}

fn need(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidParams(format!("this bound needs --{}", name.replace('_', "-"))))
}

fn pick(reports: Vec<BoundReport>, id: BoundId) -> Result<BoundReport> {
    reports
        .into_iter()
        .find(|r| r.bound_id == id)
        .ok_or_else(|| Error::InvalidParams(format!("{id} does not apply to the given inputs")))
}

/// Evaluate the bound named by `--id`.
pub fn bound_report(a: &BoundArgs) -> Result<BoundReport> {
    use BoundId::*;
    let id: BoundId = a.id.parse()?;
    let r = || need("r", a.r);
    let sigma = || need("sigma", a.sigma);
    let mut rep = match id {
        CouplingKolmogorov
        | CouplingKolmogorovTransformed
        | CouplingWasserstein
        | CouplingWassersteinTransformed
        | CouplingKolmogorovTransformedMean => {
            let beta = a.beta.unwrap_or(1.0);
            let pe = a.p_exceed.unwrap_or(0.0);
            if matches!(id, CouplingKolmogorov | CouplingKolmogorovTransformed) {
                need("beta", a.beta)?;
                need("p_exceed", a.p_exceed)?;
            }
            pick(
                bounds::general_coupling_bounds(r()?, sigma()?, beta, pe, a.mean_abs_delta)?,
                id,
            )?
        }
        VgSvgWasserstein | VgSvgKolmogorov => {
            let p1 = VgParams::new(r()?, a.theta.unwrap_or(0.0), sigma()?, a.mu.unwrap_or(0.0))?;
            let p2 = SvgParams::new(need("r2", a.r2)?, need("sigma2", a.sigma2)?, a.mu2.unwrap_or(0.0))?;
            pick(bounds::vg_svg_bounds(&p1, &p2).to_vec(), id)?
        }
        SixMoment => bounds::six_moment_bound(
            r()?,
            sigma()?,
            need("k2", a.k2)?,
            a.k3.unwrap_or(0.0),
            need("k4", a.k4)?,
            need("k6", a.k6)?,
        )?,
        ProductWasserstein | ProductKolmogorov => {
            let m = a.m.ok_or_else(|| Error::InvalidParams("this bound needs --m".into()))?;
            let n = a.n.ok_or_else(|| Error::InvalidParams("this bound needs --n".into()))?;
            pick(
                bounds::product_clt_bounds(
                    m,
                    n,
                    a.e_abs_x3.unwrap_or(1.0),
                    a.e_abs_y3.unwrap_or(1.0),
                    a.e_x4,
                    a.e_y4,
                    a.third_moments_vanish,
                )?
                .to_vec(),
                id,
            )?
        }
        RandomSumWasserstein | RandomSumKolmogorov | GeometricSumKolmogorov | GeometricSumWasserstein
        | GeometricSumBoundedWasserstein => {
            let inp = RandomSumInputs {
                p_geo: a.p,
                sigma: sigma()?,
                rho: a.rho,
                quantile_gap: a.quantile_gap,
                c: a.c,
                k: a.k,
                mu_n: a.mu_n,
                mean_abs_xm_delta: a.mean_abs_xm_delta,
                sigma_sqrt_nm: a.sigma_sqrt_nm,
            };
            pick(bounds::random_sum_bounds(&inp)?, id)?
        }
        KolmogorovFromWasserstein => bounds::kolmogorov_from_wasserstein_report(
            &SvgParams::new(r()?, sigma()?, 0.0)?,
            need("dw", a.dw)?,
        )?,
        Concentration => bounds::concentration_report(
            &SvgParams::new(r()?, sigma()?, 0.0)?,
            need("alpha", a.alpha)?,
        )?,
        _ => {
            let p = SvgParams::new(r()?, sigma()?, a.mu.unwrap_or(0.0))?;
            let h = parse_test_function(a.h.as_deref().unwrap_or("sign"))?;
            pick(verify_solution_bounds(&p, &[h], &a.grid.grid()?)?, id)?
        }
    };
    if let Some(e) = a.empirical {
        rep.compare(e);
    }
    Ok(rep)
}

fn bound(a: &BoundArgs) -> Result<i32> {
    let rep = bound_report(a)?;
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&rep)? + "\n"))?;
    let broken = rep.valid && rep.ratio.is_some_and(|q| q > 1.0 + BOUND_TOL);
    Ok(if broken { 2 } else { 0 })
}

fn experiment(a: &ExperimentArgs) -> Result<i32> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path)?;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            pairs.push((k.trim().into(), v.trim().into()));
        }
    }
    let flags = [
        ("experiment", &a.experiment),
        ("m", &a.m),
        ("n", &a.n),
        ("p", &a.p),
        ("trials", &a.trials),
        ("seed", &a.seed),
        ("out", &a.out),
        ("format", &a.format),
        ("r", &a.r),
        ("sigma", &a.sigma),
        ("mu", &a.mu),
        ("theta", &a.theta),
        ("r2", &a.r2),
        ("sigma2", &a.sigma2),
        ("mu2", &a.mu2),
        ("x", &a.x),
        ("t", &a.t),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            pairs.push((k.into(), v.clone()));
        }
    }
    let config = ExperimentConfig::from_pairs(pairs)?;
    let out = experiments::run(&config)?;
    experiments::write_output(&config, &out)?;
    Ok(if out.has_violation() { 2 } else { 0 })
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Dist(a) => dist(a),
        Command::Stein(a) => stein(a),
        Command::Transform(a) => transform(a),
        Command::Distance(a) => distance(a),
        Command::Bound(a) => bound(a),
        Command::Experiment(a) => experiment(a),
    }
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn test_function_names() {
        assert_eq!(parse_test_function("indicator:0.5").unwrap().label(), TestFunction::indicator(0.5).label());
        assert!(parse_test_function("sine").is_err());
        assert!(parse_test_function("cosine:1").is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = GridArgs { x: None, from: -1.0, to: 1.0, points: 5 };
        assert_eq!(g.grid().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
