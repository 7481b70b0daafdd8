//! Python bindings. Structured results (bound reports, experiment output)
//! come back as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use svgstein::bounds::{d2_bounds, six_moment_bound};
use svgstein::distances::{kolmogorov_from_wasserstein, kolmogorov_to_svg, wasserstein_to_svg};
use svgstein::experiments::{run, to_json, ExperimentConfig};
use svgstein::special_functions;
use svgstein::stein_solver::{verify_solution_bounds, SteinSolution, TestFunction};
use svgstein::svg_distribution as svg;
use svgstein::SvgParams;

fn err(e: svgstein::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn params(r: f64, sigma: f64, mu: f64) -> PyResult<SvgParams> {
    SvgParams::new(r, sigma, mu).map_err(err)
}

fn each<F: Fn(f64) -> svgstein::Result<f64>>(xs: Vec<f64>, f: F) -> PyResult<Vec<f64>> {
    xs.into_iter().map(|x| f(x).map_err(err)).collect()
}

/// Parses `sign`, `indicator:z`, `smoothed:a:eps`, `sine:a`, `constant:c`.
fn test_function(h: &str) -> PyResult<TestFunction> {
    let parts: Vec<&str> = h.split(':').collect();
    let num = |i: usize| -> PyResult<f64> {
        parts
            .get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PyValueError::new_err(format!("bad test function '{h}'")))
    };
    match parts[0] {
        "sign" => Ok(TestFunction::sign()),
        "indicator" => Ok(TestFunction::indicator(num(1)?)),
        "smoothed" => TestFunction::smoothed_indicator(num(1)?, num(2)?).map_err(err),
        "sine" => TestFunction::sine(num(1)?).map_err(err),
        "constant" => Ok(TestFunction::constant(num(1)?)),
        _ => Err(PyValueError::new_err(format!("unknown test function '{h}'"))),
    }
}

#[pyfunction]
#[pyo3(signature = (nu, x, scaled=false))]
fn bessel_i(nu: f64, x: f64, scaled: bool) -> PyResult<f64> {
    special_functions::bessel_i(nu, x, scaled).map(|v| v.value()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (nu, x, scaled=false))]
fn bessel_k(nu: f64, x: f64, scaled: bool) -> PyResult<f64> {
    special_functions::bessel_k(nu, x, scaled).map(|v| v.value()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (xs, r, sigma=1.0, mu=0.0))]
fn svg_pdf(xs: Vec<f64>, r: f64, sigma: f64, mu: f64) -> PyResult<Vec<f64>> {
    let p = params(r, sigma, mu)?;
    each(xs, |x| svg::svg_pdf(&p, x))
}

#[pyfunction]
#[pyo3(signature = (xs, r, sigma=1.0, mu=0.0))]
fn svg_cdf(xs: Vec<f64>, r: f64, sigma: f64, mu: f64) -> PyResult<Vec<f64>> {
    let p = params(r, sigma, mu)?;
    each(xs, |x| svg::svg_cdf(&p, x))
}

#[pyfunction]
#[pyo3(signature = (us, r, sigma=1.0, mu=0.0))]
fn svg_quantile(us: Vec<f64>, r: f64, sigma: f64, mu: f64) -> PyResult<Vec<f64>> {
    let p = params(r, sigma, mu)?;
    each(us, |u| svg::svg_quantile(&p, u))
}

#[pyfunction]
#[pyo3(signature = (n, r, sigma=1.0, mu=0.0, seed=1))]
fn svg_sample(n: usize, r: f64, sigma: f64, mu: f64, seed: u64) -> PyResult<Vec<f64>> {
    svg::svg_sample(&params(r, sigma, mu)?, n, seed).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, r, sigma=1.0))]
fn svg_absolute_moment(k: f64, r: f64, sigma: f64) -> PyResult<f64> {
    svg::svg_absolute_moment(&params(r, sigma, 0.0)?, k).map_err(err)
}

/// Rows `(x, f, f', f'')` of the Stein solution for test function `h`.
#[pyfunction]
#[pyo3(signature = (xs, h, r, sigma=1.0, mu=0.0))]
fn stein_solve(xs: Vec<f64>, h: &str, r: f64, sigma: f64, mu: f64) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let sol = SteinSolution::new(params(r, sigma, mu)?, test_function(h)?).map_err(err)?;
    let pts = sol.evaluate_grid(&xs).map_err(err)?;
    Ok(pts.into_iter().map(|p| (p.x, p.f, p.f1, p.f2)).collect())
}

/// Bound reports for `h` over `xs`, as a JSON array.
#[pyfunction]
#[pyo3(signature = (xs, h, r, sigma=1.0, mu=0.0))]
fn verify_bounds(xs: Vec<f64>, h: &str, r: f64, sigma: f64, mu: f64) -> PyResult<String> {
    let reps = verify_solution_bounds(&params(r, sigma, mu)?, &[test_function(h)?], &xs).map_err(err)?;
    json(&reps)
}

#[pyfunction]
#[pyo3(signature = (sample, metric, r, sigma=1.0, mu=0.0))]
fn distance_to_svg(sample: Vec<f64>, metric: &str, r: f64, sigma: f64, mu: f64) -> PyResult<f64> {
    let p = params(r, sigma, mu)?;
    match metric {
        "kolmogorov" => kolmogorov_to_svg(&sample, &p),
        "wasserstein" => wasserstein_to_svg(&sample, &p),
        _ => return Err(PyValueError::new_err(format!("unknown metric '{metric}'"))),
    }
    .map(|v| v.value)
    .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (dw, r, sigma=1.0))]
fn kolmogorov_bound_from_wasserstein(dw: f64, r: f64, sigma: f64) -> PyResult<f64> {
    kolmogorov_from_wasserstein(&params(r, sigma, 0.0)?, dw).map_err(err)
}

#[pyfunction]
fn six_moment(r: f64, sigma: f64, k2: f64, k3: f64, k4: f64, k6: f64) -> PyResult<String> {
    json(&six_moment_bound(r, sigma, k2, k3, k4, k6).map_err(err)?)
}

#[pyfunction]
fn d2(m: u64, n: u64) -> PyResult<String> {
    json(&d2_bounds(m, n).map_err(err)?)
}

/// Runs an experiment from flat `key=value` text and returns the JSON
/// document the CLI would write.
#[pyfunction]
fn run_experiment(config: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::parse(config).map_err(err)?;
    let out = run(&cfg).map_err(err)?;
    to_json(&cfg, &out).map_err(err)
}

#[pymodule]
fn svgstein_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k, m)?)?;
    m.add_function(wrap_pyfunction!(svg_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(svg_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(svg_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(svg_sample, m)?)?;
    m.add_function(wrap_pyfunction!(svg_absolute_moment, m)?)?;
    m.add_function(wrap_pyfunction!(stein_solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(distance_to_svg, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_bound_from_wasserstein, m)?)?;
    m.add_function(wrap_pyfunction!(six_moment, m)?)?;
    m.add_function(wrap_pyfunction!(d2, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
