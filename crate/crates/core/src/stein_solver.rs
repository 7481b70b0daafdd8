//! Solution of the SVG(r, σ, μ) Stein equation
//!
//! `σ²(x−μ) f''(x) + σ² r f'(x) − (x−μ) f(x) = h̃(x)`,  `h̃ = h − E h(Z)`,
//!
//! and its derivatives for a given test function.
//!
//! Work happens on the standard scale `y = (x−μ)/σ`, where `f(x) = F(y)/σ`
//! and `F` solves `y F'' + r F' − y F = H̃(y)`. For `y > 0`
//!
//! `F(y) = −I_ν(y) K_ν(y) [Ã(y) + B̃(y)]`,
//! `F'(y) = I_ν(y) K_{ν+1}(y) Ã(y) − I_{ν+1}(y) K_ν(y) B̃(y)`,
//!
//! with `Ã(y) = ∫_0^y (t/y)^ν I_ν(t)/I_ν(y) H̃(t) dt` and
//! `B̃(y) = ∫_y^∞ (t/y)^ν K_ν(t)/K_ν(y) H̃(t) dt`. Both weights lie in
//! `[0, 1]`, so nothing overflows. Negative `y` uses the mirrored test
//! function: `F(−y) = −F_g(y)` with `g(s) = H̃(−s)`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bounds::{BoundId, BoundReport};
use crate::quadrature::Quadrature;
use crate::special_functions::{
    bessel_i, bessel_k, integrate_power_singular, k_tail_end, lgam, ln_bessel_i, ln_bessel_k,
};
use crate::svg_distribution::{std_pdf, svg_cdf, SvgParams};
use crate::{Error, Result};

/// Which one-sided limit to take at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied Lipschitz test function.
#[derive(Clone)]
pub struct LipschitzFn {
    pub f: RealFn,
    /// Derivative where it exists; central differences otherwise.
    pub df: Option<RealFn>,
    /// Kinks, used as quadrature breakpoints.
    pub kinks: Vec<f64>,
    pub name: String,
}

impl fmt::Debug for LipschitzFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LipschitzFn({})", self.name)
    }
}

#[derive(Clone, Debug)]
pub enum TestKind {
    /// `1(x ≤ z)`.
    Indicator { z: f64 },
    /// 1 for `x ≤ a − ε`, 0 for `x ≥ a`, linear in between.
    SmoothedIndicator { a: f64, eps: f64 },
    /// 1 for `x ≥ 0`, −1 otherwise.
    Sign,
    /// `sin(a x)/a`.
    Sine { a: f64 },
    Constant { c: f64 },
    Lipschitz(LipschitzFn),
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    pub kind: TestKind,
    /// Upper bound for `‖h̃‖`.
    pub htilde_sup: Option<f64>,
    /// `‖h'‖`.
    pub lip_const: Option<f64>,
}

impl TestFunction {
    pub fn indicator(z: f64) -> Self {
        TestFunction {
            kind: TestKind::Indicator { z },
            htilde_sup: Some(1.0),
            lip_const: None,
        }
    }

    pub fn smoothed_indicator(a: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
        }
        Ok(TestFunction {
            kind: TestKind::SmoothedIndicator { a, eps },
            htilde_sup: Some(1.0),
            lip_const: Some(1.0 / eps),
        })
    }

    pub fn sign() -> Self {
        TestFunction {
            kind: TestKind::Sign,
            htilde_sup: Some(2.0),
            lip_const: None,
        }
    }

    pub fn sine(a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParams(format!("sine frequency must be nonzero, got {a}")));
        }
        Ok(TestFunction {
            kind: TestKind::Sine { a },
            htilde_sup: Some(2.0 / a.abs()),
            lip_const: Some(1.0),
        })
    }

    pub fn constant(c: f64) -> Self {
        TestFunction {
            kind: TestKind::Constant { c },
            htilde_sup: Some(0.0),
            lip_const: Some(0.0),
        }
    }

    pub fn lipschitz(f: LipschitzFn, lip_const: f64, htilde_sup: Option<f64>) -> Self {
        TestFunction {
            kind: TestKind::Lipschitz(f),
            htilde_sup,
            lip_const: Some(lip_const),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            TestKind::Indicator { z } => format!("indicator(z={z})"),
            TestKind::SmoothedIndicator { a, eps } => format!("smoothed_indicator(a={a},eps={eps})"),
            TestKind::Sign => "sign".into(),
            TestKind::Sine { a } => format!("sine(a={a})"),
            TestKind::Constant { c } => format!("constant({c})"),
            TestKind::Lipschitz(l) => l.name.clone(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            TestKind::Indicator { z } => {
                if x <= *z {
                    1.0
                } else {
                    0.0
                }
            }
            TestKind::SmoothedIndicator { a, eps } => ((a - x) / eps).clamp(0.0, 1.0),
            TestKind::Sign => {
                if x >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            TestKind::Sine { a } => (a * x).sin() / a,
            TestKind::Constant { c } => *c,
            TestKind::Lipschitz(l) => (l.f)(x),
        }
    }

    /// One-sided limit of `h` at `x`.
    pub fn eval_side(&self, x: f64, side: Side) -> f64 {
        match (&self.kind, side) {
            (TestKind::Indicator { z }, Side::Right) if x == *z => 0.0,
            (TestKind::Sign, Side::Left) if x == 0.0 => -1.0,
            _ => self.eval(x),
        }
    }

    /// `h'(x)` for the Lipschitz kinds.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match &self.kind {
            TestKind::SmoothedIndicator { a, eps } => {
                Some(if x > a - eps && x < *a { -1.0 / eps } else { 0.0 })
            }
            TestKind::Sine { a } => Some((a * x).cos()),
            TestKind::Constant { .. } => Some(0.0),
            TestKind::Lipschitz(l) => Some(match &l.df {
                Some(df) => df(x),
                None => {
                    let h = 1e-6 * (1.0 + x.abs());
                    ((l.f)(x + h) - (l.f)(x - h)) / (2.0 * h)
                }
            }),
            TestKind::Indicator { .. } | TestKind::Sign => None,
        }
    }

    pub fn is_lipschitz(&self) -> bool {
        self.lip_const.is_some()
    }

    /// Jumps and kinks of `h`.
    pub fn breaks(&self) -> Vec<f64> {
        match &self.kind {
            TestKind::Indicator { z } => vec![*z],
            TestKind::SmoothedIndicator { a, eps } => vec![a - eps, *a],
            TestKind::Sign => vec![0.0],
            TestKind::Lipschitz(l) => l.kinks.clone(),
            _ => Vec::new(),
        }
    }

    /// `(h(−∞), h(∞))` where they exist.
    pub fn limits(&self) -> Option<(f64, f64)> {
        match &self.kind {
            TestKind::Indicator { .. } | TestKind::SmoothedIndicator { .. } => Some((1.0, 0.0)),
            TestKind::Sign => Some((-1.0, 1.0)),
            TestKind::Constant { c } => Some((*c, *c)),
            _ => None,
        }
    }

    /// `E h(Z)` for `Z ~ SVG(r, σ, μ)`.
    pub fn mean(&self, p: &SvgParams) -> Result<f64> {
        match &self.kind {
            TestKind::Indicator { z } => svg_cdf(p, *z),
            TestKind::Sign => Ok(1.0 - 2.0 * svg_cdf(p, 0.0)?),
            TestKind::Sine { a } => {
                Ok((a * p.mu).sin() * (1.0 + (p.sigma * a).powi(2)).powf(-0.5 * p.r) / a)
            }
            TestKind::Constant { c } => Ok(*c),
            TestKind::SmoothedIndicator { a, eps } => {
                let quad = Quadrature::with_tolerance(1e-14, 1e-12);
                let mut pts = vec![0.0, *eps];
                let s0 = a - p.mu;
                if s0 > 0.0 && s0 < *eps {
                    pts.insert(1, s0);
                }
                let v = quad.integrate_breaks(|s| svg_cdf(p, a - s).unwrap_or(f64::NAN), &pts)?;
                Ok(v.value / eps)
            }
            TestKind::Lipschitz(l) => {
                let f = l.f.clone();
                let breaks: Vec<f64> = l.kinks.iter().map(|k| (k - p.mu) / p.sigma).collect();
                expect_standard(p.nu(), |t| f(p.mu + p.sigma * t), &breaks)
            }
        }
    }
}

/// `E g(Z)` for `Z ~ SVG(r, 1, 0)`.
pub(crate) fn expect_standard<G: Fn(f64) -> f64>(nu: f64, g: G, breaks: &[f64]) -> Result<f64> {
    let quad = Quadrature::with_tolerance(1e-15, 1e-12);
    let mut total = 0.0;
    for dir in [1.0, -1.0] {
        let side: Vec<f64> = breaks.iter().map(|b| dir * b).filter(|b| *b > 0.0).collect();
        let w = |t: f64| std_pdf(nu, t) * g(dir * t);
        total += half_line_integral(&quad, w, nu, &side, k_tail_end(nu, 0.0))?;
    }
    Ok(total)
}

/// `∫_0^end w`, where `w(t)` may behave like `t^{2ν}` (or `log t`) at 0.
fn half_line_integral<W: Fn(f64) -> f64>(
    quad: &Quadrature,
    w: W,
    nu: f64,
    breaks: &[f64],
    end: f64,
) -> Result<f64> {
    let first = breaks.iter().cloned().fold(1f64, f64::min).min(end);
    let alpha = singular_power(nu);
    let mut total = integrate_power_singular(quad, &w, first, alpha)?;
    total += integrate_segment(quad, &w, first, end, breaks)?;
    Ok(total)
}

fn singular_power(nu: f64) -> f64 {
    if nu < 0.0 {
        2.0 * nu
    } else if nu == 0.0 {
        -0.5
    } else {
        0.0
    }
}

/// `∫_a^b f` with the breakpoints inside `(a, b)` and geometric panels
/// for long ranges.
fn integrate_segment<F: Fn(f64) -> f64>(
    quad: &Quadrature,
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    let mut pts = vec![a];
    let mut step = 1.0;
    let mut t = a + step;
    while t < b {
        pts.push(t);
        step *= 2.0;
        t += step;
    }
    pts.extend(breaks.iter().cloned().filter(|&c| c > a && c < b));
    pts.push(b);
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup();
    Ok(quad.integrate_breaks(f, &pts)?.value)
}

/// `f`, `f'`, `f''`, `f'''` at a point; the last two are NaN at `x = μ`
/// and `f'''` is NaN when `h` has no derivative.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolutionPoint {
    pub x: f64,
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

/// Evaluator for the Stein solution of one test function.
#[derive(Clone, Debug)]
pub struct SteinSolution {
    pub params: SvgParams,
    pub h: TestFunction,
    pub quad: Quadrature,
    /// `E h(Z)`.
    pub h_mean: f64,
}

struct Bessel4 {
    ln_i: f64,
    ln_k: f64,
    ik: f64,
    ik1: f64,
    i1k: f64,
}

fn bessel4(nu: f64, y: f64) -> Result<Bessel4> {
    let i = bessel_i(nu, y, true)?.scale_exp(y);
    let i1 = bessel_i(nu + 1.0, y, true)?.scale_exp(y);
    let k = bessel_k(nu, y, true)?.scale_exp(-y);
    let k1 = bessel_k(nu + 1.0, y, true)?.scale_exp(-y);
    Ok(Bessel4 {
        ln_i: i.ln(),
        ln_k: k.ln(),
        ik: i.mul(k).value(),
        ik1: i.mul(k1).value(),
        i1k: i1.mul(k).value(),
    })
}

impl SteinSolution {
    pub fn new(params: SvgParams, h: TestFunction) -> Result<Self> {
        let h_mean = h.mean(&params)?;
        Ok(SteinSolution {
            params,
            h,
            quad: Quadrature::with_tolerance(1e-15, 1e-12),
            h_mean,
        })
    }

    pub fn with_quadrature(mut self, quad: Quadrature) -> Self {
        self.quad = quad;
        self
    }

    fn nu(&self) -> f64 {
        self.params.nu()
    }

    pub fn htilde(&self, x: f64) -> f64 {
        self.h.eval(x) - self.h_mean
    }

    /// `‖h̃‖`, exact for the built-in kinds.
    pub fn htilde_sup(&self) -> Option<f64> {
        let m = self.h_mean;
        match &self.h.kind {
            TestKind::Indicator { .. } | TestKind::SmoothedIndicator { .. } => {
                Some(m.max(1.0 - m))
            }
            TestKind::Sign => Some(1.0 + m.abs()),
            TestKind::Sine { a } => Some(1.0 / a.abs() + m.abs()),
            TestKind::Constant { .. } => Some(0.0),
            TestKind::Lipschitz(_) => self.h.htilde_sup,
        }
    }

    /// `(h̃(−∞), h̃(∞))` where they exist.
    pub fn htilde_limits(&self) -> Option<(f64, f64)> {
        self.h
            .limits()
            .map(|(a, b)| (a - self.h_mean, b - self.h_mean))
    }

    /// Standard-scale test function on one half line.
    fn g(&self, mirror: bool) -> impl Fn(f64) -> f64 + '_ {
        let (mu, s, m) = (self.params.mu, self.params.sigma, self.h_mean);
        let dir = if mirror { -1.0 } else { 1.0 };
        move |t: f64| self.h.eval(mu + s * dir * t) - m
    }

    fn std_breaks(&self, mirror: bool) -> Vec<f64> {
        let dir = if mirror { -1.0 } else { 1.0 };
        let mut b: Vec<f64> = self
            .h
            .breaks()
            .iter()
            .map(|c| dir * (c - self.params.mu) / self.params.sigma)
            .filter(|c| *c > 0.0)
            .collect();
        b.sort_by(|x, y| x.total_cmp(y));
        b
    }

    /// `(F, F')` at increasing `ys > 0` for the half line `mirror`
    /// selects, by cumulative recursion of `Ã` upward and `B̃` downward.
    fn half_line(&self, mirror: bool, ys: &[f64]) -> Result<Vec<(f64, f64)>> {
        if ys.is_empty() {
            return Ok(Vec::new());
        }
        let nu = self.nu();
        let g = self.g(mirror);
        let breaks = self.std_breaks(mirror);
        let quad = &self.quad;
        let b4: Vec<Bessel4> = ys.iter().map(|&y| bessel4(nu, y)).collect::<Result<_>>()?;

        let wa = |t: f64, y: f64, ln_iy: f64| -> f64 {
            if t <= 0.0 {
                return 0.0;
            }
            match ln_bessel_i(nu, t) {
                Ok(li) => (nu * (t / y).ln() + li - ln_iy).exp(),
                Err(_) => 0.0,
            }
        };
        let wb = |t: f64, y: f64, ln_ky: f64| -> f64 {
            match ln_bessel_k(nu, t) {
                Ok(lk) => (nu * (t / y).ln() + lk - ln_ky).exp(),
                Err(_) => 0.0,
            }
        };

        let n = ys.len();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        // Ã from 0 to the first point.
        {
            let y = ys[0];
            let f = |t: f64| wa(t, y, b4[0].ln_i) * g(t);
            let first = breaks.iter().cloned().filter(|c| *c < y).fold(y, f64::min);
            let mut v = if nu < 0.0 {
                integrate_power_singular(quad, &f, first, 2.0 * nu)?
            } else {
                quad.integrate(&f, 0.0, first)?.value
            };
            v += integrate_segment(quad, &f, first, y, &breaks)?;
            a[0] = v;
        }
        for k in 1..n {
            let (y0, y1) = (ys[k - 1], ys[k]);
            let rho = (nu * (y0 / y1).ln() + b4[k - 1].ln_i - b4[k].ln_i).exp();
            let f = |t: f64| wa(t, y1, b4[k].ln_i) * g(t);
            a[k] = rho * a[k - 1] + integrate_segment(quad, f, y0, y1, &breaks)?;
        }
        // B̃ from the last point to the truncation end.
        {
            let y = ys[n - 1];
            let f = |t: f64| wb(t, y, b4[n - 1].ln_k) * g(t);
            b[n - 1] = integrate_segment(quad, f, y, k_tail_end(nu, y), &breaks)?;
        }
        for k in (0..n - 1).rev() {
            let (y0, y1) = (ys[k], ys[k + 1]);
            let rho = (nu * (y1 / y0).ln() + b4[k + 1].ln_k - b4[k].ln_k).exp();
            let f = |t: f64| wb(t, y0, b4[k].ln_k) * g(t);
            b[k] = rho * b[k + 1] + integrate_segment(quad, f, y0, y1, &breaks)?;
        }
        Ok((0..n)
            .map(|k| {
                let q = &b4[k];
                let f = -q.ik * (a[k] + b[k]);
                let f1 = q.ik1 * a[k] - q.i1k * b[k];
                (f, f1)
            })
            .collect())
    }

    /// `F(0)` on the standard scale: `−∫_0^∞ t^ν K_ν(t) H̃(t) dt / (2^ν Γ(ν+1))`.
    fn f_at_zero(&self) -> Result<f64> {
        let nu = self.nu();
        let g = self.g(false);
        let breaks = self.std_breaks(false);
        let w = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            match ln_bessel_k(nu, t) {
                Ok(lk) => (nu * t.ln() + lk).exp() * g(t),
                Err(_) => 0.0,
            }
        };
        let raw = half_line_integral(&self.quad, w, nu, &breaks, k_tail_end(nu, 0.0))?;
        Ok(-raw / (nu * LN_2 + lgam(nu + 1.0)).exp())
    }

    /// `H̃(0±)/r`, the one-sided standard-scale `F'(0±)`.
    fn f1_at_zero(&self, side: Side) -> f64 {
        (self.h.eval_side(self.params.mu, side) - self.h_mean) / self.params.r
    }

    /// Evaluate at every `x` (any order); work is shared along each half line.
    pub fn evaluate_grid(&self, xs: &[f64]) -> Result<Vec<SolutionPoint>> {
        let (mu, s) = (self.params.mu, self.params.sigma);
        let mut pos: Vec<(f64, usize)> = Vec::new();
        let mut neg: Vec<(f64, usize)> = Vec::new();
        let mut zero: Vec<usize> = Vec::new();
        for (i, &x) in xs.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::Domain(format!("cannot evaluate at {x}")));
            }
            let y = (x - mu) / s;
            if y > 0.0 {
                pos.push((y, i));
            } else if y < 0.0 {
                neg.push((-y, i));
            } else {
                zero.push(i);
            }
        }
        let mut std = vec![(0.0, 0.0, f64::NAN); xs.len()];
        for (mirror, list) in [(false, &mut pos), (true, &mut neg)] {
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut ys: Vec<f64> = list.iter().map(|p| p.0).collect();
            ys.dedup();
            let vals = self.half_line(mirror, &ys)?;
            for &(y, i) in list.iter() {
                let k = ys.partition_point(|v| *v < y);
                let (f, f1) = vals[k];
                std[i] = if mirror { (-f, f1, -y) } else { (f, f1, y) };
            }
        }
        if !zero.is_empty() {
            let f0 = self.f_at_zero()?;
            let r = self.f1_at_zero(Side::Right);
            let l = self.f1_at_zero(Side::Left);
            let f1 = if r == l { r } else { f64::NAN };
            for i in zero {
                std[i] = (f0, f1, 0.0);
            }
        }
        let r = self.params.r;
        Ok(xs
            .iter()
            .zip(std)
            .map(|(&x, (f, f1, y))| {
                let (f2, f3) = if y == 0.0 {
                    (f64::NAN, f64::NAN)
                } else {
                    let ht = self.htilde(x);
                    let f2 = (ht + y * f - r * f1) / y;
                    let f3 = match self.h.derivative(x) {
                        Some(dh) => (s * dh + f + y * f1 - (r + 1.0) * f2) / y,
                        None => f64::NAN,
                    };
                    (f2, f3)
                };
                SolutionPoint {
                    x,
                    f: f / s,
                    f1: f1 / (s * s),
                    f2: f2 / (s * s * s),
                    f3: f3 / (s * s * s * s),
                }
            })
            .collect())
    }

    pub fn evaluate(&self, x: f64) -> Result<SolutionPoint> {
        Ok(self.evaluate_grid(&[x])?[0])
    }

    /// `f(x)`.
    pub fn solve(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.f)
    }

    /// `f'(x)`; at `x = μ` this is `h̃(μ)/(σ² r)`.
    pub fn solve_d1(&self, x: f64) -> Result<f64> {
        if x == self.params.mu {
            let s2 = self.params.sigma * self.params.sigma;
            return Ok(self.htilde(x) / (s2 * self.params.r));
        }
        Ok(self.evaluate(x)?.f1)
    }

    /// One-sided `f'(x±)`; differs from [`Self::solve_d1`] only where `h`
    /// jumps at `μ`.
    pub fn solve_d1_side(&self, x: f64, side: Side) -> Result<f64> {
        if x == self.params.mu {
            let s2 = self.params.sigma * self.params.sigma;
            return Ok(self.f1_at_zero(side) / s2);
        }
        self.solve_d1(x)
    }

    /// `f''(x)` from the Stein equation; undefined at `x = μ`.
    pub fn solve_d2(&self, x: f64) -> Result<f64> {
        if x == self.params.mu {
            return Err(Error::Domain(
                "f'' is not determined by the equation at x = mu".into(),
            ));
        }
        Ok(self.evaluate(x)?.f2)
    }

    /// Residual of `σ²(x−μ)f'' + σ²r f' − (x−μ)f = h̃` with `f''` taken as a
    /// central difference of `f'`, so `f` and `f'` are checked against each
    /// other. NaN within the difference step of `μ` or a break of `h`.
    pub fn residual_grid(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let (mu, s, r) = (self.params.mu, self.params.sigma, self.params.r);
        let step = |x: f64| 1e-4 * s * (1.0 + ((x - mu) / s).abs());
        let mut all = Vec::with_capacity(3 * xs.len());
        for &x in xs {
            let h = step(x);
            all.extend([x, x - h, x + h]);
        }
        let pts = self.evaluate_grid(&all)?;
        let breaks = self.h.breaks();
        Ok(xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let h = step(x);
                let near = |c: f64| (x - c).abs() <= 1.5 * h;
                if near(mu) || breaks.iter().any(|&b| near(b)) {
                    return f64::NAN;
                }
                let (p, lo, hi) = (pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]);
                let f2 = (hi.f1 - lo.f1) / (2.0 * h);
                s * s * (x - mu) * f2 + s * s * r * p.f1 - (x - mu) * p.f - self.htilde(x)
            })
            .collect())
    }

    /// `T_r f'(x) = (x−μ) f''(x) + r f'(x)`.
    pub fn apply_t_r(&self, x: f64) -> Result<f64> {
        let p = self.evaluate(x)?;
        let d = x - self.params.mu;
        if d == 0.0 {
            return Ok(self.params.r * self.solve_d1(x)?);
        }
        Ok(d * p.f2 + self.params.r * p.f1)
    }

    /// The solution through the other representation,
    /// `−(K_ν/|y|^ν)∫_0^y … + (I_ν/|y|^ν)∫_{−∞}^y |t|^ν K_ν(|t|) H̃(t) dt`.
    ///
    /// The second integral is a difference of O(1) terms times `I_ν(|y|)`,
    /// so this is only accurate for moderate `|x − μ|/σ`.
    pub fn solve_alternate(&self, x: f64) -> Result<f64> {
        let (mu, s) = (self.params.mu, self.params.sigma);
        let y = (x - mu) / s;
        if y == 0.0 {
            return self.solve(x);
        }
        let mirror = y < 0.0;
        let ya = y.abs();
        let nu = self.nu();
        let g = self.g(mirror);
        let breaks = self.std_breaks(mirror);
        let b4 = bessel4(nu, ya)?;
        let wa = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            match ln_bessel_i(nu, t) {
                Ok(li) => (nu * (t / ya).ln() + li - b4.ln_i).exp() * g(t),
                Err(_) => 0.0,
            }
        };
        let first = breaks.iter().cloned().filter(|c| *c < ya).fold(ya, f64::min);
        let mut a = if nu < 0.0 {
            integrate_power_singular(&self.quad, &wa, first, 2.0 * nu)?
        } else {
            self.quad.integrate(&wa, 0.0, first)?.value
        };
        a += integrate_segment(&self.quad, &wa, first, ya, &breaks)?;
        let kw = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            match ln_bessel_k(nu, t) {
                Ok(lk) => (nu * t.ln() + lk).exp(),
                Err(_) => 0.0,
            }
        };
        // ∫_{−∞}^0 over the opposite half line, then ∫_0^y on this one.
        let other = self.g(!mirror);
        let other_breaks = self.std_breaks(!mirror);
        let far = half_line_integral(
            &self.quad,
            |t| kw(t) * other(t),
            nu,
            &other_breaks,
            k_tail_end(nu, 0.0),
        )?;
        let near = half_line_integral(&self.quad, |t| kw(t) * g(t), nu, &breaks, ya)?;
        let i_over = (b4.ln_i - nu * ya.ln()).exp();
        let f = -b4.ik * a + i_over * (far + near);
        let f = if mirror { -f } else { f };
        Ok(f / s)
    }
}

/// Quantities bounded by the solution estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Quantity {
    F,
    F1,
    F2,
    XF,
    XF1,
    XF2,
    XF3,
    Tr,
    TrPrime,
}

fn quantity(q: Quantity, p: &SolutionPoint, params: &SvgParams) -> f64 {
    let d = p.x - params.mu;
    let (r, s2) = (params.r, params.sigma * params.sigma);
    match q {
        Quantity::F => p.f,
        Quantity::F1 => p.f1,
        Quantity::F2 => p.f2,
        Quantity::XF => d * p.f,
        Quantity::XF1 => d * p.f1,
        Quantity::XF2 => d * p.f2,
        Quantity::XF3 => d * p.f3,
        Quantity::Tr => s2 * (d * p.f2 + r * p.f1),
        Quantity::TrPrime => s2 * (d * p.f3 + (r + 1.0) * p.f2),
    }
}

/// The solution estimates: `(id, quantity, constant, uses ‖h'‖)`; each
/// bound is `constant · ‖h̃‖` or `constant · ‖h'‖`.
fn solution_bounds(p: &SvgParams) -> Vec<(BoundId, Quantity, f64, bool)> {
    let (r, s) = (p.r, p.sigma);
    let gr = (lgam(0.5 * r) - lgam(0.5 * (r + 1.0))).exp();
    let gr1 = (lgam(0.5 * (r + 1.0)) - lgam(0.5 * r + 1.0)).exp();
    let f_sup = (1.0 / r + PI * gr / 2.0) / s;
    let f1_sup = 2.0 / (s * s * r);
    let xf = 1.5 + 0.5 / r;
    let xf1 = (1.0 + 0.5 / r) / s;
    let xf2 = (9.0 + 1.0 / r) / (2.0 * s * s);
    let tr = 2.5 + 0.5 / r;
    vec![
        (BoundId::SolutionSupBounded, Quantity::F, f_sup, false),
        (BoundId::DerivativeSupBounded, Quantity::F1, f1_sup, false),
        (BoundId::WeightedSolutionBounded, Quantity::XF, xf, false),
        (BoundId::WeightedDerivativeBounded, Quantity::XF1, xf1, false),
        (BoundId::WeightedSecondDerivativeBounded, Quantity::XF2, xf2, false),
        (BoundId::SolutionSupLipschitz, Quantity::F, 3.5, true),
        (
            BoundId::DerivativeSupLipschitz,
            Quantity::F1,
            4.5 / s * (1.0 / (r + 1.0) + PI * gr1 / 2.0),
            true,
        ),
        (BoundId::SecondDerivativeSupLipschitz, Quantity::F2, 9.0 / (s * s * (r + 1.0)), true),
        (
            BoundId::WeightedDerivativeLipschitz,
            Quantity::XF1,
            4.5 * (1.5 + 0.5 / (r + 1.0)),
            true,
        ),
        (
            BoundId::WeightedSecondDerivativeLipschitz,
            Quantity::XF2,
            4.5 / s * (1.0 + 0.5 / (r + 1.0)),
            true,
        ),
        (
            BoundId::WeightedThirdDerivativeLipschitz,
            Quantity::XF3,
            2.25 / (s * s) * (9.0 + 1.0 / (r + 1.0)),
            true,
        ),
        (BoundId::TrOperatorBounded, Quantity::Tr, tr, false),
        (
            BoundId::TrOperatorDerivativeLipschitz,
            Quantity::TrPrime,
            2.25 * (5.0 + 1.0 / (r + 1.0)),
            true,
        ),
        (BoundId::IndicatorSolutionSup, Quantity::F, f_sup, false),
        (BoundId::IndicatorDerivativeSup, Quantity::F1, f1_sup, false),
        (BoundId::IndicatorTrOperator, Quantity::Tr, tr, false),
        (BoundId::IndicatorWeightedSolution, Quantity::XF, xf, false),
        (BoundId::IndicatorWeightedDerivative, Quantity::XF1, xf1, false),
        (BoundId::IndicatorWeightedSecondDerivative, Quantity::XF2, xf2, false),
    ]
}

fn is_indicator_bound(id: BoundId) -> bool {
    matches!(
        id,
        BoundId::IndicatorSolutionSup
            | BoundId::IndicatorDerivativeSup
            | BoundId::IndicatorTrOperator
            | BoundId::IndicatorWeightedSolution
            | BoundId::IndicatorWeightedDerivative
            | BoundId::IndicatorWeightedSecondDerivative
    )
}

/// Check every applicable solution estimate for each test function over
/// `grid`. One report per (bound, test function); `ratio` is the sup of
/// the bounded quantity over the grid divided by the bound.
pub fn verify_solution_bounds(
    params: &SvgParams,
    family: &[TestFunction],
    grid: &[f64],
) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let specs = solution_bounds(params);
    for h in family {
        let sol = SteinSolution::new(*params, h.clone())?;
        let points = sol.evaluate_grid(grid)?;
        for &(id, q, constant, lipschitz) in &specs {
            let scale = if is_indicator_bound(id) {
                if !matches!(h.kind, TestKind::Indicator { .. }) {
                    continue;
                }
                1.0
            } else if lipschitz {
                match h.lip_const {
                    Some(l) if h.derivative(0.0).is_some() => l,
                    _ => continue,
                }
            } else {
                match sol.htilde_sup() {
                    Some(v) => v,
                    None => continue,
                }
            };
            let bound = constant * scale;
            let mut sup = 0.0;
            let mut arg = f64::NAN;
            for p in &points {
                let v = quantity(q, p, params).abs();
                if v.is_nan() {
                    continue;
                }
                if v > sup || arg.is_nan() {
                    sup = v;
                    arg = p.x;
                }
            }
            let mut report = BoundReport::new(id, bound);
            report.inputs.insert("r".into(), params.r);
            report.inputs.insert("sigma".into(), params.sigma);
            report.inputs.insert("mu".into(), params.mu);
            report.inputs.insert(
                if lipschitz { "lip_const" } else { "htilde_sup" }.into(),
                scale,
            );
            report.test_function = Some(h.label());
            report.empirical = Some(sup);
            report.ratio = Some(if bound > 0.0 {
                sup / bound
            } else if sup == 0.0 {
                0.0
            } else {
                f64::INFINITY
            });
            report.argmax_x = Some(arg);
            out.push(report);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gives_zero() {
        let p = SvgParams::new(2.5, 1.3, 0.4).unwrap();
        let s = SteinSolution::new(p, TestFunction::constant(3.0)).unwrap();
        for x in [-3.0, 0.4, 0.5, 10.0] {
            let e = s.evaluate(x).unwrap();
            assert_eq!(e.f, 0.0);
            assert_eq!(e.f1, 0.0);
        }
    }

    #[test]
    fn sine_mean_matches_quadrature() {
        let p = SvgParams::new(1.7, 0.8, 0.3).unwrap();
        let h = TestFunction::sine(1.3).unwrap();
        let closed = h.mean(&p).unwrap();
        let f = |t: f64| (1.3 * (0.3 + 0.8 * t)).sin() / 1.3;
        let q = expect_standard(p.nu(), f, &[]).unwrap();
        assert!((closed - q).abs() < 1e-10, "{closed} {q}");
    }

    #[test]
    fn laplace_indicator_against_closed_form() {
        // r = 2, h = 1(x ≤ 0): x f solves g'' − g = h̃, so
        // f(x) = (1 − e^{−|x|}) / (2|x|).
        let p = SvgParams::new(2.0, 1.0, 0.0).unwrap();
        let s = SteinSolution::new(p, TestFunction::indicator(0.0)).unwrap();
        for x in [0.3, 1.7, 4.0, -0.6, -2.2] {
            let e = s.evaluate(x).unwrap();
            let want = -(-x.abs()).exp_m1() / (2.0 * x.abs());
            assert!((e.f - want).abs() < 1e-10, "x={x} f={} want={want}", e.f);
            let h = 1e-5;
            let d2 = (s.solve_d1(x + h).unwrap() - s.solve_d1(x - h).unwrap()) / (2.0 * h);
            let res = x * d2 + 2.0 * e.f1 - x * e.f - s.htilde(x);
            assert!(res.abs() < 1e-6, "x={x} res={res}");
        }
    }
}
