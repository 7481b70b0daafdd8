//! The symmetric variance-gamma family SVG(r, σ, μ) and the general
//! variance-gamma family VG(r, θ, σ, μ).
//!
//! Both are normal variance-mean mixtures over `V ~ Γ(r/2, rate 1/2)`:
//! `μ + θV + σ√V·N`. Most evaluations reduce to the standard law
//! SVG(r, 1, 0) with density `|t|^ν K_ν(|t|) / (2^ν √π Γ(ν + 1/2))`,
//! `ν = (r − 1)/2`.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::quadrature::Quadrature;
use crate::rng;
use crate::special_functions::{
    bessel_k, int_k_tail, integrate_power_singular, lgam, ln_bessel_k,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvgParams {
    pub r: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl SvgParams {
    pub fn new(r: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParams(format!("r must be positive, got {r}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu must be finite, got {mu}")));
        }
        Ok(SvgParams { r, sigma, mu })
    }

    pub fn standard(r: f64) -> Result<Self> {
        Self::new(r, 1.0, 0.0)
    }

    pub fn nu(&self) -> f64 {
        0.5 * (self.r - 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    pub fn variance(&self) -> f64 {
        self.r * (self.sigma * self.sigma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VgParams {
    pub r: f64,
    pub theta: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl VgParams {
    pub fn new(r: f64, theta: f64, sigma: f64, mu: f64) -> Result<Self> {
        SvgParams::new(r, sigma, mu)?;
        if !theta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "theta must be finite, got {theta}"
            )));
        }
        Ok(VgParams {
            r,
            theta,
            sigma,
            mu,
        })
    }

    pub fn nu(&self) -> f64 {
        0.5 * (self.r - 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.mu + self.r * self.theta
    }

    pub fn variance(&self) -> f64 {
        self.r * self.sigma * self.sigma + 2.0 * self.r * self.theta * self.theta
    }

    pub fn symmetric(&self) -> Option<SvgParams> {
        (self.theta == 0.0).then_some(SvgParams {
            r: self.r,
            sigma: self.sigma,
            mu: self.mu,
        })
    }
}

/// `ln(2^ν √π Γ(ν + 1/2))`, the log normaliser of the standard density.
pub(crate) fn ln_norm(nu: f64) -> f64 {
    nu * LN_2 + 0.5 * PI.ln() + lgam(nu + 0.5)
}

/// Standard density at `y ≥ 0` (infinite at 0 when ν ≤ 0).
pub(crate) fn std_pdf(nu: f64, y: f64) -> f64 {
    let y = y.abs();
    if y == 0.0 {
        return if nu > 0.0 {
            ((nu - 1.0) * LN_2 + lgam(nu) - ln_norm(nu)).exp()
        } else {
            f64::INFINITY
        };
    }
    match ln_bessel_k(nu, y) {
        Ok(lk) => (nu * y.ln() + lk - ln_norm(nu)).exp(),
        Err(_) => 0.0,
    }
}

/// `P(Z > y)` for the standard law and `y ≥ 0`.
pub(crate) fn std_tail(nu: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.5);
    }
    let t = int_k_tail(nu, y, 0)?;
    Ok(t.scale_exp(-ln_norm(nu)).value())
}

pub fn svg_pdf(p: &SvgParams, x: f64) -> Result<f64> {
    let y = (x - p.mu) / p.sigma;
    if y == 0.0 && p.r <= 1.0 {
        return Err(Error::Singular(format!(
            "SVG density with r = {} is infinite at x = mu",
            p.r
        )));
    }
    Ok(std_pdf(p.nu(), y) / p.sigma)
}

pub fn svg_cdf(p: &SvgParams, x: f64) -> Result<f64> {
    let y = (x - p.mu) / p.sigma;
    if y.is_nan() {
        return Err(Error::Domain("svg_cdf at NaN".into()));
    }
    if y == 0.0 {
        return Ok(0.5);
    }
    if y.is_infinite() {
        return Ok(if y > 0.0 { 1.0 } else { 0.0 });
    }
    let t = std_tail(p.nu(), y.abs())?;
    Ok(if y > 0.0 { 1.0 - t } else { t })
}

/// Inverse of [`svg_cdf`] by safeguarded Newton iteration.
pub fn svg_quantile(p: &SvgParams, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("quantile level must be in (0, 1), got {u}")));
    }
    if u == 0.5 {
        return Ok(p.mu);
    }
    let nu = p.nu();
    // Solve P(Z > y) = q for y > 0 on the standard scale.
    let q = u.min(1.0 - u);
    let (mut lo, mut hi) = (0.0, 1.0);
    while std_tail(nu, hi)? > q {
        lo = hi;
        hi *= 2.0;
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = std_tail(nu, y)? - q;
        if f > 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let step = f / std_pdf(nu, y);
        let mut next = y + step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-15 * y.max(1e-300) || hi - lo <= 1e-15 * hi {
            y = next;
            break;
        }
        y = next;
    }
    let y = if u > 0.5 { y } else { -y };
    Ok(p.mu + p.sigma * y)
}

/// Draw `n` values with the stream derived from `seed`.
pub fn svg_sample(p: &SvgParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng::stream(seed, 0);
    svg_sample_with(p, n, &mut rng)
}

pub fn svg_sample_with<R: Rng + ?Sized>(p: &SvgParams, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let gamma = Gamma::new(0.5 * p.r, 2.0).map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok((0..n)
        .map(|_| {
            let x: f64 = gamma.sample(rng);
            let y: f64 = rng.sample(StandardNormal);
            p.mu + p.sigma * x.sqrt() * y
        })
        .collect())
}

/// `Γ(a + s) / Γ(a)`, exact when `s` is a nonnegative integer.
fn gamma_ratio(a: f64, s: f64) -> f64 {
    let m = s.floor();
    let f = s - m;
    let mut prod = 1.0;
    let mut j = 0.0;
    while j < m {
        prod *= a + f + j;
        j += 1.0;
    }
    if f == 0.0 {
        prod
    } else {
        prod * (lgam(a + f) - lgam(a)).exp()
    }
}

/// `E|Z − μ|^k = σ^k · E[X^{k/2}] · E|N|^k` with `X ~ Γ(r/2, rate 1/2)`.
///
/// The constant is `2^k`: `E[X^{k/2}]` and `E|N|^k` each carry `2^{k/2}`.
/// A single `2^{k/2}` would give `rσ²/2` at `k = 2`.
pub fn svg_absolute_moment(p: &SvgParams, k: f64) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("moment order must be positive, got {k}")));
    }
    let mix = gamma_ratio(0.5 * p.r, 0.5 * k);
    // Γ((k+1)/2)/√π = Γ(1/2 + k/2)/Γ(1/2).
    let normal = gamma_ratio(0.5, 0.5 * k);
    let scale = if k == 2.0 {
        p.sigma * p.sigma
    } else {
        p.sigma.powf(k)
    };
    Ok(2f64.powf(k) * mix * normal * scale)
}

/// `(κ2, κ4, κ6) = (rσ², 6rσ⁴, 120rσ⁶)`; odd cumulants vanish.
pub fn svg_cumulants(p: &SvgParams) -> (f64, f64, f64) {
    let s2 = p.sigma * p.sigma;
    (p.r * s2, 6.0 * p.r * s2 * s2, 120.0 * p.r * s2 * s2 * s2)
}

pub fn vg_pdf(p: &VgParams, x: f64) -> Result<f64> {
    let d = x - p.mu;
    if d == 0.0 {
        if p.r <= 1.0 {
            return Err(Error::Singular(format!(
                "VG density with r = {} is infinite at x = mu",
                p.r
            )));
        }
        let a = (p.theta * p.theta + p.sigma * p.sigma).sqrt();
        let s2 = p.sigma * p.sigma;
        let nu = p.nu();
        // (|d|/(2a))^ν K_ν(a|d|/σ²) → 2^{ν−1} Γ(ν) (σ²/(2a²))^ν.
        let ln = (nu - 1.0) * LN_2 + lgam(nu) + nu * (s2 / (2.0 * a * a)).ln();
        return Ok((ln - p.sigma.ln() - 0.5 * PI.ln() - lgam(0.5 * p.r)).exp());
    }
    let a = (p.theta * p.theta + p.sigma * p.sigma).sqrt();
    let s2 = p.sigma * p.sigma;
    let nu = p.nu();
    let z = a * d.abs() / s2;
    let lk = bessel_k(nu, z, false)
        .map(|k| k.ln())
        .or_else(|_| ln_bessel_k(nu, z))?;
    let ln = -p.sigma.ln() - 0.5 * PI.ln() - lgam(0.5 * p.r)
        + p.theta * d / s2
        + nu * (d.abs() / (2.0 * a)).ln()
        + lk;
    Ok(ln.exp())
}

/// `P(X ≤ x)` for X ~ VG by quadrature of [`vg_pdf`].
pub fn vg_cdf(p: &VgParams, x: f64) -> Result<f64> {
    if let Some(s) = p.symmetric() {
        return svg_cdf(&s, x);
    }
    let quad = Quadrature::with_tolerance(1e-13, 1e-11);
    let nu = p.nu();
    let alpha = if nu < 0.0 {
        2.0 * nu
    } else if nu == 0.0 {
        -0.5
    } else {
        0.0
    };
    let f = |t: f64| vg_pdf(p, t).unwrap_or(0.0);
    // Mass on each side of μ, then integrate from μ toward x.
    let a = (p.theta * p.theta + p.sigma * p.sigma).sqrt();
    let decay_right = (a - p.theta) / (p.sigma * p.sigma);
    let decay_left = (a + p.theta) / (p.sigma * p.sigma);
    let side = |dir: f64, decay: f64, upto: f64| -> Result<f64> {
        // ∫_0^upto f(μ + dir·s) ds with a singular-start panel.
        let g = |s: f64| f(p.mu + dir * s);
        let first = upto.min(1.0 / decay);
        let mut total = integrate_power_singular(&quad, g, first, alpha)?;
        if upto > first {
            let end = upto.min(first + (80.0 + 2.0 * nu.abs()) / decay);
            let mut pts = vec![first];
            let mut step = 1.0 / decay;
            while pts[pts.len() - 1] + step < end {
                let last = pts[pts.len() - 1];
                pts.push(last + step);
                step *= 1.5;
            }
            pts.push(end);
            total += quad.integrate_breaks(g, &pts)?.value;
        }
        Ok(total)
    };
    let d = x - p.mu;
    if d <= 0.0 {
        let left_total = side(-1.0, decay_left, f64::INFINITY)?;
        let near = side(-1.0, decay_left, -d)?;
        Ok((left_total - near).max(0.0))
    } else {
        let left_total = side(-1.0, decay_left, f64::INFINITY)?;
        let right = side(1.0, decay_right, d)?;
        Ok((left_total + right).min(1.0))
    }
}

pub fn vg_sample(p: &VgParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng::stream(seed, 0);
    vg_sample_with(p, n, &mut rng)
}

pub fn vg_sample_with<R: Rng + ?Sized>(p: &VgParams, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let gamma = Gamma::new(0.5 * p.r, 2.0).map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok((0..n)
        .map(|_| {
            let v: f64 = gamma.sample(rng);
            let z: f64 = rng.sample(StandardNormal);
            p.mu + p.theta * v + p.sigma * v.sqrt() * z
        })
        .collect())
}

/// Tabulated standard tail `S(y) = P(Z > y)` for repeated CDF, quantile and
/// partial-expectation queries.
///
/// Nodes are uniform in `ln y`; values between nodes come from cubic
/// Hermite interpolation with the exact slope `dS/d ln y = −y p(y)`.
#[derive(Clone, Debug)]
pub struct SvgTable {
    pub params: SvgParams,
    nu: f64,
    u0: f64,
    du: f64,
    tail: Vec<f64>,
    slope: Vec<f64>,
    /// `S(y)` below the first node is `1/2 − head · (y/y0)^head_power`.
    head: f64,
    head_power: f64,
    y_max: f64,
}

const TABLE_Y_MIN: f64 = 1e-12;
const TABLE_DU: f64 = 0.01;

impl SvgTable {
    pub fn new(params: SvgParams) -> Result<Self> {
        let nu = params.nu();
        let y_max = 80.0 + 4.0 * nu.max(0.0);
        let u0 = TABLE_Y_MIN.ln();
        let n = ((y_max.ln() - u0) / TABLE_DU).ceil() as usize + 1;
        let du = (y_max.ln() - u0) / (n - 1) as f64;
        let g = |u: f64| {
            let y = u.exp();
            y * std_pdf(nu, y)
        };
        let mut tail = vec![0.0; n];
        let mut slope = vec![0.0; n];
        tail[n - 1] = std_tail(nu, y_max)?;
        let mut gg = g;
        for i in (0..n - 1).rev() {
            let a = u0 + i as f64 * du;
            let (v, _) = crate::quadrature::gk21(&mut gg, a, a + du);
            tail[i] = tail[i + 1] + v;
        }
        for (i, s) in slope.iter_mut().enumerate() {
            *s = -g(u0 + i as f64 * du);
        }
        let head_power = if nu < 0.0 { 2.0 * nu + 1.0 } else { 1.0 };
        let head = 0.5 - tail[0];
        Ok(SvgTable {
            params,
            nu,
            u0,
            du,
            tail,
            slope,
            head,
            head_power,
            y_max,
        })
    }

    /// Standard tail `P(Z > y)` for `y ≥ 0`.
    pub fn std_tail(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.5;
        }
        if y >= self.y_max {
            return std_tail(self.nu, y).unwrap_or(0.0);
        }
        let y0 = TABLE_Y_MIN;
        if y < y0 {
            return 0.5 - self.head * (y / y0).powf(self.head_power);
        }
        let t = (y.ln() - self.u0) / self.du;
        let i = (t.floor() as usize).min(self.tail.len() - 2);
        let s = t - i as f64;
        let (p0, p1) = (self.tail[i], self.tail[i + 1]);
        let (m0, m1) = (self.slope[i] * self.du, self.slope[i + 1] * self.du);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let y = (x - self.params.mu) / self.params.sigma;
        if y == 0.0 {
            return 0.5;
        }
        let t = self.std_tail(y.abs());
        if y > 0.0 {
            1.0 - t
        } else {
            t
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        std_pdf(self.nu, (x - self.params.mu) / self.params.sigma) / self.params.sigma
    }

    /// Standard `E(Z − y)^+` for `y ≥ 0`.
    fn std_upper_partial(&self, y: f64) -> f64 {
        let first = if y == 0.0 {
            ((self.nu * LN_2 + lgam(self.nu + 1.0)) - ln_norm(self.nu)).exp()
        } else {
            match int_k_tail(self.nu, y, 1) {
                Ok(v) => v.scale_exp(-ln_norm(self.nu)).value(),
                Err(_) => 0.0,
            }
        };
        (first - y * self.std_tail(y)).max(0.0)
    }

    /// `E(Z − x)^+`.
    pub fn upper_partial(&self, x: f64) -> f64 {
        let y = (x - self.params.mu) / self.params.sigma;
        let v = if y >= 0.0 {
            self.std_upper_partial(y)
        } else {
            -y + self.std_upper_partial(-y)
        };
        self.params.sigma * v
    }

    /// `E(x − Z)^+ = ∫_{−∞}^x F`.
    pub fn lower_partial(&self, x: f64) -> f64 {
        let y = (x - self.params.mu) / self.params.sigma;
        let v = if y <= 0.0 {
            self.std_upper_partial(-y)
        } else {
            y + self.std_upper_partial(y)
        };
        self.params.sigma * v
    }

    /// Inverse CDF by bisection on the table.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if u >= 1.0 {
            return f64::INFINITY;
        }
        if u == 0.5 {
            return self.params.mu;
        }
        let q = u.min(1.0 - u);
        let (mut lo, mut hi) = (0.0, self.y_max);
        while self.std_tail(hi) > q {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                break;
            }
        }
        for _ in 0..200 {
            let mid = if lo > 0.0 && hi / lo > 4.0 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.std_tail(mid) > q {
                lo = mid;
            } else {
                hi = mid;
            }
            if lo == 0.0 && hi < 1e-300 {
                break;
            }
        }
        let y = 0.5 * (lo + hi);
        let y = if u > 0.5 { y } else { -y };
        self.params.mu + self.params.sigma * y
    }
}
