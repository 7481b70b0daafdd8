//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Tolerances for [`Quadrature::integrate`] and friends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

/// Value and error estimate of a definite integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel, with the QUADPACK error heuristic.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * h;
    let res_abs = res_abs * h.abs();
    let res_asc = res_asc * h.abs();
    let mut err = ((res_k - res_g) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    /// ∫_a^b f.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        self.integrate_breaks(f, &[a, b])
    }

    /// Integral over `[points[0], points[last]]`, with every interior point
    /// used as an initial split. Points must be nondecreasing.
    pub fn integrate_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        points: &[f64],
    ) -> Result<Integral> {
        if points.len() < 2 {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
            });
        }
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        // Panels too narrow to split further are parked here.
        let mut frozen_err = 0.0;
        let mut frozen_value = 0.0;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b > a) {
                continue;
            }
            let (v, e) = gk21(&mut f, a, b);
            total += v;
            total_err += e;
            heap.push(Panel {
                a,
                b,
                value: v,
                error: e,
            });
        }
        let mut count = heap.len();
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol || !total.is_finite() {
                break;
            }
            if heap.is_empty() {
                break;
            }
            if count >= self.max_intervals {
                break;
            }
            let p = heap.pop().unwrap();
            let m = 0.5 * (p.a + p.b);
            let scale = p.a.abs().max(p.b.abs()).max(f64::MIN_POSITIVE);
            if (p.b - p.a) <= 64.0 * f64::EPSILON * scale || m <= p.a || m >= p.b {
                frozen_err += p.error;
                frozen_value += p.value;
                continue;
            }
            let (v1, e1) = gk21(&mut f, p.a, m);
            let (v2, e2) = gk21(&mut f, m, p.b);
            total += v1 + v2 - p.value;
            total_err += e1 + e2 - p.error;
            heap.push(Panel {
                a: p.a,
                b: m,
                value: v1,
                error: e1,
            });
            heap.push(Panel {
                a: m,
                b: p.b,
                value: v2,
                error: e2,
            });
            count += 1;
        }
        // Re-sum to shed the drift of the running updates.
        let value = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
        let error = heap.iter().map(|p| p.error).sum::<f64>() + frozen_err;
        let tol = self.abs_tol.max(self.rel_tol * value.abs());
        // Estimates are pessimistic near roundoff, so allow some headroom.
        if value.is_finite() && error <= 100.0 * tol {
            Ok(Integral { value, error })
        } else {
            Err(Error::Quadrature { value, error })
        }
    }

    /// ∫_a^∞ f, through t = a + (1 − s)/s on (0, 1].
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> Result<Integral> {
        self.integrate(
            |s| {
                if s <= 0.0 {
                    return 0.0;
                }
                let t = a + (1.0 - s) / s;
                let v = f(t) / (s * s);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
        )
    }
}
