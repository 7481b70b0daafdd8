use std::f64::consts::PI;

use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use svgstein::distances::{
    concentration_bound, kolmogorov_empirical, kolmogorov_from_wasserstein, kolmogorov_to_svg,
    kolmogorov_two_sample, wasserstein_to_svg, wasserstein_two_sample,
};
use svgstein::quadrature::Quadrature;
use svgstein::special_functions::log_gamma;
use svgstein::svg_distribution::{
    svg_absolute_moment, svg_cdf, svg_pdf, svg_quantile, svg_sample, vg_cdf, vg_pdf, vg_sample,
};
use svgstein::{SvgParams, VgParams};

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

#[test]
fn tail_asymptotic() {
    for (r, s) in [(0.5, 1.0), (2.0, 0.7), (5.0, 1.3)] {
        let p = SvgParams::new(r, s, 0.4).unwrap();
        let d = 200.0 * s;
        let lhs = svg_pdf(&p, p.mu + d).unwrap().ln() + d / s - (0.5 * r - 1.0) * d.ln();
        let rhs = -(0.5 * r * (2.0 * s).ln() + log_gamma(0.5 * r).unwrap());
        assert!((lhs - rhs).abs() < 0.01, "r={r}: {lhs} vs {rhs}");
    }
}

#[test]
fn sample_moments() {
    let p = SvgParams::new(1.7, 0.8, -0.5).unwrap();
    let xs = svg_sample(&p, 200_000, 21).unwrap();
    let (m, v) = mean_var(&xs);
    let se = (p.variance() / xs.len() as f64).sqrt();
    assert!((m - p.mu).abs() < 4.0 * se);
    assert!((v / p.variance() - 1.0).abs() < 0.02);
    assert_eq!(xs, svg_sample(&p, 200_000, 21).unwrap());
}

#[test]
fn vg_sample_moments_against_quadrature() {
    let p = VgParams::new(2.0, 0.3, 1.0, 0.1).unwrap();
    let quad = Quadrature::with_tolerance(1e-13, 1e-11);
    let mom = |k: i32| {
        let f = |x: f64| x.powi(k) * vg_pdf(&p, x).unwrap();
        quad.integrate_to_infinity(f, p.mu).unwrap().value
            + quad.integrate_to_infinity(|t| f(2.0 * p.mu - t), p.mu).unwrap().value
    };
    let (m1, m2) = (mom(1), mom(2));
    assert!((m1 - (p.mu + p.r * p.theta)).abs() < 1e-8);
    let var = m2 - m1 * m1;
    assert!((var - p.variance()).abs() < 1e-8);
    let xs = vg_sample(&p, 200_000, 5).unwrap();
    let (sm, sv) = mean_var(&xs);
    assert!((sm - m1).abs() < 4.0 * (var / xs.len() as f64).sqrt());
    assert!((sv / var - 1.0).abs() < 0.02);
    let k = kolmogorov_empirical(&xs[..20_000], |x| vg_cdf(&p, x).unwrap()).unwrap();
    assert!(k.value < 0.015);
}

#[test]
fn normal_limit_in_r() {
    let norm = Normal::new(0.0, 1.0).unwrap();
    let ks: Vec<f64> = [1.0, 10.0, 1000.0]
        .iter()
        .map(|&r| {
            let p = SvgParams::new(r, 1.0 / r.sqrt(), 0.0).unwrap();
            let xs = svg_sample(&p, 200_000, 8).unwrap();
            kolmogorov_empirical(&xs, |x| norm.cdf(x)).unwrap().value
        })
        .collect();
    assert!(ks[0] > ks[1] && ks[1] > ks[2], "{ks:?}");
}

#[test]
fn distance_calibration() {
    let p = SvgParams::new(1.5, 2.0, 0.0).unwrap();
    let xs = svg_sample(&p, 100_000, 2).unwrap();
    assert!(kolmogorov_to_svg(&xs, &p).unwrap().value <= 0.01);
    assert!(wasserstein_to_svg(&xs, &p).unwrap().value <= 0.02 * p.sigma);
    assert_eq!(wasserstein_two_sample(&xs, &xs).unwrap().value, 0.0);
    assert_eq!(kolmogorov_two_sample(&[0.0, 1.0], &[2.0, 3.0]).unwrap().value, 1.0);
}

#[test]
fn distances_shrink_with_n() {
    let p = SvgParams::standard(2.0).unwrap();
    let mut wins = 0;
    for seed in 0..10 {
        let small = svg_sample(&p, 10_000, seed).unwrap();
        let big = svg_sample(&p, 1_000_000, seed + 100).unwrap();
        let shrinks = kolmogorov_to_svg(&big, &p).unwrap().value < kolmogorov_to_svg(&small, &p).unwrap().value
            && wasserstein_to_svg(&big, &p).unwrap().value < wasserstein_to_svg(&small, &p).unwrap().value;
        wins += shrinks as u32;
    }
    assert!(wins >= 9, "{wins}");
}

#[test]
fn conversion_values() {
    let p3 = SvgParams::standard(3.0).unwrap();
    let v = kolmogorov_from_wasserstein(&p3, 0.1).unwrap();
    assert!((v - (0.2 / PI).sqrt()).abs() < 1e-12);
    for r in [0.5, 1.0, 3.0] {
        assert_eq!(kolmogorov_from_wasserstein(&SvgParams::standard(r).unwrap(), 0.0).unwrap(), 0.0);
    }
    assert!(kolmogorov_from_wasserstein(&SvgParams::standard(1.0).unwrap(), 0.7).is_err());
    // Normal limit: (2/(πσ²))^{1/4} √d_W at r = 10⁴ with scale σ/√r.
    let (r, s, dw) = (1e4, 1.3, 0.01);
    let v = kolmogorov_from_wasserstein(&SvgParams::new(r, s / r.sqrt(), 0.0).unwrap(), dw).unwrap();
    let lim = (2.0 / (PI * s * s)).powf(0.25) * dw.sqrt();
    assert!((v / lim - 1.0).abs() < 0.01);
}

#[test]
fn concentration_values() {
    let c = concentration_bound(&SvgParams::standard(2.0).unwrap(), 0.2).unwrap();
    assert!((c - 0.1).abs() < 1e-14);
    let c1 = concentration_bound(&SvgParams::standard(1.0).unwrap(), 0.5).unwrap();
    assert!((c1 - 0.5 / PI * (1.0 + 4f64.ln())).abs() < 1e-14);
}

#[test]
fn point_mass_wasserstein() {
    let p = SvgParams::new(0.8, 1.4, 0.0).unwrap();
    let w = wasserstein_to_svg(&[0.0], &p).unwrap().value;
    let m = svg_absolute_moment(&p, 1.0).unwrap();
    assert!((w - m).abs() < 1e-8 * m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_monotone_and_symmetric(r in 0.2f64..20.0, s in 0.1f64..5.0, mu in -3.0f64..3.0, a in 0.01f64..10.0) {
        let p = SvgParams::new(r, s, mu).unwrap();
        let (lo, hi) = (svg_cdf(&p, mu - a).unwrap(), svg_cdf(&p, mu + a).unwrap());
        prop_assert!((lo + hi - 1.0).abs() < 1e-12);
        prop_assert!(hi > 0.5 && hi <= 1.0);
        prop_assert!(svg_cdf(&p, mu + a * 1.1).unwrap() >= hi);
        prop_assert!((svg_pdf(&p, mu - a).unwrap() - svg_pdf(&p, mu + a).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn quantile_round_trip(r in 0.2f64..20.0, s in 0.1f64..5.0, u in 1e-6f64..0.999_999) {
        let p = SvgParams::new(r, s, 0.0).unwrap();
        let x = svg_quantile(&p, u).unwrap();
        prop_assert!((svg_cdf(&p, x).unwrap() - u).abs() < 1e-10);
    }

    #[test]
    fn kolmogorov_from_wasserstein_is_increasing(r in 0.2f64..10.0, dw in 1e-6f64..0.3) {
        let p = SvgParams::standard(r).unwrap();
        let a = kolmogorov_from_wasserstein(&p, dw).unwrap();
        let b = kolmogorov_from_wasserstein(&p, dw * 1.2).unwrap();
        prop_assert!(a > 0.0 && b > a);
    }
}
