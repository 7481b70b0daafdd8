//! Bessel values against the frozen high-precision table in
//! `tests/data/bessel_oracle.csv`.

use proptest::prelude::*;
use svgstein::special_functions::{
    bessel_i, bessel_k, int_i_lower, int_k_tail, ln_bessel_i, ln_bessel_k,
};

struct Row {
    nu: f64,
    x: f64,
    i: f64,
    k: f64,
}

fn oracle() -> Vec<Row> {
    let text = include_str!("data/bessel_oracle.csv");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|v| v.trim().parse().unwrap()).collect();
            Row {
                nu: c[0],
                x: c[1],
                i: c[2],
                k: c[3],
            }
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn matches_oracle_table() {
    let rows = oracle();
    assert!(rows.len() >= 140);
    let mut worst: (f64, f64, f64) = (0.0, 0.0, 0.0);
    for r in &rows {
        // Compare through logs so huge and tiny values are treated alike.
        let i = bessel_i(r.nu, r.x, true).unwrap();
        let k = bessel_k(r.nu, r.x, true).unwrap();
        let ei = ((i.ln() + r.x) - r.i.ln()).abs();
        let ek = ((k.ln() - r.x) - r.k.ln()).abs();
        let e = ei.max(ek);
        if e > worst.0 {
            worst = (e, r.nu, r.x);
        }
        assert!(ei < 1e-10, "I nu={} x={} err={ei:e}", r.nu, r.x);
        assert!(ek < 1e-10, "K nu={} x={} err={ek:e}", r.nu, r.x);
        if r.i.is_finite() && r.i < 1e300 {
            let plain = bessel_i(r.nu, r.x, false).unwrap().value();
            assert!(rel(plain, r.i) < 1e-10);
        }
    }
    eprintln!("worst log error {:e} at nu={} x={}", worst.0, worst.1, worst.2);
}

#[test]
fn matches_small_argument_oracle() {
    let text = include_str!("data/bessel_oracle_small.csv");
    let mut n = 0;
    for l in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let c: Vec<f64> = l.split(',').map(|v| v.trim().parse().unwrap()).collect();
        let (nu, x) = (c[0], c[1]);
        let ei = (ln_bessel_i(nu, x).unwrap() - c[2]).abs();
        let ek = (ln_bessel_k(nu, x).unwrap() - c[3]).abs();
        assert!(ei < 1e-10 * c[2].abs().max(1.0), "I nu={nu} x={x} err={ei:e}");
        assert!(ek < 1e-10 * c[3].abs().max(1.0), "K nu={nu} x={x} err={ek:e}");
        n += 1;
    }
    assert!(n >= 60);
}

#[test]
fn wronskian_on_oracle_grid() {
    for r in oracle() {
        if r.nu < 0.0 {
            continue;
        }
        let i0 = bessel_i(r.nu, r.x, true).unwrap();
        let i1 = bessel_i(r.nu + 1.0, r.x, true).unwrap();
        let k0 = bessel_k(r.nu, r.x, true).unwrap();
        let k1 = bessel_k(r.nu + 1.0, r.x, true).unwrap();
        let w = r.x * (i0.mul(k1).value() + i1.mul(k0).value());
        assert!((w - 1.0).abs() < 1e-9, "nu={} x={} w={w}", r.nu, r.x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn wronskian_holds(nu in -0.49f64..30.0, lx in -6.0f64..3.0) {
        let x = 10f64.powf(lx);
        let i0 = bessel_i(nu, x, true).unwrap();
        let i1 = bessel_i(nu + 1.0, x, true).unwrap();
        let k0 = bessel_k(nu, x, true).unwrap();
        let k1 = bessel_k(nu + 1.0, x, true).unwrap();
        let w = x * (i0.mul(k1).value() + i1.mul(k0).value());
        prop_assert!((w - 1.0).abs() < 1e-9, "w = {}", w);
    }

    #[test]
    fn recurrences_hold(nu in 0.0f64..20.0, x in 0.01f64..200.0) {
        // I_{ν−1} − I_{ν+1} = (2ν/x) I_ν, K_{ν+1} − K_{ν−1} = (2ν/x) K_ν.
        let im = bessel_i(nu + 1.0, x, true).unwrap().value();
        let i0 = bessel_i(nu + 2.0, x, true).unwrap().value();
        let ip = bessel_i(nu + 3.0, x, true).unwrap().value();
        prop_assert!(((im - ip) - 2.0 * (nu + 2.0) / x * i0).abs() <= 1e-10 * im.abs());
        let km = bessel_k(nu, x, true).unwrap().value();
        let k0 = bessel_k(nu + 1.0, x, true).unwrap().value();
        let kp = bessel_k(nu + 2.0, x, true).unwrap().value();
        prop_assert!(((kp - km) - 2.0 * (nu + 1.0) / x * k0).abs() <= 1e-10 * kp.abs());
    }

    #[test]
    fn positive_and_ordered(nu in 0.0f64..20.0, x in 1e-3f64..100.0) {
        let i0 = bessel_i(nu, x, true).unwrap().value();
        let i1 = bessel_i(nu + 1.0, x, true).unwrap().value();
        let k0 = bessel_k(nu, x, true).unwrap().value();
        let k1 = bessel_k(nu + 1.0, x, true).unwrap().value();
        prop_assert!(i0 > 0.0 && k0 > 0.0);
        prop_assert!(i1 < i0);
        prop_assert!(k1 > k0 || nu == 0.0 && k1 >= k0);
    }

    #[test]
    fn integrals_match_derivative(nu in -0.45f64..10.0, x in 0.05f64..30.0) {
        // d/dx ∫_0^x t^ν I_ν = x^ν I_ν and d/dx ∫_x^∞ t^ν K_ν = −x^ν K_ν.
        let h = 1e-4 * x.min(1.0);
        let d_i = (int_i_lower(nu, x + h, 0).unwrap().value()
            - int_i_lower(nu, x - h, 0).unwrap().value()) / (2.0 * h);
        let want_i = x.powf(nu) * bessel_i(nu, x, false).unwrap().value();
        prop_assert!(((d_i - want_i) / want_i).abs() < 1e-6);
        let d_k = (int_k_tail(nu, x + h, 0).unwrap().value()
            - int_k_tail(nu, x - h, 0).unwrap().value()) / (2.0 * h);
        let want_k = -x.powf(nu) * bessel_k(nu, x, false).unwrap().value();
        prop_assert!(((d_k - want_k) / want_k).abs() < 1e-6);
    }
}
