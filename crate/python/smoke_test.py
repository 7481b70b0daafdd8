"""Smoke test for the compiled extension.

Build and install first:  pip install --no-build-isolation crates/python
Run with:                 python -m pytest python/smoke_test.py
"""

import json
import math

import svgstein_py as s


def test_bessel_half_order():
    x = 1.0
    assert math.isclose(s.bessel_i(0.5, x), math.sqrt(2 / (math.pi * x)) * math.sinh(x), rel_tol=1e-12)
    assert math.isclose(s.bessel_k(0.5, x), math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel_tol=1e-12)


def test_laplace_case():
    pdf = s.svg_pdf([0.0, 1.0], 2.0)
    assert math.isclose(pdf[0], 0.5, rel_tol=1e-12)
    cdf = s.svg_cdf([1.0], 2.0)[0]
    assert math.isclose(cdf, 1 - math.exp(-1) / 2, rel_tol=1e-12)
    assert math.isclose(s.svg_absolute_moment(1.0, 2.0), 1.0, rel_tol=1e-12)


def test_sampling_is_seeded():
    a = s.svg_sample(1000, 1.5, seed=4)
    assert a == s.svg_sample(1000, 1.5, seed=4)
    assert s.distance_to_svg(s.svg_sample(100_000, 1.5, seed=4), "kolmogorov", 1.5) < 0.01


def test_stein_and_bounds():
    rows = s.stein_solve([50.0], "sign", 2.0)
    assert abs(rows[0][0] * rows[0][1] + 1.0) < 1e-3
    reps = json.loads(s.verify_bounds([-2.0, -0.5, 0.5, 2.0], "indicator:0.0", 2.0))
    assert reps and all(r["ratio"] <= 1 + 1e-6 for r in reps)
    six = json.loads(s.six_moment(1.0, 1.0, 1.0, 0.0, 6.0, 132.0))
    assert abs(six["bound_value"] - 1.4230) < 1e-4
    assert abs(s.kolmogorov_bound_from_wasserstein(0.676, 1.0) - 1.075) < 0.002


def test_experiment():
    doc = json.loads(s.run_experiment("experiment=d2\nm=50\nn=50\ntrials=2000\nseed=3\n"))
    row = doc["results"][0]
    assert row["experiment"] == "d2"
    assert row["empirical_dw"] <= row["bound_dw"]


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name}: ok")
