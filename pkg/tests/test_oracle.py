from __future__ import annotations

import math

import numpy as np
import pytest

from droplet import oracle
from droplet.ball import ball_energy
from droplet.cylinder import sigma_cyl
from droplet.errors import DomainError, UnsupportedConfiguration
from droplet.kernels import riesz, truncated, yukawa

COULOMB_UNIT_BALL = 32 * math.pi**2 / 15

GRID = [riesz(a) for a in (0.5, 1.0, 1.5, 2.0, 2.5)] + \
       [truncated(1.0, k) for k in (0.3, 0.8, 1.1, 1.7, 3.0)] + \
       [yukawa(k) for k in (0.1, 0.3, 0.56, 1.0, 5.0)]


def test_slicing_coulomb_unit_ball():
    assert oracle.ball_energy_by_slicing(riesz(1.0), 1.0).value == pytest.approx(COULOMB_UNIT_BALL, rel=1e-8)


@pytest.mark.parametrize("k", GRID, ids=str)
def test_slicing_matches_closed_forms(k):
    for R in (0.7, 1.0):
        assert oracle.ball_energy_by_slicing(k, R).value == pytest.approx(ball_energy(k, R), rel=1e-7)


def test_slicing_is_deterministic():
    a = oracle.ball_energy_by_slicing(yukawa(0.56), 1.0)
    b = oracle.ball_energy_by_slicing(yukawa(0.56), 1.0)
    assert a == b
    assert a.stderr is None


def test_slicing_other_dimensions():
    for n, alpha in ((2, 0.5), (4, 1.5), (5, 3.0)):
        k = riesz(alpha, n)
        assert oracle.ball_energy_by_slicing(k, 1.0).value == pytest.approx(ball_energy(k, 1.0), rel=1e-7)


def test_uniform_ball_sampler():
    rng = np.random.default_rng(0)
    pts = oracle.uniform_ball(rng, 200000, 3, 2.0)
    r = np.linalg.norm(pts, axis=1)
    assert r.max() <= 2.0
    # P(|x| < R/2) = 1/8 in three dimensions
    assert np.mean(r < 1.0) == pytest.approx(1 / 8, abs=0.005)
    assert np.abs(pts.mean(axis=0)).max() < 0.01


def test_monte_carlo_is_deterministic_per_seed():
    a = oracle.ball_energy_monte_carlo(riesz(1.0), 1.0, samples=50000, seed=5)
    b = oracle.ball_energy_monte_carlo(riesz(1.0), 1.0, samples=50000, seed=5)
    c = oracle.ball_energy_monte_carlo(riesz(1.0), 1.0, samples=50000, seed=6)
    assert a == b
    assert a.value != c.value
    assert a.stderr is not None and a.stderr > 0


def test_monte_carlo_chunking_does_not_change_the_stream_length():
    a = oracle.ball_energy_monte_carlo(yukawa(1.0), 1.0, samples=30000, seed=1, chunk=30000)
    assert a.samples_or_nodes == 30000


def test_monte_carlo_rejects_tiny_runs():
    with pytest.raises(DomainError):
        oracle.ball_energy_monte_carlo(riesz(1.0), 1.0, samples=100)


def test_monte_carlo_coverage_over_seeds():
    hits = 0
    for seed in range(40):
        est = oracle.ball_energy_monte_carlo(riesz(1.0), 1.0, samples=20000, seed=seed)
        hits += abs(est.value - COULOMB_UNIT_BALL) <= 4 * est.stderr
    assert hits >= 38


def test_monte_carlo_agrees_with_slicing_for_screened_kernels():
    for k in (truncated(1.0, 1.1), yukawa(0.56)):
        mc = oracle.ball_energy_monte_carlo(k, 1.0, samples=200000, seed=3)
        sl = oracle.ball_energy_by_slicing(k, 1.0).value
        assert abs(mc.value - sl) <= 4 * mc.stderr


def test_large_screening_length_matches_coulomb():
    y = oracle.ball_energy_monte_carlo(yukawa(1e6), 1.0, samples=200000, seed=9)
    c = oracle.ball_energy_monte_carlo(riesz(1.0), 1.0, samples=200000, seed=10)
    assert abs(y.value - c.value) <= 3 * math.hypot(y.stderr, c.stderr)


def test_slice_energy_oracle_zero_length():
    assert oracle.slice_energy_by_quadrature(riesz(1.0), 0.0) == 0.0


def test_k0_oracle_matches_small_argument_form():
    x = 1e-3
    approx = -math.log(x / 2) - 0.5772156649015329
    assert oracle.k0_by_quadrature(x, 2**14) == pytest.approx(approx, abs=1e-5)
    with pytest.raises(DomainError):
        oracle.k0_by_quadrature(0.0)


def test_finite_cylinder_perimeter_part():
    # a kernel that vanishes on the cylinder isolates the perimeter term
    k = truncated(1.0, 1e-9)
    est = oracle.finite_cylinder_ratio(k, 1.0, 1e3, n_quad=16, n_inner=16)
    assert est.value == pytest.approx(2.0 + 2e-3, abs=1e-8)


@pytest.mark.parametrize("k,l", [(yukawa(0.56), 2.09), (truncated(1.0, 1.1), 0.55), (riesz(2.5), 1.0)], ids=str)
def test_finite_cylinder_tends_to_infinite_cylinder(k, l):
    est = oracle.finite_cylinder_ratio(k, l, 1e3 * l)
    assert est.value == pytest.approx(sigma_cyl(k, l), rel=1e-3)


def test_finite_cylinder_interaction_part_increases_with_length():
    k, l = yukawa(0.56), 2.09
    parts = [oracle.finite_cylinder_ratio(k, l, L, n_quad=128, n_inner=512).value - 2 / l - 2 / L
             for L in (2.0, 5.0, 20.0, 100.0, 1000.0)]
    assert all(b > a for a, b in zip(parts, parts[1:]))
    assert parts[-1] < sigma_cyl(k, l) - 2 / l


def test_finite_cylinder_needs_three_dimensions():
    with pytest.raises(UnsupportedConfiguration):
        oracle.finite_cylinder_ratio(riesz(2.5, 4), 1.0, 10.0)


def test_finite_cylinder_riesz_gap_shrinks_like_power_of_length():
    # the missing far field decays like L^(2 - alpha); at alpha = 2 the gap halves as L doubles
    k, l = riesz(2.0), 1.0
    gaps = [sigma_cyl(k, l) - (oracle.finite_cylinder_ratio(k, l, L, n_quad=256).value - 2 / L)
            for L in (250.0, 500.0, 1000.0)]
    assert all(g > 0 for g in gaps)
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.1)
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=0.1)


def test_finite_cylinder_outer_rule_is_converged():
    k, l = riesz(2.5), 1.0
    a = oracle.finite_cylinder_ratio(k, l, 100.0, n_quad=256).value
    b = oracle.finite_cylinder_ratio(k, l, 100.0, n_quad=1024).value
    assert a == pytest.approx(b, rel=1e-9)
