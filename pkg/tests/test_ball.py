from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from droplet import ball
from droplet.ball import BallRegime
from droplet.enclosure import Enclosure
from droplet.kernels import riesz, truncated, yukawa
from droplet.oracle import ball_energy_by_slicing
from droplet.specfun import Certified

COULOMB_UNIT_BALL = 32 * math.pi**2 / 15


def test_coulomb_ball_energy():
    for R in (0.5, 1.0, 2.0):
        assert ball.riesz_ball_energy(3, 1.0, R) == pytest.approx(COULOMB_UNIT_BALL * R**5, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.floats(0.1, 0.9), st.floats(0.1, 5.0))
def test_riesz_ball_energy_scaling(n, frac, R):
    alpha = frac * n
    one = ball.riesz_ball_energy(n, alpha, 1.0)
    assert ball.riesz_ball_energy(n, alpha, R) == pytest.approx(R ** (2 * n - alpha) * one, rel=1e-12)


@pytest.mark.parametrize("k", [riesz(1.0), riesz(0.5), riesz(2.0), truncated(1.0, 1.0), truncated(2.0, 0.6),
                               yukawa(1.0), yukawa(0.3)])
def test_closed_forms_match_slicing_oracle(k):
    closed = ball.ball_energy(k, 1.0)
    assert closed == pytest.approx(ball_energy_by_slicing(k, 1.0).value, rel=1e-8)


def test_riesz_optimal_ratio_closed_form():
    res = ball.rho_ball_riesz(3, 1.0)
    assert res.regime is BallRegime.RIESZ_CLOSED_FORM
    assert res.rho == pytest.approx(4.5 * (16 * math.pi / 15) ** (1 / 3), rel=1e-14)
    assert res.r_star == pytest.approx((15 / (16 * math.pi)) ** (1 / 3), rel=1e-14)
    assert res.rho == pytest.approx(6.733983468, abs=1e-9)


@pytest.mark.parametrize("n,alpha", [(3, 1.0), (3, 2.0), (4, 1.5), (6, 4.0)])
def test_riesz_ratio_is_grid_minimum(n, alpha):
    k = riesz(alpha, n)
    res = ball.rho_ball_riesz(n, alpha)
    R = np.linspace(0.5, 1.5, 200001) * res.r_star
    vals = n / R + R ** (k.beta - 1) * ball.riesz_ball_energy(n, alpha, 1.0) / ball.unit_ball_volume(n)
    assert res.rho == pytest.approx(vals.min(), rel=1e-9)
    h = 1e-5 * res.r_star
    slope = (ball.ball_ratio(k, res.r_star + h) - ball.ball_ratio(k, res.r_star - h)) / (2 * h)
    assert abs(slope) < 1e-6


def test_truncated_energy_equals_riesz_when_cutoff_exceeds_diameter():
    assert ball.trunc_ball_energy(3, 1.0, 2.5, 1.0) == ball.riesz_ball_energy(3, 1.0, 1.0)


@pytest.mark.parametrize("n,alpha", [(3, 1.0), (3, 2.5), (4, 1.0), (5, 3.3)])
def test_truncated_energy_continuous_at_diameter(n, alpha):
    R = 0.8
    at = ball.trunc_ball_energy(n, alpha, 2 * R, R)
    assert at == pytest.approx(ball.riesz_ball_energy(n, alpha, R), rel=1e-10)
    below = ball.trunc_ball_energy(n, alpha, 2 * R * (1 - 1e-9), R)
    assert below == pytest.approx(at, rel=1e-7)


def test_truncated_energy_tends_to_riesz():
    R = 1.0
    # beyond kappa = 2R the two coincide exactly; just below, the gap is tiny
    gap = abs(ball.trunc_ball_energy(3, 1.0, 1e3 * R, R) / ball.riesz_ball_energy(3, 1.0, R) - 1)
    assert gap < 1e-10
    near = abs(ball.trunc_ball_energy(3, 1.0, 1.999 * R, R) / ball.riesz_ball_energy(3, 1.0, R) - 1)
    assert near < 1e-6


def test_truncated_energy_increasing_in_cutoff():
    vals = [ball.trunc_ball_energy(3, 1.0, k, 1.0) for k in np.linspace(0.05, 2.0, 60)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_truncated_thresholds_coulomb():
    lo, hi = ball.trunc_thresholds(1.0)
    assert lo == pytest.approx((3 / math.pi) ** (1 / 3), rel=1e-15)
    assert hi == pytest.approx((15 / (2 * math.pi)) ** (1 / 3), rel=1e-15)
    assert lo < 1.1 < hi


def test_truncated_optimum_at_eleven_tenths():
    res = ball.rho_ball_trunc(1.0, 1.1)
    assert res.regime is BallRegime.TRUNC_INTERMEDIATE
    assert res.rho == pytest.approx(6.6199226744, abs=1e-9)
    assert res.lambda_star == pytest.approx(math.sqrt(5 / math.pi * (math.pi / 3 - (10 / 11) ** 3)), rel=1e-14)


def test_truncated_optimum_matches_grid_over_radius():
    k = truncated(1.0, 1.1)
    R = np.linspace(0.05, 50.0, 200000)
    best = min(ball.ball_ratio(k, r) for r in R[(R > 0.6) & (R < 1.0)])
    coarse = min(ball.ball_ratio(k, r) for r in R[::50])
    res = ball.rho_ball_trunc(1.0, 1.1)
    assert coarse >= res.rho - 1e-12
    assert res.rho == pytest.approx(best, abs=1e-6)


def test_truncated_ratio_formula_matches_energy_formula():
    kappa = 1.1
    for lam in (0.2, 0.5, 0.9):
        R = kappa / (2 * lam)
        assert ball.trunc_f(1.0, kappa, lam) == pytest.approx(ball.ball_ratio(truncated(1.0, kappa), R), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_truncated_regime_boundaries_are_continuous(alpha):
    lo, hi = ball.trunc_thresholds(alpha)
    for edge, below, above in ((lo, BallRegime.TRUNC_SUBCRITICAL, BallRegime.TRUNC_INTERMEDIATE),
                               (hi, BallRegime.TRUNC_INTERMEDIATE, BallRegime.TRUNC_RIESZ_REGIME)):
        a = ball.rho_ball_trunc(alpha, edge - 1e-9)
        b = ball.rho_ball_trunc(alpha, edge + 1e-9)
        assert a.regime is below and b.regime is above
        assert abs(a.rho - b.rho) < 1e-6


def test_truncated_subcritical_reports_infinite_radius():
    res = ball.rho_ball_trunc(1.0, 0.5)
    assert res.r_star == math.inf and res.lambda_star == 0.0
    assert res.rho == pytest.approx(2 * math.pi * 0.25, rel=1e-15)
    assert ball.trunc_f(1.0, 0.5, 0.0) == pytest.approx(res.rho, rel=1e-15)


def test_yukawa_energy_limits():
    R = 1.0
    for kappa in (1e3, 1e6):
        gap = abs(ball.yukawa_ball_energy(kappa * R, R) / (COULOMB_UNIT_BALL * R**5) - 1)
        assert gap < 2 / kappa
    lam = 1e-3
    small = ball.yukawa_ball_energy(2 * R * lam, R)
    assert small == pytest.approx(R**5 * 64 * math.pi**2 * lam**2 / 3, rel=1e-2)


def test_yukawa_series_branch_is_continuous():
    for f in (ball._bracket, ball._bracket_d1, ball._bracket_d2):
        a, b = f(2.0), f(2.0 + 1e-12)
        assert b == pytest.approx(a, rel=1e-9)


def test_yukawa_f_special_values():
    kappa = 0.56
    assert ball.yukawa_f(kappa, 0.0) == pytest.approx(4 * math.pi * kappa**2, rel=1e-15)
    assert ball.yukawa_df(kappa, 0.0) == pytest.approx(6 / kappa - 12 * math.pi * kappa**2, rel=1e-14)


def test_yukawa_f_strictly_convex():
    lam = np.logspace(-3, 3, 1000)
    for kappa in (0.3, 0.56, 2.0):
        assert all(ball.yukawa_d2f(kappa, x) > 0 for x in lam)


def test_yukawa_derivative_matches_finite_differences():
    kappa = 0.56
    for lam in np.logspace(-2, 1, 30):
        h = 1e-5 * lam
        fd = (ball.yukawa_f(kappa, lam + h) - ball.yukawa_f(kappa, lam - h)) / (2 * h)
        assert ball.yukawa_df(kappa, lam) == pytest.approx(fd, rel=1e-6, abs=1e-9)
        fd2 = (ball.yukawa_df(kappa, lam + h) - ball.yukawa_df(kappa, lam - h)) / (2 * h)
        assert ball.yukawa_d2f(kappa, lam) == pytest.approx(fd2, rel=1e-5, abs=1e-8)


def test_yukawa_f_matches_energy_form():
    k = yukawa(0.7)
    for lam in (0.05, 0.4, 3.0):
        R = 0.7 / (2 * lam)
        assert ball.yukawa_f(0.7, lam) == pytest.approx(ball.ball_ratio(k, R), rel=1e-12)


def test_yukawa_optimum_at_056():
    res = ball.rho_ball_yukawa(0.56)
    assert res.regime is BallRegime.YUKAWA_INTERIOR
    assert 0.0884 < res.lambda_star < 0.0885
    assert res.rho == pytest.approx(3.8755031882, abs=1e-9)


def test_yukawa_flat_threshold_is_continuous():
    t = ball.yukawa_flat_threshold()
    assert t == pytest.approx((2 * math.pi) ** (-1 / 3), rel=1e-15)
    a = ball.rho_ball_yukawa(t)
    b = ball.rho_ball_yukawa(t * (1 + 1e-9))
    assert a.regime is BallRegime.YUKAWA_FLAT
    assert b.regime is BallRegime.YUKAWA_INTERIOR
    # at the same kappa the interior optimum sits next to lambda = 0
    assert b.rho == pytest.approx(4 * math.pi * (t * (1 + 1e-9)) ** 2, abs=1e-9)
    assert a.rho == pytest.approx(ball.yukawa_f(t, 0.0), abs=1e-15)


def test_yukawa_certified_values_enclose_fast_values():
    mode = Certified(128)
    for lam in ("0.0884", "0.0885", "0.5"):
        f = ball.yukawa_f("56/100", lam, mode)
        df = ball.yukawa_df("56/100", lam, mode)
        assert isinstance(f, Enclosure)
        assert f.lo - 1e-12 <= ball.yukawa_f(0.56, float(lam)) <= f.hi + 1e-12
        assert df.lo - 1e-12 <= ball.yukawa_df(0.56, float(lam)) <= df.hi + 1e-12
        assert f.width < 1e-30


@pytest.mark.parametrize("k", [riesz(1.0), riesz(2.0, 4), truncated(1.0, 1.1), truncated(1.0, 0.5),
                               truncated(1.0, 3.0), yukawa(0.56), yukawa(0.3), yukawa(2.0)])
def test_optimal_ratio_is_below_every_ball(k):
    rho = ball.rho_ball(k).rho
    rng = np.random.default_rng(11)
    for R in rng.uniform(0.05, 20.0, 100):
        assert rho <= ball.ball_ratio(k, R) + 1e-12
