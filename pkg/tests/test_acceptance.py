"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are printed
to the terminal even when output capture is on.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from droplet import ball, cli, cylinder, oracle, specfun
from droplet.certify import Verdict, certify_trunc_coulomb, certify_yukawa, riesz_ratio
from droplet.kernels import riesz, truncated, yukawa


@pytest.fixture
def verdict(capsys):
    def emit(label: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[acceptance {label}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def trunc_certificate():
    t0 = time.perf_counter()
    rep = certify_trunc_coulomb("11/10", precision=128)
    return rep, time.perf_counter() - t0


def test_criterion_1_truncated_cylinder_inclusion_and_separation(verdict, trunc_certificate):
    rep, elapsed = trunc_certificate
    up_lo, up_hi = rep.upper.float_bounds()
    lo_lo, lo_hi = rep.lower.float_bounds()
    ok = (rep.verdict is Verdict.CERTIFIED
          and rep.upper.certainly_gt(Fraction("6.59")) and rep.upper.certainly_lt(Fraction("6.61"))
          and rep.upper.width <= 1e-4 and rep.lower.width <= 1e-4
          and rep.upper.certainly_lt(rep.lower)
          and elapsed < 10)
    verdict("1 (cylinder side, separation)", ok,
            f"sigma_cyl(kappa/2) in [{up_lo:.12f}, {up_hi:.12f}], rho_ball in [{lo_lo:.12f}, {lo_hi:.12f}], "
            f"verdict {rep.verdict.value}, {elapsed:.2f} s")


def test_criterion_1_ball_inclusion(verdict, trunc_certificate):
    rep, _ = trunc_certificate
    lo, hi = rep.lower.float_bounds()
    ok = rep.lower.certainly_gt(Fraction("6.79")) and rep.lower.certainly_lt(Fraction("6.81"))
    verdict("1 (ball inclusion 6.79 < rho < 6.81)", ok, f"rho_ball enclosure [{lo:.12f}, {hi:.12f}]")


def test_criterion_2_yukawa_certification(verdict):
    t0 = time.perf_counter()
    rep = certify_yukawa("56/100", "209/100", 30000, ("884/10000", "885/10000"), precision=128)
    elapsed = time.perf_counter() - t0
    lo_lo, lo_hi = rep.lower.float_bounds()
    up_lo, up_hi = rep.upper.float_bounds()
    ok = (rep.sign_check is True
          and rep.upper.certainly_lt(Fraction("3.8747"))
          and rep.lower.certainly_gt(Fraction("3.8755"))
          and rep.verdict is Verdict.CERTIFIED
          and elapsed < 300)
    verdict("2", ok,
            f"upper bound in [{up_lo:.10f}, {up_hi:.10f}] (<= 3.8747), lower bound in [{lo_lo:.10f}, "
            f"{lo_hi:.10f}] (>= 3.8755), sign check {rep.sign_check}, verdict {rep.verdict.value}, "
            f"{elapsed:.1f} s")


def test_criterion_3_yukawa_point_value(verdict):
    t0 = time.perf_counter()
    sigma = cylinder.sigma_cyl_yukawa(0.56, 2.09).sigma
    elapsed = time.perf_counter() - t0
    ok = abs(sigma - 3.8730) <= 5e-4 and elapsed < 1
    verdict("3", ok, f"sigma = {sigma:.10f} (target 3.8730 +- 5e-4), {elapsed:.3f} s")


def test_criterion_4_riesz_ratios(verdict):
    t0 = time.perf_counter()
    cases = {(4, 2): Fraction(27, 20), (5, 3): Fraction(28, 25), (7, 5): Fraction(405, 392)}
    ok = True
    for (n, alpha), base in cases.items():
        r = riesz_ratio(n, alpha)
        ok &= r.base == base and abs(r.tau - float(base) ** (1 / 3)) <= 1e-12
    above_one = all(riesz_ratio(n, a).tau > 1 for n in range(3, 13) for a in range(2, n))
    elapsed = time.perf_counter() - t0
    ok = ok and above_one and elapsed < 1
    verdict("4 (27/20, 28/25, 405/392; tau > 1 for n <= 12)", ok,
            f"bases {[str(riesz_ratio(n, a).base) for n, a in cases]}, tau > 1 everywhere: {above_one}")


def test_criterion_4_n6_alpha4(verdict):
    r = riesz_ratio(6, 4)
    target = Fraction(25, 23)
    ok = r.base == target and abs(r.tau - float(target) ** (1 / 3)) <= 1e-12
    verdict("4 (n=6, alpha=4 base 25/23)", ok,
            f"exact base {r.base} (tau {r.tau:.12f}), Gamma form {r.tau_gamma_form:.12f}, "
            f"target (25/23)^(1/3) = {float(target) ** (1 / 3):.12f}")


def test_criterion_5_quadrature_order(verdict):
    t0 = time.perf_counter()
    rep = cli.converge_report(0.56, 2.09, [2**k for k in range(5, 13)], 2**14)
    elapsed = time.perf_counter() - t0
    ok = 3.5 <= rep.fitted_order <= 4.5 and elapsed < 30
    verdict("5", ok, f"fitted order {rep.fitted_order:.3f} over {len(rep.fit_rows)} rows, {elapsed:.2f} s")


def test_criterion_6_oracle_equivalence(verdict):
    t0 = time.perf_counter()
    kernels = [riesz(a) for a in (0.5, 1.0, 2.0)] + [truncated(1.0, k) for k in (0.5, 1.1, 3.0)] \
        + [yukawa(k) for k in (0.3, 0.56, 2.0)]
    worst = 0.0
    for k in kernels:
        for R in (0.6, 1.0, 1.7):
            closed = ball.ball_energy(k, R)
            worst = max(worst, abs(oracle.ball_energy_by_slicing(k, R).value / closed - 1))
    mc = oracle.ball_energy_monte_carlo(riesz(1.0), 1.0, samples=10**7, seed=2024)
    exact = ball.ball_energy(riesz(1.0), 1.0)
    z = abs(mc.value - exact) / mc.stderr
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-7 and z < 4 and elapsed < 120
    verdict("6", ok, f"worst slicing relative error {worst:.2e}; Monte Carlo {mc.value:.5f} +- "
                     f"{mc.stderr:.5f} vs {exact:.5f} ({z:.2f} sigma); {elapsed:.1f} s")


def test_criterion_7_catalan_identities(verdict):
    t0 = time.perf_counter()
    c = specfun.catalan()
    base = math.pi * (7 / 64 - 3 * math.log(2) / 16)
    f = lambda t: math.cos(t) ** 4 * math.log1p(math.sin(t))
    plus, _ = quad(f, 0, math.pi / 2, epsabs=1e-14, epsrel=1e-14, limit=200)
    minus, _ = quad(f, -math.pi / 2, 0, epsabs=1e-14, epsrel=1e-14, limit=200)
    e1 = abs(plus - (base - 11 / 24 + 3 * c / 4))
    e2 = abs(minus - (base + 11 / 24 - 3 * c / 4))
    elapsed = time.perf_counter() - t0
    ok = e1 < 1e-10 and e2 < 1e-10 and elapsed < 5
    verdict("7", ok, f"errors {e1:.1e} and {e2:.1e}")


def test_criterion_8_sweeps(verdict):
    t0 = time.perf_counter()
    kt = np.linspace(0.5, 2.0, 100)
    trunc_rows = cli.run_sweep("trunc", kt)
    ky = np.linspace(0.3, 1.5, 100)
    yuk_rows = cli.run_sweep("yukawa", ky)
    elapsed = time.perf_counter() - t0

    k_min, _ = ball.trunc_thresholds(1.0)
    switch_ok = all((r.regime == "TruncSubcritical") == (r.kappa <= k_min) for r in trunc_rows)
    near = sorted(trunc_rows, key=lambda r: abs(r.kappa - 1.1))[:2]
    trunc_window = [r.kappa for r in trunc_rows if r.sigma_cyl < r.rho_ball]
    trunc_ok = switch_ok and all(r.sigma_cyl < r.rho_ball for r in near)

    flat = ball.yukawa_flat_threshold()
    flat_ok = all((r.regime == "YukawaFlat") == (r.kappa <= flat) for r in yuk_rows)
    near_y = sorted(yuk_rows, key=lambda r: abs(r.kappa - 0.56))[:2]
    yuk_window = [r.kappa for r in yuk_rows if r.sigma_cyl < r.rho_ball]
    yuk_ok = flat_ok and all(r.sigma_cyl < r.rho_ball for r in near_y)

    ok = trunc_ok and yuk_ok and elapsed < 300
    verdict("8", ok,
            f"trunc switch at {k_min:.6f} ok={switch_ok}, window [{min(trunc_window):.3f}, {max(trunc_window):.3f}]; "
            f"yukawa flat for kappa <= {flat:.6f} ok={flat_ok}, window [{min(yuk_window):.3f}, "
            f"{max(yuk_window):.3f}]; {elapsed:.1f} s")


def test_criterion_9_limits(verdict):
    R = 1.0
    gap = abs(ball.yukawa_ball_energy(1e6 * R, R) / (32 * math.pi**2 * R**5 / 15) - 1)
    rel = {}
    for k, l in ((yukawa(0.56), 2.09), (truncated(1.0, 1.1), 0.55)):
        finite = oracle.finite_cylinder_ratio(k, l, 1e3 * l).value
        rel[k.format()] = abs(finite / cylinder.sigma_cyl(k, l) - 1)
    ok = gap < 1e-6 and all(v < 1e-3 for v in rel.values())
    detail = ", ".join(f"{name}: {v:.1e}" for name, v in rel.items())
    verdict("9", ok, f"Yukawa ball energy gap at kappa = 1e6 R: {gap:.1e}; finite cylinder gaps {detail}")
