"""Interaction energies of balls and optimal ball energy/mass ratios."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from droplet import enclosure as enc
from droplet.enclosure import Enclosure
from droplet.errors import DomainError, UnsupportedConfiguration
from droplet.kernels import Family, Kernel
from droplet.numerics import newton
from droplet.specfun import FAST, Certified, beta_incomplete


class BallRegime(str, enum.Enum):
    RIESZ_CLOSED_FORM = "RieszClosedForm"
    TRUNC_SUBCRITICAL = "TruncSubcritical"
    TRUNC_INTERMEDIATE = "TruncIntermediate"
    TRUNC_RIESZ_REGIME = "TruncRieszRegime"
    YUKAWA_FLAT = "YukawaFlat"
    YUKAWA_INTERIOR = "YukawaInterior"


@dataclass(frozen=True)
class BallRatioResult:
    rho: Union[float, Enclosure]
    regime: BallRegime
    r_star: float | None = None
    lambda_star: float | None = None


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return n * unit_ball_volume(n)


# ---------------------------------------------------------------------------
# Riesz
# ---------------------------------------------------------------------------

def riesz_ball_energy(n: int, alpha: float, R: float) -> float:
    if not (0 < alpha < n):
        raise DomainError("alpha must lie in (0, n)")
    if not R > 0:
        raise DomainError("radius must be positive")
    b = n + 1.0 - alpha
    log_c = (b * math.log(2.0) + (n - 0.5) * math.log(math.pi) - math.log(b - 1.0)
             + math.lgamma(b / 2.0) - math.lgamma(n / 2.0) - math.lgamma((n + b + 1.0) / 2.0))
    return math.exp(log_c) * R ** (n + b - 1.0)


def rho_ball_riesz(n: int, alpha: float) -> BallRatioResult:
    b = n + 1.0 - alpha
    i1 = riesz_ball_energy(n, alpha, 1.0)
    vol = unit_ball_volume(n)
    rho = n * b / (b - 1.0) * ((b - 1.0) * i1 / (n * vol)) ** (1.0 / b)
    r_star = (n * vol / ((b - 1.0) * i1)) ** (1.0 / b)
    return BallRatioResult(rho, BallRegime.RIESZ_CLOSED_FORM, r_star=r_star)


# ---------------------------------------------------------------------------
# truncated Riesz
# ---------------------------------------------------------------------------

def trunc_ball_energy(n: int, alpha: float, kappa: float, R: float) -> float:
    if not (kappa > 0 and R > 0):
        raise DomainError("kappa and R must be positive")
    if kappa > 2.0 * R:
        return riesz_ball_energy(n, alpha, R)
    b = n + 1.0 - alpha
    lam = kappa / (2.0 * R)
    pref = n * (n - 1) * unit_ball_volume(n) * unit_ball_volume(n - 1) / (b * (b - 1.0))
    t1 = 2.0 ** (b - 1.0) * R ** (n + b - 1.0) * beta_incomplete(lam * lam, (b + 2.0) / 2.0, (n - 1.0) / 2.0)
    t2 = (b - 1.0) * kappa**b * R ** (n - 1.0) / (n - 1.0) * (1.0 - lam * lam) ** ((n - 1.0) / 2.0)
    t3 = b * kappa ** (b - 1.0) * R**n * beta_incomplete(1.0 - lam * lam, (n - 1.0) / 2.0, 1.5)
    return pref * (t1 - t2 + t3)


def trunc_thresholds(alpha: float) -> tuple[float, float]:
    """(kappa_min, kappa_max) separating the three regimes in dimension 3."""
    b = 4.0 - alpha
    return (b / math.pi) ** (1.0 / b), (b * (b + 2.0) / (2.0 * math.pi)) ** (1.0 / b)


def trunc_f(alpha: float, kappa: float, lam: float) -> float:
    """Ball energy/mass ratio at lambda = kappa/(2R), valid for lambda <= 1, n = 3."""
    b = 4.0 - alpha
    return 6.0 * lam / kappa + 6.0 * math.pi * kappa ** (b - 1.0) * (
        lam**3 / (3.0 * (b + 2.0)) - lam / b + 2.0 / (3.0 * (b - 1.0)))


def trunc_lambda_star(alpha: float, kappa: float) -> float:
    b = 4.0 - alpha
    val = (b + 2.0) / math.pi * (math.pi / b - kappa ** (-b))
    return math.sqrt(max(val, 0.0))


def rho_ball_trunc(alpha: float, kappa: float) -> BallRatioResult:
    if not (0 < alpha < 3):
        raise DomainError("alpha must lie in (0, 3)")
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    b = 4.0 - alpha
    k_min, k_max = trunc_thresholds(alpha)
    if kappa <= k_min:
        rho = 4.0 * math.pi * kappa ** (b - 1.0) / (b - 1.0)
        return BallRatioResult(rho, BallRegime.TRUNC_SUBCRITICAL, r_star=math.inf, lambda_star=0.0)
    if kappa < k_max:
        lam = trunc_lambda_star(alpha, kappa)
        return BallRatioResult(trunc_f(alpha, kappa, lam), BallRegime.TRUNC_INTERMEDIATE,
                               lambda_star=lam)
    res = rho_ball_riesz(3, alpha)
    return BallRatioResult(res.rho, BallRegime.TRUNC_RIESZ_REGIME, r_star=res.r_star)


# ---------------------------------------------------------------------------
# Yukawa (n = 3, alpha = 1)
# ---------------------------------------------------------------------------

_SERIES_LAMBDA = 2.0
_SERIES_TERMS = 26
# Coefficients of the bracket in powers of 1/lambda, starting at the square.
_B_COEF = [(-1) ** j * (j + 2) * (j - 1) / math.factorial(j + 3) for j in range(2, 2 + _SERIES_TERMS)]


def _bracket(lam: float) -> float:
    """1/3 - lam (1 - 4 lam^2) - lam (4 lam^2 + 4 lam + 1) exp(-1/lam)."""
    if lam == 0:
        return 1.0 / 3.0
    if lam > _SERIES_LAMBDA:
        u = 1.0 / lam
        return sum(c * u ** (j + 2) for j, c in enumerate(_B_COEF))
    return 1.0 / 3.0 - lam * (1.0 - 4.0 * lam * lam) - lam * (4.0 * lam * lam + 4.0 * lam + 1.0) * math.exp(-1.0 / lam)


def _bracket_d1(lam: float) -> float:
    if lam == 0:
        return -1.0
    if lam > _SERIES_LAMBDA:
        u = 1.0 / lam
        return -sum((j + 2) * c * u ** (j + 3) for j, c in enumerate(_B_COEF))
    e = math.exp(-1.0 / lam)
    return -(1.0 - 12.0 * lam * lam + e * (12.0 * lam * lam + 12.0 * lam + 5.0 + 1.0 / lam))


def _bracket_d2(lam: float) -> float:
    if lam == 0:
        return 0.0
    if lam > _SERIES_LAMBDA:
        u = 1.0 / lam
        return sum((j + 2) * (j + 3) * c * u ** (j + 4) for j, c in enumerate(_B_COEF))
    e = math.exp(-1.0 / lam)
    return 24.0 * lam - e / lam**3 * (24.0 * lam**4 + 24.0 * lam**3 + 12.0 * lam**2 + 4.0 * lam + 1.0)


def yukawa_ball_energy(kappa: float, R: float) -> float:
    if not (kappa > 0 and R > 0):
        raise DomainError("kappa and R must be positive")
    lam = kappa / (2.0 * R)
    return R**5 * 64.0 * math.pi**2 * lam * lam * _bracket(lam)


def _yukawa_parts_enclosure(kappa, lam, prec: int):
    k = kappa if isinstance(kappa, Enclosure) else enc.enclose(kappa, prec)
    x = lam if isinstance(lam, Enclosure) else enc.enclose(lam, prec)
    if not x.certainly_positive():
        raise DomainError("certified evaluation needs lambda > 0")
    return k, x, enc.exp(-(1 / x)), enc.pi(prec)


def yukawa_f(kappa, lam, mode=FAST):
    """Ball energy/mass ratio as a function of lambda = kappa/(2R)."""
    if isinstance(mode, Certified):
        k, x, e, p = _yukawa_parts_enclosure(kappa, lam, mode.precision)
        br = Enclosure(1, prec=mode.precision) / 3 - x * (1 - 4 * x.sqr()) - x * (4 * x.sqr() + 4 * x + 1) * e
        return 6 * x / k + 12 * p * k.sqr() * br
    if lam < 0:
        raise DomainError("lambda must be non-negative")
    return 6.0 * lam / kappa + 12.0 * math.pi * kappa * kappa * _bracket(lam)


def yukawa_df(kappa, lam, mode=FAST):
    if isinstance(mode, Certified):
        k, x, e, p = _yukawa_parts_enclosure(kappa, lam, mode.precision)
        inner = 1 - 12 * x.sqr() + e / x * (12 * x ** 3 + 12 * x.sqr() + 5 * x + 1)
        return 6 / k - 12 * p * k.sqr() * inner
    if lam < 0:
        raise DomainError("lambda must be non-negative")
    return 6.0 / kappa + 12.0 * math.pi * kappa * kappa * _bracket_d1(lam)


def yukawa_d2f(kappa: float, lam: float) -> float:
    if lam < 0:
        raise DomainError("lambda must be non-negative")
    return 12.0 * math.pi * kappa * kappa * _bracket_d2(lam)


def yukawa_flat_threshold() -> float:
    return (2.0 * math.pi) ** (-1.0 / 3.0)


def rho_ball_yukawa(kappa: float, tol: float = 1e-12) -> BallRatioResult:
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    if kappa <= yukawa_flat_threshold():
        return BallRatioResult(4.0 * math.pi * kappa * kappa, BallRegime.YUKAWA_FLAT, lambda_star=0.0)
    grid = np.logspace(-4, 4, 161)
    vals = [yukawa_df(kappa, g) for g in grid]
    idx = next((i for i in range(len(grid) - 1) if vals[i] < 0 <= vals[i + 1]), None)
    if idx is None:
        lo, hi = 0.0, float(grid[0])
    else:
        lo, hi = float(grid[idx]), float(grid[idx + 1])
    res = newton(lambda t: yukawa_df(kappa, t), lambda t: yukawa_d2f(kappa, t),
                 0.5 * (lo + hi), tol=tol, max_iter=200, bracket=(lo, hi))
    lam = res.root
    return BallRatioResult(yukawa_f(kappa, lam), BallRegime.YUKAWA_INTERIOR, lambda_star=lam)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def ball_energy(kernel: Kernel, R: float) -> float:
    if kernel.family is Family.RIESZ:
        return riesz_ball_energy(kernel.n, kernel.alpha, R)
    if kernel.family is Family.TRUNC:
        return trunc_ball_energy(kernel.n, kernel.alpha, kernel.kappa, R)
    kernel.require_yukawa_setting()
    return yukawa_ball_energy(kernel.kappa, R)


def ball_ratio(kernel: Kernel, R: float) -> float:
    """(perimeter + interaction energy) / volume for the ball of radius R."""
    n = kernel.n
    return n / R + ball_energy(kernel, R) / (unit_ball_volume(n) * R**n)


def rho_ball(kernel: Kernel) -> BallRatioResult:
    if kernel.family is Family.RIESZ:
        return rho_ball_riesz(kernel.n, kernel.alpha)
    if kernel.family is Family.TRUNC:
        if kernel.n != 3:
            raise UnsupportedConfiguration("optimal truncated ball ratio is implemented for n=3 only")
        return rho_ball_trunc(kernel.alpha, kernel.kappa)
    kernel.require_yukawa_setting()
    return rho_ball_yukawa(kernel.kappa)
