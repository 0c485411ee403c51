"""Special functions and constants in fast (float) and certified (enclosure) modes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import special as _sp

from droplet import enclosure as enc
from droplet.enclosure import Enclosure
from droplet.errors import DomainError


@dataclass(frozen=True)
class Fast:
    """Best-effort double precision evaluation."""


@dataclass(frozen=True)
class Certified:
    """Enclosure-returning evaluation at ``precision`` bits of working precision."""

    precision: int = 128

    def __post_init__(self):
        if self.precision < 2:
            raise DomainError("precision must be at least 2 bits")


EvalMode = Union[Fast, Certified]
FAST = Fast()


def gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


def beta_incomplete(z: float, x: float, y: float) -> float:
    """Non-regularized incomplete Beta integral of t^(x-1) (1-t)^(y-1) over [0, z]."""
    if not (0.0 <= z <= 1.0):
        raise DomainError(f"beta_incomplete requires 0 <= z <= 1, got {z}")
    if not (x > 0 and y > 0):
        raise DomainError("beta_incomplete requires positive shape parameters")
    if z == 0.0:
        return 0.0
    return float(_sp.betainc(x, y, z) * _sp.beta(x, y))


# ---------------------------------------------------------------------------
# K0
# ---------------------------------------------------------------------------

def bessel_k0(x, mode: EvalMode = FAST):
    """Modified Bessel function K0.

    Fast mode accepts scalars or arrays and returns floats.  Certified mode
    takes a number or an :class:`Enclosure` and returns an enclosure computed
    from the ascending series with a rigorous tail bound.
    """
    if isinstance(mode, Certified):
        return _k0_enclosure(x, mode.precision)
    if isinstance(x, Enclosure):
        raise TypeError("fast mode does not accept enclosures")
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("bessel_k0 requires x > 0")
    out = _sp.k0(arr)
    return float(out) if out.ndim == 0 else out


def _k0_enclosure(x, prec: int) -> Enclosure:
    if not isinstance(x, Enclosure):
        x = enc.enclose(x, prec)
    if not x.certainly_positive():
        raise DomainError("bessel_k0 requires x > 0")
    xhi = x.float_bounds()[1]
    # Terms grow like exp(2x) before the sum settles near exp(-x): pad accordingly.
    extra = int(math.ceil(2.886 * xhi))
    wp = prec + 20 + ((extra + 15) // 16) * 16
    X = x.with_prec(wp) if x.prec < wp else x
    X = Enclosure._raw(X._a, X._b, wp)
    q = X.sqr().scale2(-2)
    lead = enc.log(X.scale2(-1)) + enc.euler_gamma(wp)  # ln(x/2) + gamma
    qhi = q.float_bounds()[1]
    # For k >= kmin the term ratio is at most 1.5 q/(k+1)^2 <= 1/2.
    kmin = max(2, int(math.ceil(math.sqrt(3.0 * qhi))))
    term = Enclosure._raw(enc._ONE, enc._ONE, wp)  # q^k/(k!)^2
    harm = Enclosure(0, prec=wp)
    one = Enclosure(1, prec=wp)
    total = -lead
    k = 0
    eps = 2.0 ** (-(prec + 8))
    while True:
        k += 1
        term = term * q / (k * k)
        harm = harm + one / k
        t = term * (harm - lead)
        total = total + t
        if k >= kmin:
            tb = abs(t).float_bounds()[1]
            if tb <= eps * 1e-3 or tb == 0.0:
                break
    # Tail after index k: the next term bounds the tail up to a factor 2, and the
    # next term is at most 1.5 q/(k+1)^2 times the current one.
    tmag = enc._abs_hi_raw(t)
    ratio = (q * Fraction(3, 2) / ((k + 1) ** 2)).float_bounds()[1]
    bound_f = Fraction(2) * Fraction(ratio) * _frac(tmag)
    rem = Enclosure(-bound_f, bound_f, prec=wp)
    return (total + rem).with_prec(prec)


def _frac(raw) -> Fraction:
    return enc._raw_to_fraction(raw)


def k0_upper_envelope(x: float) -> float:
    """The elementary bound exp(-x) sqrt(pi/(2x)) that K0 stays below."""
    return math.exp(-x) * math.sqrt(math.pi / (2.0 * x))


# ---------------------------------------------------------------------------
# Catalan's constant
# ---------------------------------------------------------------------------

def catalan_partial_sum(n: int) -> Fraction:
    """Exact partial sum of (-1)^k/(2k+1)^2 for k = 0..n."""
    s = Fraction(0)
    for k in range(n + 1):
        s += Fraction((-1) ** k, (2 * k + 1) ** 2)
    return s


def catalan_partial_enclosure(n: int, prec: int = 128) -> Enclosure:
    """Enclosure from the partial sum up to index n and the first omitted term."""
    s = catalan_partial_sum(n)
    nxt = Fraction((-1) ** (n + 1), (2 * n + 3) ** 2)
    return Enclosure(min(s, s + nxt), max(s, s + nxt), prec=prec)


def catalan(mode: EvalMode = FAST, digits: int = 10):
    """Catalan's constant.

    Fast mode uses the rapidly converging central-binomial series.  Certified
    mode sums the defining alternating series in interval arithmetic until the
    first omitted term is below 10**-digits.
    """
    if isinstance(mode, Certified):
        return _catalan_enclosure(digits, mode.precision)
    s = 0.0
    term = 1.0  # (n!)^2/(2n)!
    for n in range(60):
        s += term / (2 * n + 1) ** 2
        term *= (n + 1) / (2 * (2 * n + 1))
    return math.pi / 8.0 * math.log(2.0 + math.sqrt(3.0)) + 3.0 / 8.0 * s


@lru_cache(maxsize=32)
def _catalan_enclosure(digits: int, prec: int) -> Enclosure:
    # Need 1/(2N+3)^2 <= 10^-digits.
    n = int(math.ceil((math.sqrt(10.0 ** digits) - 3) / 2)) + 1
    n = max(n, 0)
    wp = prec + 16 + int(math.log2(n + 2)) + 1
    total = Enclosure(0, prec=wp)
    for k in range(n + 1):
        d = (2 * k + 1) ** 2
        t = Enclosure(Fraction(1, d), prec=wp)
        total = total + t if k % 2 == 0 else total - t
    nxt = Fraction(1, (2 * n + 3) ** 2)
    if n % 2 == 0:
        total = Enclosure._raw(enc._sub(total._a, enc._to_raw(nxt, wp, enc._C), wp, enc._F), total._b, wp)
    else:
        total = Enclosure._raw(total._a, enc._add(total._b, enc._to_raw(nxt, wp, enc._C), wp, enc._C), wp)
    return total.with_prec(prec)


def pi_enclosure(precision: int = 128) -> Enclosure:
    if precision < 2:
        raise DomainError("precision must be at least 2 bits")
    return enc.pi(precision)


def euler_gamma_enclosure(precision: int = 128) -> Enclosure:
    return enc.euler_gamma(precision)
