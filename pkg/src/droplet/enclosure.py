"""Outward-rounded interval arithmetic on arbitrary-precision binary floats.

An :class:`Enclosure` is a pair ``[lo, hi]`` of binary floating-point numbers
guaranteed to bracket a real value.  Endpoints are mpmath raw mantissa/exponent
tuples; the four basic operations and ``sqrt`` use mpmath's correctly rounded
primitives in floor/ceiling mode.  Transcendental functions are evaluated by
argument reduction and truncated Taylor series whose remainder is added as an
explicit error interval, so every result is rigorous.

Example
-------
>>> x = Enclosure(2, prec=128)
>>> r = sqrt(x)
>>> r.contains(1.4142135623730951)
False
>>> r.certainly_gt(1.41421356) and r.certainly_lt(1.41421357)
True
"""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational

import mpmath
from mpmath import libmp

from droplet.errors import DomainError

DEFAULT_PREC = 128
_GUARD = 24

_F = libmp.round_floor
_C = libmp.round_ceiling
_ZERO = libmp.fzero
_ONE = libmp.fone

_add = libmp.mpf_add
_sub = libmp.mpf_sub
_mul = libmp.mpf_mul
_div = libmp.mpf_div
_lt = libmp.mpf_lt
_cmp = libmp.mpf_cmp
_neg = libmp.mpf_neg
_shift = libmp.mpf_shift


def _nonneg(r) -> bool:
    return r[0] == 0


def _nonpos(r) -> bool:
    return r[0] == 1 or not r[1]


def _is_finite(r) -> bool:
    return bool(r[1]) or r == _ZERO


def _to_raw(x, prec: int, rnd):
    """Convert an exact-ish number to a raw mpf, rounding in direction ``rnd``."""
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, Integral):
        return libmp.from_int(int(x), prec, rnd)
    if isinstance(x, Fraction) or isinstance(x, Rational):
        x = Fraction(x)
        return libmp.from_rational(x.numerator, x.denominator, prec, rnd)
    if isinstance(x, mpmath.mpf):
        r = x._mpf_
        if not _is_finite(r):
            raise DomainError(f"non-finite endpoint {x}")
        return libmp.mpf_pos(r, prec, rnd)
    if isinstance(x, (str, Decimal)):
        return _to_raw(parse_rational(x), prec, rnd)
    xf = float(x)
    if not math.isfinite(xf):
        raise DomainError(f"non-finite endpoint {x!r}")
    return libmp.from_float(xf, prec, rnd)


def parse_rational(text) -> Fraction:
    """Parse ``'p/q'``, a decimal string, or a number into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, (int, Decimal)):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(text)
    s = str(text).strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse {text!r} as a rational number") from exc


class Enclosure:
    """Closed interval ``[lo, hi]`` with outward rounding at ``prec`` bits."""

    __slots__ = ("_a", "_b", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PREC):
        if prec < 2:
            raise DomainError("precision must be at least 2 bits")
        if hi is None:
            hi = lo
        if isinstance(lo, Enclosure):
            a = libmp.mpf_pos(lo._a, prec, _F)
        else:
            a = _to_raw(lo, prec, _F)
        if isinstance(hi, Enclosure):
            b = libmp.mpf_pos(hi._b, prec, _C)
        else:
            b = _to_raw(hi, prec, _C)
        if _lt(b, a):
            raise DomainError(f"empty enclosure: lo={lo!r} > hi={hi!r}")
        self._a = a
        self._b = b
        self.prec = prec

    @classmethod
    def _raw(cls, a, b, prec: int) -> "Enclosure":
        obj = object.__new__(cls)
        obj._a = a
        obj._b = b
        obj.prec = prec
        return obj

    # -- inspection --------------------------------------------------------
    @property
    def lo(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._a)

    @property
    def hi(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._b)

    @property
    def width(self) -> mpmath.mpf:
        """Upper bound on ``hi - lo``."""
        return mpmath.mp.make_mpf(_sub(self._b, self._a, 64, _C))

    @property
    def mid(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(_shift(_add(self._a, self._b), -1))

    def float_bounds(self) -> tuple[float, float]:
        """Endpoints rounded outward to IEEE doubles."""
        return libmp.to_float(self._a, rnd=_F), libmp.to_float(self._b, rnd=_C)

    def contains(self, x) -> bool:
        """Exact membership test for a number or a sub-enclosure."""
        if isinstance(x, Enclosure):
            return not _lt(x._a, self._a) and not _lt(self._b, x._b)
        if isinstance(x, (Fraction, int, float)):
            q = Fraction(x)
        elif isinstance(x, str):
            q = parse_rational(x)
        else:
            q = _raw_to_fraction(mpmath.mpf(x)._mpf_)  # mpf or mpmath constant at current precision
        return _raw_to_fraction(self._a) <= q <= _raw_to_fraction(self._b)

    __contains__ = contains

    def certainly_lt(self, other) -> bool:
        o = _coerce(other, self.prec)
        return _lt(self._b, o._a)

    def certainly_gt(self, other) -> bool:
        o = _coerce(other, self.prec)
        return _lt(o._b, self._a)

    def certainly_positive(self) -> bool:
        return self._a[0] == 0 and bool(self._a[1])

    def certainly_negative(self) -> bool:
        return self._b[0] == 1

    def hull(self, other) -> "Enclosure":
        o = _coerce(other, self.prec)
        a = self._a if _lt(self._a, o._a) else o._a
        b = o._b if _lt(self._b, o._b) else self._b
        return Enclosure._raw(a, b, max(self.prec, o.prec))

    def intersect(self, other) -> "Enclosure":
        o = _coerce(other, self.prec)
        a = o._a if _lt(self._a, o._a) else self._a
        b = self._b if _lt(self._b, o._b) else o._b
        if _lt(b, a):
            raise DomainError("enclosures are disjoint")
        return Enclosure._raw(a, b, max(self.prec, o.prec))

    def with_prec(self, prec: int) -> "Enclosure":
        """Re-round the endpoints outward to ``prec`` bits."""
        return Enclosure._raw(libmp.mpf_pos(self._a, prec, _F), libmp.mpf_pos(self._b, prec, _C), prec)

    def to_dict(self) -> dict:
        lo, hi = self.float_bounds()
        return {"lo": lo, "hi": hi, "lo_exact": _raw_to_hex(self._a),
                "hi_exact": _raw_to_hex(self._b), "prec": self.prec}

    @classmethod
    def from_dict(cls, d: dict) -> "Enclosure":
        return cls._raw(_hex_to_raw(d["lo_exact"]), _hex_to_raw(d["hi_exact"]), int(d["prec"]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Enclosure):
            return NotImplemented
        return (_cmp(self._a, other._a) == 0 and _cmp(self._b, other._b) == 0
                and self.prec == other.prec)

    def __hash__(self):
        return hash((self._a, self._b, self.prec))

    def __repr__(self) -> str:
        lo = libmp.to_str(self._a, 20)
        hi = libmp.to_str(self._b, 20)
        return f"Enclosure([{lo}, {hi}], prec={self.prec})"

    # -- arithmetic --------------------------------------------------------
    def __neg__(self) -> "Enclosure":
        return Enclosure._raw(_neg(self._b), _neg(self._a), self.prec)

    def __pos__(self) -> "Enclosure":
        return self

    def __abs__(self) -> "Enclosure":
        if _nonneg(self._a):
            return self
        if _nonpos(self._b):
            return -self
        m = _neg(self._a) if _lt(self._b, _neg(self._a)) else self._b
        return Enclosure._raw(_ZERO, m, self.prec)

    def __add__(self, other) -> "Enclosure":
        o = _coerce(other, self.prec)
        p = max(self.prec, o.prec)
        return Enclosure._raw(_add(self._a, o._a, p, _F), _add(self._b, o._b, p, _C), p)

    __radd__ = __add__

    def __sub__(self, other) -> "Enclosure":
        o = _coerce(other, self.prec)
        p = max(self.prec, o.prec)
        return Enclosure._raw(_sub(self._a, o._b, p, _F), _sub(self._b, o._a, p, _C), p)

    def __rsub__(self, other) -> "Enclosure":
        return _coerce(other, self.prec) - self

    def __mul__(self, other) -> "Enclosure":
        o = _coerce(other, self.prec)
        p = max(self.prec, o.prec)
        a, b, c, d = self._a, self._b, o._a, o._b
        if _nonneg(a) and _nonneg(c):
            return Enclosure._raw(_mul(a, c, p, _F), _mul(b, d, p, _C), p)
        if _nonpos(b) and _nonpos(d):
            return Enclosure._raw(_mul(b, d, p, _F), _mul(a, c, p, _C), p)
        if _nonneg(a) and _nonpos(d):
            return Enclosure._raw(_mul(b, c, p, _F), _mul(a, d, p, _C), p)
        if _nonpos(b) and _nonneg(c):
            return Enclosure._raw(_mul(a, d, p, _F), _mul(b, c, p, _C), p)
        los = [_mul(u, v, p, _F) for u in (a, b) for v in (c, d)]
        his = [_mul(u, v, p, _C) for u in (a, b) for v in (c, d)]
        lo = los[0]
        for t in los[1:]:
            if _lt(t, lo):
                lo = t
        hi = his[0]
        for t in his[1:]:
            if _lt(hi, t):
                hi = t
        return Enclosure._raw(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Enclosure":
        o = _coerce(other, self.prec)
        p = max(self.prec, o.prec)
        c, d = o._a, o._b
        if _nonpos(d) and not _nonneg(c):
            return -(self / (-o))
        if not (_nonneg(c) and c[1]):
            raise ZeroDivisionError("divisor enclosure contains zero")
        a, b = self._a, self._b
        if _nonneg(a):
            return Enclosure._raw(_div(a, d, p, _F), _div(b, c, p, _C), p)
        if _nonpos(b):
            return Enclosure._raw(_div(a, c, p, _F), _div(b, d, p, _C), p)
        return Enclosure._raw(_div(a, c, p, _F), _div(b, c, p, _C), p)

    def __rtruediv__(self, other) -> "Enclosure":
        return _coerce(other, self.prec) / self

    def sqr(self) -> "Enclosure":
        x = abs(self)
        p = self.prec
        return Enclosure._raw(_mul(x._a, x._a, p, _F), _mul(x._b, x._b, p, _C), p)

    def __pow__(self, n: int) -> "Enclosure":
        if not isinstance(n, Integral) or n < 0:
            raise DomainError("only non-negative integer powers are supported")
        if n == 0:
            return Enclosure._raw(_ONE, _ONE, self.prec)
        if n % 2 == 0:
            base = abs(self)
        elif _nonneg(self._a):
            base = self
        elif _nonpos(self._b):
            return -((-self) ** n)
        else:
            lo = -((-Enclosure._raw(self._a, self._a, self.prec)) ** n)
            hi = Enclosure._raw(self._b, self._b, self.prec) ** n
            return Enclosure._raw(lo._a, hi._b, self.prec)
        p = self.prec
        return Enclosure._raw(_pow_dir(base._a, n, p, _F), _pow_dir(base._b, n, p, _C), p)

    def scale2(self, k: int) -> "Enclosure":
        """Exact multiplication by ``2**k``."""
        return Enclosure._raw(_shift(self._a, k), _shift(self._b, k), self.prec)


def _pow_dir(x, n: int, prec: int, rnd):
    # x >= 0, so rounding every product in the same direction bounds x**n.
    result = _ONE
    base = x
    while n:
        if n & 1:
            result = _mul(result, base, prec, rnd)
        n >>= 1
        if n:
            base = _mul(base, base, prec, rnd)
    return result


def _coerce(x, prec: int) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    if type(x) is int:
        return Enclosure._raw(libmp.from_int(x, prec, _F), libmp.from_int(x, prec, _C), prec)
    return Enclosure(x, prec=prec)


@lru_cache(maxsize=256)
def _odd_reciprocals(n_terms: int, prec: int, alternating: bool) -> tuple:
    """Enclosures of (+-1)^k/(2k+1) for k < n_terms."""
    out = []
    for k in range(n_terms):
        num = -1 if (alternating and k % 2) else 1
        out.append(Enclosure._raw(libmp.from_rational(num, 2 * k + 1, prec, _F),
                                  libmp.from_rational(num, 2 * k + 1, prec, _C), prec))
    return tuple(out)


def enclose(x, prec: int = DEFAULT_PREC) -> Enclosure:
    """Tightest enclosure of an exact number (int, Fraction, float, decimal or 'p/q' string)."""
    return _coerce(x, prec)


def _raw_to_fraction(r) -> Fraction:
    p, q = libmp.to_rational(r)
    return Fraction(int(p), int(q))


def _raw_to_hex(r) -> str:
    sign, man, exp, _ = r
    return f"{'-' if sign else ''}{int(man):#x}p{exp}"


def _hex_to_raw(s: str):
    neg = s.startswith("-")
    body = s[1:] if neg else s
    man_s, exp_s = body.split("p")
    man, exp = int(man_s, 16), int(exp_s)
    r = libmp.from_man_exp(man, exp)
    return _neg(r) if neg else r


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

# Euler's constant to 40 decimals; the enclosure adds +-1e-40.
EULER_GAMMA_DIGITS = "0.5772156649015328606065120900824024310422"


@lru_cache(maxsize=None)
def pi(prec: int = DEFAULT_PREC) -> Enclosure:
    """Enclosure of pi via Machin's formula 16 atan(1/5) - 4 atan(1/239)."""
    w = prec + _GUARD
    x = _atan_series(Enclosure(Fraction(1, 5), prec=w))
    y = _atan_series(Enclosure(Fraction(1, 239), prec=w))
    return (x.scale2(4) - y.scale2(2)).with_prec(prec)


@lru_cache(maxsize=None)
def ln2(prec: int = DEFAULT_PREC) -> Enclosure:
    """Enclosure of log 2 = 2 atanh(1/3)."""
    w = prec + _GUARD
    return _atanh_series(Enclosure(Fraction(1, 3), prec=w)).scale2(1).with_prec(prec)


@lru_cache(maxsize=None)
def euler_gamma(prec: int = DEFAULT_PREC) -> Enclosure:
    g = Fraction(EULER_GAMMA_DIGITS)
    eps = Fraction(1, 10**40)
    return Enclosure(g - eps, g + eps, prec=prec)


# ---------------------------------------------------------------------------
# series kernels (interval arguments, explicit remainders)
# ---------------------------------------------------------------------------

def _mag_upper(x: Enclosure) -> float:
    """A float upper bound for max |x| (used only to size series)."""
    lo, hi = x.float_bounds()
    return max(abs(lo), abs(hi))


def _abs_hi_raw(x: Enclosure):
    a, b = x._a, x._b
    na = _neg(a)
    return na if _lt(b, na) else b


def _terms_needed(zmax: float, bits: int, step: int = 1) -> int:
    if zmax <= 0.0:
        return 1
    per = -math.log2(zmax) * step
    return max(1, int(math.ceil(bits / per)) + 1)


def _atan_series(x: Enclosure) -> Enclosure:
    """atan on an interval with |x| <= 1/2, remainder |x|^(2N+1)/(2N+1)."""
    w = x.prec
    zmax = _mag_upper(x)
    if zmax > 0.5:
        raise DomainError("atan series argument too large")
    n_terms = _terms_needed(zmax, w, 2)
    x2 = x.sqr()
    coef = _odd_reciprocals(n_terms, w, True)
    acc = coef[-1]
    for k in range(n_terms - 2, -1, -1):
        acc = coef[k] + x2 * acc
    s = x * acc
    bound = _div(_pow_dir(_abs_hi_raw(x), 2 * n_terms + 1, w, _C), libmp.from_int(2 * n_terms + 1), w, _C)
    return Enclosure._raw(_sub(s._a, bound, w, _F), _add(s._b, bound, w, _C), w)


def _atanh_series(x: Enclosure) -> Enclosure:
    """atanh on an interval with |x| <= 1/2, remainder 2|x|^(2N+1)/(2N+1)."""
    w = x.prec
    zmax = _mag_upper(x)
    if zmax > 0.5:
        raise DomainError("atanh series argument too large")
    n_terms = _terms_needed(zmax, w, 2)
    x2 = x.sqr()
    coef = _odd_reciprocals(n_terms, w, False)
    acc = coef[-1]
    for k in range(n_terms - 2, -1, -1):
        acc = coef[k] + x2 * acc
    s = x * acc
    bound = _div(_pow_dir(_abs_hi_raw(x), 2 * n_terms + 1, w, _C), libmp.from_int(2 * n_terms + 1), w, _C)
    bound = _shift(bound, 1)
    return Enclosure._raw(_sub(s._a, bound, w, _F), _add(s._b, bound, w, _C), w)


# ---------------------------------------------------------------------------
# elementary functions
# ---------------------------------------------------------------------------

def sqrt(x) -> Enclosure:
    x = _coerce(x, DEFAULT_PREC)
    if not _nonneg(x._a):
        raise DomainError("sqrt of an enclosure with negative part")
    p = x.prec
    return Enclosure._raw(libmp.mpf_sqrt(x._a, p, _F), libmp.mpf_sqrt(x._b, p, _C), p)


def _exp_point(r, prec: int) -> Enclosure:
    if not r[1]:
        return Enclosure._raw(_ONE, _ONE, prec)
    mag = r[2] + r[3]  # |r| < 2**mag
    m = max(0, mag + 10)
    w = prec + _GUARD + m
    y = Enclosure._raw(_shift(r, -m), _shift(r, -m), w)
    # |y| < 2**-10: remainder |y|^N/N! e^|y| <= 2**(1-10N)
    n_terms = w // 10 + 2
    acc = Enclosure._raw(_ONE, _ONE, w)
    for k in range(n_terms - 1, 0, -1):
        acc = 1 + (y * acc) / k
    rem = libmp.from_man_exp(1, 1 - 10 * n_terms)
    acc = Enclosure._raw(_sub(acc._a, rem, w, _F), _add(acc._b, rem, w, _C), w)
    for _ in range(m):
        acc = acc.sqr()
    return acc


def exp(x) -> Enclosure:
    x = _coerce(x, DEFAULT_PREC)
    p = x.prec
    lo = _exp_point(x._a, p)
    hi = lo if x._a == x._b else _exp_point(x._b, p)
    return Enclosure._raw(libmp.mpf_pos(lo._a, p, _F), libmp.mpf_pos(hi._b, p, _C), p)


def _log_point(r, prec: int) -> Enclosure:
    if r[0] or not r[1]:
        raise DomainError("log of a non-positive number")
    w = prec + _GUARD
    _, man, ex, bc = r
    e = ex + bc
    fman, fexp = man, -bc  # f = man * 2**-bc in [1/2, 1)
    if 2 * man * man < (1 << (2 * bc)):
        fexp += 1
        e -= 1
    f = Enclosure._raw(libmp.from_man_exp(fman, fexp), libmp.from_man_exp(fman, fexp), w)
    z = (f - 1) / (f + 1)
    res = _atanh_series(z).scale2(1)
    if e:
        res = res + ln2(w) * e
    return res


def log(x) -> Enclosure:
    x = _coerce(x, DEFAULT_PREC)
    p = x.prec
    if not x.certainly_positive():
        raise DomainError("log of an enclosure that is not strictly positive")
    lo = _log_point(x._a, p)
    hi = lo if x._a == x._b else _log_point(x._b, p)
    return Enclosure._raw(libmp.mpf_pos(lo._a, p, _F), libmp.mpf_pos(hi._b, p, _C), p)


def _atan_reduced(y: Enclosure) -> Enclosure:
    # y within [0, 1]; halve the angle until |y| <= 1/8.
    r = 0
    eighth = libmp.from_man_exp(1, -3)
    while _lt(eighth, y._b):
        y = y / (1 + sqrt(1 + y.sqr()))
        r += 1
    return _atan_series(y).scale2(r)


def _atan_point(r, prec: int) -> Enclosure:
    w = prec + _GUARD
    if r[0]:
        return -_atan_point(_neg(r), prec)
    x = Enclosure._raw(r, r, w)
    if _lt(_ONE, r):
        inv = 1 / x
        return pi(w).scale2(-1) - _atan_reduced(inv)
    return _atan_reduced(x)


def atan(x) -> Enclosure:
    x = _coerce(x, DEFAULT_PREC)
    p = x.prec
    lo = _atan_point(x._a, p)
    hi = lo if x._a == x._b else _atan_point(x._b, p)
    return Enclosure._raw(libmp.mpf_pos(lo._a, p, _F), libmp.mpf_pos(hi._b, p, _C), p)


def _asin_point(r, prec: int) -> Enclosure:
    w = prec + _GUARD
    if r[0]:
        return -_asin_point(_neg(r), prec)
    if _cmp(r, _ONE) == 0:
        return pi(w).scale2(-1)
    x = Enclosure._raw(r, r, w)
    half = libmp.from_man_exp(1, -1)
    if _lt(half, r):
        # asin(x) = pi/2 - 2 asin(sqrt((1-x)/2))
        return pi(w).scale2(-1) - asin(sqrt((1 - x).scale2(-1))).scale2(1)
    return atan(x / sqrt(1 - x.sqr()))


def asin(x) -> Enclosure:
    x = _coerce(x, DEFAULT_PREC)
    p = x.prec
    if _lt(x._a, _neg(_ONE)) or _lt(_ONE, x._b):
        raise DomainError("asin argument outside [-1, 1]")
    lo = _asin_point(x._a, p)
    hi = lo if x._a == x._b else _asin_point(x._b, p)
    return Enclosure._raw(libmp.mpf_pos(lo._a, p, _F), libmp.mpf_pos(hi._b, p, _C), p)


def _acos_point(r, prec: int) -> Enclosure:
    w = prec + _GUARD
    if r[0]:
        return pi(w) - _acos_point(_neg(r), prec)
    if _cmp(r, _ONE) == 0:
        return Enclosure._raw(_ZERO, _ZERO, w)
    x = Enclosure._raw(r, r, w)
    half = libmp.from_man_exp(1, -1)
    if _lt(half, r):
        return asin(sqrt((1 - x).scale2(-1))).scale2(1)
    return pi(w).scale2(-1) - _asin_point(r, prec)


def acos(x) -> Enclosure:
    x = _coerce(x, DEFAULT_PREC)
    p = x.prec
    if _lt(x._a, _neg(_ONE)) or _lt(_ONE, x._b):
        raise DomainError("acos argument outside [-1, 1]")
    # decreasing
    lo = _acos_point(x._b, p)
    hi = lo if x._a == x._b else _acos_point(x._a, p)
    return Enclosure._raw(libmp.mpf_pos(lo._a, p, _F), libmp.mpf_pos(hi._b, p, _C), p)


def _atanh_point(r, prec: int) -> Enclosure:
    w = prec + _GUARD
    if r[0]:
        return -_atanh_point(_neg(r), prec)
    x = Enclosure._raw(r, r, w)
    if _lt(r, libmp.from_man_exp(1, -2)):
        return _atanh_series(x)
    return log((1 + x) / (1 - x)).scale2(-1)


def atanh(x) -> Enclosure:
    x = _coerce(x, DEFAULT_PREC)
    p = x.prec
    if not _lt(libmp.mpf_neg(_ONE), x._a) or not _lt(x._b, _ONE):
        raise DomainError("atanh argument outside (-1, 1)")
    lo = _atanh_point(x._a, p)
    hi = lo if x._a == x._b else _atanh_point(x._b, p)
    return Enclosure._raw(libmp.mpf_pos(lo._a, p, _F), libmp.mpf_pos(hi._b, p, _C), p)


def cbrt(x) -> Enclosure:
    """Real cube root of a strictly positive enclosure."""
    x = _coerce(x, DEFAULT_PREC)
    return exp(log(x) / 3)
