"""Energy/mass ratios of infinite cylinders.

For a cylinder of cross-section radius ``l`` the ratio splits into the
perimeter part ``(n-1)/l`` and a nonlocal part obtained by integrating the
kernel along the axis first, which reduces everything to a problem on the
cross-sectional disk.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from droplet import enclosure as enc
from droplet import specfun
from droplet.ball import riesz_ball_energy, unit_ball_volume
from droplet.enclosure import Enclosure
from droplet.errors import DomainError, UnsupportedConfiguration
from droplet.kernels import Family, Kernel, cyl_reduction_constant
from droplet.numerics import minimize_1d, simpson
from droplet.specfun import FAST, Certified


class CylMethod(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    G_INTEGRAL = "GIntegral"
    EXACT_CATALAN = "ExactCatalan"
    SIMPSON_SUBTRACTED = "SimpsonSubtracted"
    RIEMANN_UPPER = "RiemannUpper"


@dataclass(frozen=True)
class CylRatioResult:
    sigma: Union[float, Enclosure]
    l: float
    method: CylMethod


# ---------------------------------------------------------------------------
# Riesz
# ---------------------------------------------------------------------------

def _riesz_cyl_coefficient(n: int, alpha: float) -> float:
    if n < 3:
        raise DomainError("cylinders need n >= 3")
    if not (1 < alpha < n):
        raise DomainError("the cylinder ratio is infinite unless 1 < alpha < n")
    return cyl_reduction_constant(alpha) * riesz_ball_energy(n - 1, alpha - 1.0, 1.0) / unit_ball_volume(n - 1)


def sigma_cyl_riesz(n: int, alpha: float, l: float) -> float:
    b = n + 1.0 - alpha
    return (n - 1.0) / l + _riesz_cyl_coefficient(n, alpha) * l ** (b - 1.0)


def rho_cyl_riesz(n: int, alpha: float) -> CylRatioResult:
    b = n + 1.0 - alpha
    a = _riesz_cyl_coefficient(n, alpha)
    rho = (n - 1.0) * b / (b - 1.0) * (a * (b - 1.0) / (n - 1.0)) ** (1.0 / b)
    l_star = ((n - 1.0) / ((b - 1.0) * a)) ** (1.0 / b)
    return CylRatioResult(rho, l_star, CylMethod.CLOSED_FORM)


# ---------------------------------------------------------------------------
# truncated Coulomb (n = 3, alpha = 1)
# ---------------------------------------------------------------------------

def g_trunc(ell):
    """Disk-averaged reduced kernel profile; vectorized over ``ell`` in [0, 1]."""
    x = np.asarray(ell, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("g_trunc needs 0 <= ell <= 1")
    root = np.sqrt(np.clip(1.0 - x * x, 0.0, 1.0))
    # atanh(sqrt(1 - x^2)) = log((1 + sqrt(1 - x^2))/x), stable as x -> 0.
    safe = np.where(x > 0, x, 1.0)
    tail = np.where(x > 0, x**3 * np.log((1.0 + root) / safe), 0.0)
    out = 4.0 * math.pi / 3.0 * (x - np.arcsin(x) + 2.0 * x * (1.0 - root) + tail)
    return float(out) if out.ndim == 0 else out


def sigma_cyl_trunc(kappa: float, l: float, n_quad: int = 4096) -> CylRatioResult:
    """Cylinder ratio for the truncated Coulomb kernel, valid for l <= kappa/2."""
    if not (kappa > 0 and l > 0):
        raise DomainError("kappa and l must be positive")
    if l > kappa / 2.0 * (1 + 1e-15):
        raise UnsupportedConfiguration("truncated cylinder formula needs l <= kappa/2")
    lam = max(kappa / (2.0 * l), 1.0)
    # r = sin(theta) removes the square-root endpoint at r = 1.
    integral = simpson(lambda t: g_trunc(np.cos(t) / lam) * np.cos(t), 0.0, math.pi / 2.0, n_quad)
    sigma = 4.0 * lam / kappa + 2.0 * lam * kappa**2 / math.pi * integral
    return CylRatioResult(sigma, l, CylMethod.G_INTEGRAL)


def sigma_cyl_trunc_exact_half(kappa, mode=FAST, digits: int = 11) -> CylRatioResult:
    """Ratio at l = kappa/2 in closed form through Catalan's constant."""
    if isinstance(mode, Certified):
        p = mode.precision
        k = kappa if isinstance(kappa, Enclosure) else enc.enclose(kappa, p)
        c = specfun.catalan(mode, digits=digits)
        pi = enc.pi(p)
        val = 4 / k + 4 * k.sqr() * (pi / 2 - Enclosure(17, prec=p) / 12 + c / 2)
        return CylRatioResult(val, float(k.mid) / 2.0, CylMethod.EXACT_CATALAN)
    kappa = float(kappa)
    c = specfun.catalan()
    val = 4.0 / kappa + 4.0 * kappa**2 * (math.pi / 2.0 - 17.0 / 12.0 + c / 2.0)
    return CylRatioResult(val, kappa / 2.0, CylMethod.EXACT_CATALAN)


# ---------------------------------------------------------------------------
# Yukawa (n = 3, alpha = 1)
# ---------------------------------------------------------------------------

def yukawa_geometry_I(l: float, s):
    """Half the area of the intersection of two radius-l disks at distance s."""
    s_arr = np.asarray(s, dtype=float)
    if np.any((s_arr < 0) | (s_arr > 2.0 * l * (1 + 1e-15))):
        raise DomainError("s must lie in [0, 2l]")
    s_arr = np.minimum(s_arr, 2.0 * l)
    root = np.sqrt(np.maximum(4.0 * l * l - s_arr * s_arr, 0.0))
    out = l * l * np.arccos(s_arr / (2.0 * l)) - s_arr / 4.0 * root
    out = np.where(s_arr >= 2.0 * l, 0.0, out)
    return float(out) if out.ndim == 0 else out


def yukawa_geometry_dI(l: float, s):
    s_arr = np.asarray(s, dtype=float)
    out = -0.5 * np.sqrt(np.maximum(4.0 * l * l - s_arr * s_arr, 0.0))
    return float(out) if out.ndim == 0 else out


def yukawa_geometry_d2I(l: float, s):
    s_arr = np.asarray(s, dtype=float)
    out = s_arr / (2.0 * np.sqrt(4.0 * l * l - s_arr * s_arr))
    return float(out) if out.ndim == 0 else out


def yukawa_geometry_I_enclosure(l, s) -> Enclosure:
    """Certified version of :func:`yukawa_geometry_I` for Enclosure inputs."""
    two_l = l.scale2(1)
    arg = s / two_l
    # Clip tiny outward-rounding excursions beyond 1 back into the domain.
    if arg.hi > 1:
        arg = Enclosure(arg.lo if arg.lo <= 1 else 1, 1, prec=arg.prec)
    rad = two_l.sqr() - s.sqr()
    if rad.lo < 0:
        rad = Enclosure(0, rad.hi if rad.hi > 0 else 0, prec=rad.prec)
    return l.sqr() * enc.acos(arg) - s.scale2(-2) * enc.sqrt(rad)


@dataclass(frozen=True)
class YukawaIntegrand:
    """The integrand of the Yukawa cylinder ratio and its subtracted singular parts."""

    kappa: float
    l: float

    @property
    def I0(self) -> float:
        return math.pi * self.l**2 / 2.0

    @property
    def dI0(self) -> float:
        return -self.l

    def I(self, s):
        return yukawa_geometry_I(self.l, s)

    def G1(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(s > 0, -np.log(s / self.kappa) * (self.I0 * s + self.dI0 * s * s), 0.0)
        return out

    def G2(self, s):
        s = np.asarray(s, dtype=float)
        l = self.l
        c = 4.0 / 3.0 * l**1.5 * specfun.bessel_k0(2.0 * l / self.kappa)
        return c * np.maximum(2.0 * l - s, 0.0) ** 1.5

    def F(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        mask = s > 0
        sm = s[mask]
        out[mask] = sm * specfun.bessel_k0(sm / self.kappa) * yukawa_geometry_I(self.l, sm)
        return out

    def F_reg(self, s):
        """F - G1 - G2 with the removable endpoint values filled in analytically."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        l = self.l
        out = np.empty_like(s)
        left = s <= 0
        right = s >= 2.0 * l
        mid = ~(left | right)
        sm = s[mid]
        out[mid] = self.F(sm) - self.G1(sm) - self.G2(sm)
        out[left] = -self.G2(0.0)
        # F and G2 vanish at s = 2l, G1 does not.
        out[right] = l**3 * (math.pi - 4.0) * math.log(2.0 * l / self.kappa) if np.any(right) else 0.0
        return out

    def singular_integral(self) -> float:
        """Closed-form integral of G1 + G2 over [0, 2l]."""
        l = self.l
        lg = math.log(2.0 * l / self.kappa)
        return (l * l * self.I0 * (1.0 - 2.0 * lg)
                + 8.0 / 9.0 * l**3 * self.dI0 * (1.0 - 3.0 * lg)
                + 32.0 * math.sqrt(2.0) / 15.0 * l**4 * specfun.bessel_k0(2.0 * l / self.kappa))


def sigma_cyl_yukawa(kappa: float, l: float, n_quad: int = 4096) -> CylRatioResult:
    if not (kappa > 0 and l > 0):
        raise DomainError("kappa and l must be positive")
    integrand = YukawaIntegrand(kappa, l)
    j = simpson(integrand.F_reg, 0.0, 2.0 * l, n_quad) + integrand.singular_integral()
    return CylRatioResult(2.0 / l + 8.0 / (l * l) * j, l, CylMethod.SIMPSON_SUBTRACTED)


def sigma_cyl_yukawa_plain(kappa: float, l: float, n_quad: int) -> float:
    """Same ratio with Simpson applied to the raw integrand (for convergence comparisons)."""
    integrand = YukawaIntegrand(kappa, l)
    j = simpson(integrand.F, 0.0, 2.0 * l, n_quad)
    return 2.0 / l + 8.0 / (l * l) * j


def sigma_cyl_yukawa_upper(kappa, l, N: int = 30000, mode=FAST) -> CylRatioResult:
    """Riemann upper bound on the Yukawa cylinder ratio.

    On each cell [kh, (k+1)h], k >= 1, both I and K0 are decreasing, so the
    integrand is at most s I(kh) K0(kh/kappa).  On the first cell K0(x) is
    bounded by sqrt(pi/(2x)) and I by I(0).
    """
    if N < 2:
        raise DomainError("the Riemann bound needs N >= 2")
    if isinstance(mode, Certified):
        return _sigma_upper_certified(kappa, l, N, mode)
    kappa = float(kappa)
    l = float(l)
    h = 2.0 * l / N
    k = np.arange(1, N)
    s = k * h
    i0 = math.pi * l * l / 2.0
    first = math.sqrt(2.0) / 3.0 * i0 * math.sqrt(math.pi * kappa) * h**1.5
    body = h * h * np.sum((k + 0.5) * yukawa_geometry_I(l, s) * specfun.bessel_k0(s / kappa))
    sigma = 2.0 / l + 8.0 / (l * l) * (first + body)
    return CylRatioResult(sigma, l, CylMethod.RIEMANN_UPPER)


def _sigma_upper_certified(kappa, l, N: int, mode: Certified) -> CylRatioResult:
    p = mode.precision
    K = kappa if isinstance(kappa, Enclosure) else enc.enclose(kappa, p)
    L = l if isinstance(l, Enclosure) else enc.enclose(l, p)
    pi = enc.pi(p)
    h = L.scale2(1) / N
    i0 = pi * L.sqr() / 2
    first = enc.sqrt(Enclosure(2, prec=p)) / 3 * i0 * enc.sqrt(pi * K) * h * enc.sqrt(h)
    # Summation runs in a fixed order so the enclosure is reproducible.
    body = Enclosure(0, prec=p)
    for k in range(1, N):
        s = h * k
        term = yukawa_geometry_I_enclosure(L, s) * specfun.bessel_k0(s / K, mode)
        body = body + term * Enclosure(2 * k + 1, prec=p)
    body = body * h.sqr() / 2
    sigma = 2 / L + 8 / L.sqr() * (first + body)
    return CylRatioResult(sigma, float(L.mid), CylMethod.RIEMANN_UPPER)


# ---------------------------------------------------------------------------
# dispatch and optimization over l
# ---------------------------------------------------------------------------

def sigma_cyl(kernel: Kernel, l: float, n_quad: int = 4096) -> float:
    if kernel.family is Family.RIESZ:
        return sigma_cyl_riesz(kernel.n, kernel.alpha, l)
    if kernel.n != 3 or kernel.alpha != 1:
        raise UnsupportedConfiguration("screened cylinder ratios are implemented for n=3, alpha=1 only")
    if kernel.family is Family.TRUNC:
        return sigma_cyl_trunc(kernel.kappa, l, n_quad).sigma
    return sigma_cyl_yukawa(kernel.kappa, l, n_quad).sigma


def default_search(kernel: Kernel) -> tuple[float, float]:
    if kernel.family is Family.RIESZ:
        l_star = rho_cyl_riesz(kernel.n, kernel.alpha).l
        return l_star / 20.0, l_star * 20.0
    if kernel.family is Family.TRUNC:
        return kernel.kappa / 200.0, kernel.kappa / 2.0
    return 0.05 * kernel.kappa, 20.0 * kernel.kappa


def rho_cyl(kernel: Kernel, search: tuple[float, float] | None = None,
            tol: float = 1e-6, n_quad: int = 4096) -> CylRatioResult:
    """Best cylinder ratio over l in ``search`` by golden-section search."""
    a, b = search if search is not None else default_search(kernel)
    if kernel.family is Family.TRUNC and b > kernel.kappa / 2.0:
        raise UnsupportedConfiguration("truncated cylinder search is limited to l <= kappa/2")
    x, val = minimize_1d(lambda t: sigma_cyl(kernel, t, n_quad), a, b, tol)
    method = {Family.RIESZ: CylMethod.CLOSED_FORM, Family.TRUNC: CylMethod.G_INTEGRAL,
              Family.YUKAWA: CylMethod.SIMPSON_SUBTRACTED}[kernel.family]
    return CylRatioResult(val, x, method)
