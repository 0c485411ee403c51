"""Interaction kernels, their one-dimensional slice energies and cylinder reductions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from droplet import specfun
from droplet.errors import DomainError, UnsupportedConfiguration
from droplet.specfun import FAST, Certified


class Family(str, enum.Enum):
    RIESZ = "riesz"
    TRUNC = "trunc"
    YUKAWA = "yukawa"


@dataclass(frozen=True)
class Kernel:
    """A radial repulsive kernel: pure Riesz, truncated Riesz, or Yukawa-screened."""

    family: Family
    alpha: float
    kappa: float | None = None
    n: int = 3

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (0 < self.alpha < self.n):
            raise DomainError(f"alpha must lie in (0, n), got {self.alpha}")
        if fam is Family.RIESZ:
            if self.kappa is not None:
                raise DomainError("the Riesz kernel takes no kappa")
        else:
            if self.kappa is None or not self.kappa > 0:
                raise DomainError(f"{fam.value} kernel needs kappa > 0")

    @property
    def beta(self) -> float:
        return self.n + 1 - self.alpha

    def require_yukawa_setting(self) -> None:
        if self.family is Family.YUKAWA and (self.n != 3 or self.alpha != 1):
            raise UnsupportedConfiguration("Yukawa formulas are implemented only for n=3, alpha=1")

    # -- pointwise value -----------------------------------------------------
    def __call__(self, r):
        return kernel_value(self, r)

    # -- text form -------------------------------------------------------------
    def format(self) -> str:
        parts = [f"alpha={self.alpha:g}"]
        if self.kappa is not None:
            parts.append(f"kappa={self.kappa:g}")
        parts.append(f"n={self.n}")
        return f"{self.family.value}:{','.join(parts)}"

    __str__ = format

    @classmethod
    def parse(cls, text: str) -> "Kernel":
        """Parse ``'trunc:alpha=1,kappa=1.1,n=3'``-style descriptors."""
        head, _, tail = text.strip().partition(":")
        try:
            fam = Family(head.strip().lower())
        except ValueError as exc:
            raise DomainError(f"unknown kernel family {head!r}") from exc
        params: dict[str, float] = {}
        for item in filter(None, (p.strip() for p in tail.split(","))):
            key, eq, val = item.partition("=")
            if not eq or key.strip() not in ("alpha", "kappa", "n"):
                raise DomainError(f"bad kernel parameter {item!r}")
            params[key.strip()] = float(val)
        if "alpha" not in params:
            raise DomainError("kernel descriptor needs alpha=")
        n = params.get("n", 3)
        return cls(fam, params["alpha"], params.get("kappa"), int(n) if n == int(n) else n)


def riesz(alpha: float, n: int = 3) -> Kernel:
    return Kernel(Family.RIESZ, alpha, None, n)


def truncated(alpha: float, kappa: float, n: int = 3) -> Kernel:
    return Kernel(Family.TRUNC, alpha, kappa, n)


def yukawa(kappa: float, alpha: float = 1.0, n: int = 3) -> Kernel:
    return Kernel(Family.YUKAWA, alpha, kappa, n)


def kernel_value(k: Kernel, r):
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise DomainError("kernel evaluated at r <= 0")
    val = r_arr ** (-k.alpha)
    if k.family is Family.TRUNC:
        val = np.where(r_arr < k.kappa, val, 0.0)
    elif k.family is Family.YUKAWA:
        val = val * np.exp(-r_arr / k.kappa)
    return float(val) if val.ndim == 0 else val


def _yukawa_slice_bracket(t: float) -> float:
    """t - 2 + (t + 2) exp(-t), series for small t to avoid cancellation."""
    if t < 0.5:
        s = 0.0
        term = t * t * t / 6.0  # t^m/m! at m=3
        for m in range(3, 40):
            s += (-1) ** m * (2 - m) * term
            term *= t / (m + 1)
        return s
    return t - 2.0 + (t + 2.0) * math.exp(-t)


def slice_energy(k: Kernel, length: float) -> float:
    """Double integral of |s-t|^(n-1) G(s-t) over [0, L]^2."""
    if length < 0:
        raise DomainError("slice length must be non-negative")
    if length == 0:
        return 0.0
    b = k.beta
    if k.family is Family.RIESZ or (k.family is Family.TRUNC and length <= k.kappa):
        return 2.0 * length**b / (b * (b - 1.0))
    if k.family is Family.TRUNC:
        kap = k.kappa
        return 2.0 * kap ** (b - 1.0) * (b * length - (b - 1.0) * kap) / (b * (b - 1.0))
    k.require_yukawa_setting()
    kap = k.kappa
    return 2.0 * kap**3 * _yukawa_slice_bracket(length / kap)


def cyl_reduction_constant(alpha: float) -> float:
    """Constant c with the line integral of the Riesz kernel equal to c |x'|^(1-alpha)."""
    if not alpha > 1:
        raise DomainError("cylinder reduction needs alpha > 1 (the line integral diverges)")
    return math.sqrt(math.pi) * math.exp(math.lgamma((alpha - 1.0) / 2.0) - math.lgamma(alpha / 2.0))


def trunc_cyl_kernel(kappa: float, l: float) -> float:
    """Line integral of the truncated Coulomb kernel at transverse distance l."""
    if not l > 0:
        raise DomainError("transverse distance must be positive")
    if l >= kappa:
        return 0.0
    return 2.0 * math.atanh(math.sqrt(1.0 - (l / kappa) ** 2))


def yukawa_cyl_kernel(kappa: float, s, mode=FAST):
    """Line integral of the screened Coulomb kernel at transverse distance s: 2 K0(s/kappa)."""
    if isinstance(mode, Certified):
        from droplet.enclosure import Enclosure, enclose

        x = s if isinstance(s, Enclosure) else enclose(s, mode.precision)
        if not x.certainly_positive():
            raise DomainError("transverse distance must be positive")
        return specfun.bessel_k0(x / enclose(kappa, mode.precision), mode) * 2
    s_arr = np.asarray(s, dtype=float)
    if np.any(~(s_arr > 0)):
        raise DomainError("transverse distance must be positive")
    return 2.0 * specfun.bessel_k0(s_arr / kappa)
