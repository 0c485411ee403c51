"""Machine-checked comparisons between cylinder and ball energy/mass ratios.

Each certification builds rigorous enclosures of an upper bound for the best
cylinder ratio and a lower bound for the best ball ratio.  The verdict is
``Certified`` only when the two enclosures are provably separated.
"""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from droplet import enclosure as enc
from droplet.ball import yukawa_df, yukawa_f
from droplet.cylinder import sigma_cyl_trunc_exact_half, sigma_cyl_yukawa_upper
from droplet.enclosure import Enclosure, parse_rational
from droplet.errors import CertificationError, DomainError
from droplet.specfun import Certified

MIN_CERTIFIED_PRECISION = 113
DEFAULT_WIDTH_TOL = 1e-4


class Verdict(str, enum.Enum):
    CERTIFIED = "Certified"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class CertificationReport:
    kernel: str
    params: dict[str, str]
    lower: Enclosure
    upper: Enclosure
    verdict: Verdict
    precision_bits: int
    wall_time_s: float
    bracket: tuple[str, str] | None = None
    sign_check: bool | None = None
    evidence: dict[str, Enclosure] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def separated(self) -> bool:
        return self.upper.certainly_lt(self.lower)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kernel": self.kernel,
            "params": dict(self.params),
            "lower": self.lower.to_dict(),
            "upper": self.upper.to_dict(),
            "bracket": list(self.bracket) if self.bracket is not None else None,
            "sign_check": self.sign_check,
            "verdict": self.verdict.value,
            "precision_bits": self.precision_bits,
            "wall_time_s": self.wall_time_s,
            "evidence": {k: v.to_dict() for k, v in self.evidence.items()},
            "notes": list(self.notes),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CertificationReport":
        return cls(
            kernel=d["kernel"],
            params=dict(d["params"]),
            lower=Enclosure.from_dict(d["lower"]),
            upper=Enclosure.from_dict(d["upper"]),
            verdict=Verdict(d["verdict"]),
            precision_bits=int(d["precision_bits"]),
            wall_time_s=float(d["wall_time_s"]),
            bracket=tuple(d["bracket"]) if d.get("bracket") is not None else None,
            sign_check=d.get("sign_check"),
            evidence={k: Enclosure.from_dict(v) for k, v in d.get("evidence", {}).items()},
            notes=list(d.get("notes", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "CertificationReport":
        return cls.from_dict(json.loads(text))


def _decide(lower: Enclosure, upper: Enclosure, precision: int, width_tol: float,
            notes: list[str]) -> Verdict:
    ok = True
    if precision < MIN_CERTIFIED_PRECISION:
        notes.append(f"precision {precision} is below the {MIN_CERTIFIED_PRECISION}-bit floor for certified runs")
        ok = False
    for name, e in (("lower", lower), ("upper", upper)):
        if e.width > width_tol:
            notes.append(f"{name} enclosure width {float(e.width):.3g} exceeds {width_tol:g}")
            ok = False
    if not upper.certainly_lt(lower):
        notes.append("upper bound on the cylinder ratio is not provably below the ball lower bound")
        ok = False
    return Verdict.CERTIFIED if ok else Verdict.INCONCLUSIVE


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


# ---------------------------------------------------------------------------
# truncated Coulomb, n = 3, alpha = 1
# ---------------------------------------------------------------------------

def certify_trunc_coulomb(kappa="11/10", precision: int = 128,
                          width_tol: float = DEFAULT_WIDTH_TOL,
                          catalan_digits: int = 10) -> CertificationReport:
    """Compare the cylinder of radius kappa/2 against the best ball.

    The cylinder value is the closed form through Catalan's constant; the ball
    value is the exact optimum in whichever regime kappa falls.
    """
    t0 = time.perf_counter()
    k_q = parse_rational(kappa)
    if k_q <= 0:
        raise DomainError("kappa must be positive")
    p = precision
    mode = Certified(p)
    K = enc.enclose(k_q, p)
    pi = enc.pi(p)
    k3 = K ** 3
    notes: list[str] = []
    evidence: dict[str, Enclosure] = {"pi": pi}

    # Regime from 3/pi < kappa^3 < 15/(2 pi), decided with the pi enclosure.
    pk3 = pi * k3
    if pk3.certainly_gt(3) and (2 * pk3).certainly_lt(15):
        regime = "TruncIntermediate"
        lam = enc.sqrt(5 / pi * (pi / 3 - 1 / k3))
        evidence["lambda_star"] = lam
        ball = 6 * lam / K + 6 * pi * K.sqr() * (lam ** 3 / 15 - lam / 3 + Enclosure(1, prec=p) / 3)
    elif not pk3.certainly_gt(3) and not pk3.certainly_lt(3):
        raise CertificationError("kappa is too close to kappa_min to decide the regime")
    elif not (2 * pk3).certainly_gt(15) and not (2 * pk3).certainly_lt(15):
        raise CertificationError("kappa is too close to kappa_max to decide the regime")
    elif pk3.certainly_lt(3):
        regime = "TruncSubcritical"
        ball = 2 * pi * K.sqr()
    else:
        regime = "TruncRieszRegime"
        ball = Enclosure(9, prec=p) / 2 * enc.cbrt(16 * pi / 15)
    notes.append(f"ball regime: {regime}")
    evidence["rho_ball"] = ball

    cyl = sigma_cyl_trunc_exact_half(K, mode, digits=catalan_digits).sigma
    evidence["sigma_cyl_half"] = cyl
    verdict = _decide(ball, cyl, p, width_tol, notes)
    return CertificationReport(
        kernel="trunc:alpha=1,n=3",
        params={"kappa": _frac_str(k_q), "l": _frac_str(k_q / 2)},
        lower=ball, upper=cyl, verdict=verdict, precision_bits=p,
        wall_time_s=time.perf_counter() - t0, evidence=evidence, notes=notes,
    )


# ---------------------------------------------------------------------------
# Yukawa, n = 3, alpha = 1
# ---------------------------------------------------------------------------

def certify_yukawa(kappa="56/100", l="209/100", N: int = 30000,
                   bracket=("884/10000", "885/10000"), precision: int = 128,
                   width_tol: float = DEFAULT_WIDTH_TOL) -> CertificationReport:
    """Tangent-line lower bound on the ball ratio against a Riemann upper bound for the cylinder.

    Raises :class:`CertificationError` when the derivative signs at the
    bracket endpoints cannot be proven opposite.
    """
    t0 = time.perf_counter()
    k_q, l_q = parse_rational(kappa), parse_rational(l)
    a_q, b_q = (parse_rational(x) for x in bracket)
    if not (0 < a_q < b_q):
        raise DomainError("bracket must satisfy 0 < a < b")
    if N < 2:
        raise DomainError("N must be at least 2")
    p = precision
    mode = Certified(p)
    K = enc.enclose(k_q, p)
    A, B = enc.enclose(a_q, p), enc.enclose(b_q, p)

    fa, fb = yukawa_f(K, A, mode), yukawa_f(K, B, mode)
    dfa, dfb = yukawa_df(K, A, mode), yukawa_df(K, B, mode)
    sign_ok = dfa.certainly_negative() and dfb.certainly_positive()
    if not sign_ok:
        raise CertificationError(
            f"derivative signs at the bracket are not provably opposite: f'(a)={dfa!r}, f'(b)={dfb!r}")
    # The convex ratio lies above both tangent lines; on [a, b] their maximum is
    # at least min(T_a(b), T_b(a)), and outside [a, b] monotonicity does the rest.
    ta_b = fa + dfa * (B - A)
    tb_a = fb + dfb * (A - B)
    lower = Enclosure._raw(min(ta_b._a, tb_a._a, key=_key), min(ta_b._b, tb_a._b, key=_key), p)

    upper = sigma_cyl_yukawa_upper(K, enc.enclose(l_q, p), N, mode).sigma
    notes: list[str] = []
    verdict = _decide(lower, upper, p, width_tol, notes)
    return CertificationReport(
        kernel="yukawa:alpha=1,n=3",
        params={"kappa": _frac_str(k_q), "l": _frac_str(l_q), "N": str(N)},
        lower=lower, upper=upper, verdict=verdict, precision_bits=p,
        wall_time_s=time.perf_counter() - t0,
        bracket=(_frac_str(a_q), _frac_str(b_q)), sign_check=sign_ok,
        evidence={"f(a)": fa, "f(b)": fb, "f'(a)": dfa, "f'(b)": dfb,
                  "T_a(b)": ta_b, "T_b(a)": tb_a},
        notes=notes,
    )


def _key(raw):
    return enc._raw_to_fraction(raw)


# ---------------------------------------------------------------------------
# Riesz cylinder/ball ratio for integer alpha
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RieszRatio:
    tau: float
    base: Fraction  # tau ** beta
    beta: int
    tau_gamma_form: float

    def exact_form(self) -> str:
        return f"({self.base.numerator}/{self.base.denominator})^(1/{self.beta})"


def riesz_ratio(n: int, alpha: int) -> RieszRatio:
    """Ratio of optimal cylinder to optimal ball for an integer Riesz exponent.

    The exact base is a product of rationals; an independent Gamma-function
    expression is returned alongside for cross-checking.
    """
    if int(n) != n or int(alpha) != alpha:
        raise DomainError("n and alpha must be integers")
    n, alpha = int(n), int(alpha)
    if n < 3 or not (1 < alpha < n):
        raise DomainError("need n >= 3 and 1 < alpha < n")
    beta = n + 1 - alpha
    p = beta - 1
    num = den = 1
    for j in range(p + 1):
        num *= n + p - 2 * j
        den *= n - 1 + p - 2 * j
    base = Fraction(n - 1, n) ** (p + 1) * Fraction(num, den)
    tau = float(base) ** (1.0 / beta)
    # log of cyl_reduction_constant(alpha) / sqrt(pi), kept in logs so large n does not overflow
    log_c = math.lgamma((alpha - 1) / 2.0) - math.lgamma(alpha / 2.0)
    log_g = math.lgamma((n + beta + 1) / 2.0) - math.lgamma((n + beta) / 2.0)
    tau_gamma = (n - 1) / n * math.exp((log_c + log_g) / beta)
    return RieszRatio(tau, base, beta, tau_gamma)
