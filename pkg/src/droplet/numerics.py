"""One-dimensional numerical tools: Simpson quadrature, root finding, minimization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from droplet.enclosure import Enclosure
from droplet.errors import ConvergenceError, DomainError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"grid needs a < b, got [{self.a}, {self.b}]")
        if self.n <= 0:
            raise DomainError("grid needs a positive number of subintervals")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n + 1)


def _eval_on(f: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(t))) for t in x])


def simpson_weights(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


def simpson(f: Callable, a: float, b: float, n: int) -> float:
    """Composite Simpson rule with ``n`` (even) subintervals.

    ``f`` may be vectorized; scalar callables are evaluated point by point.
    """
    if n <= 0 or n % 2:
        raise DomainError(f"Simpson needs a positive even n, got {n}")
    grid = Grid(a, b, n)
    x = grid.nodes()
    y = _eval_on(f, x)
    return float(grid.h / 3.0 * np.dot(simpson_weights(n), y))


@dataclass
class NewtonResult:
    root: float
    iterations: int
    residual: float
    used_bisection: bool = False

    def __float__(self) -> float:
        return self.root


def newton(f: Callable[[float], float], df: Callable[[float], float], x0: float,
           tol: float = 1e-12, max_iter: int = 100,
           bracket: tuple[float, float] | None = None) -> NewtonResult:
    """Newton iteration; with ``bracket`` it falls back to bisection steps.

    Stops when |f(x)| <= tol or the step is below tol.  Raises
    :class:`ConvergenceError` after ``max_iter`` iterations.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    lo = hi = None
    if bracket is not None:
        lo, hi = bracket
        flo, fhi = f(lo), f(hi)
        if flo == 0:
            return NewtonResult(lo, 0, 0.0)
        if fhi == 0:
            return NewtonResult(hi, 0, 0.0)
        if flo * fhi > 0:
            raise DomainError("bracket does not enclose a sign change")
        if flo > 0:
            lo, hi = hi, lo  # keep f(lo) < 0 < f(hi)
    x = float(x0)
    bisected = False
    for it in range(1, max_iter + 1):
        fx = f(x)
        if abs(fx) <= tol:
            return NewtonResult(x, it - 1, abs(fx), bisected)
        if lo is not None:
            if fx < 0:
                lo = x
            else:
                hi = x
        d = df(x)
        step = fx / d if d != 0 and math.isfinite(d) else math.inf
        x_new = x - step
        if lo is not None:
            a, b = min(lo, hi), max(lo, hi)
            if not (a < x_new < b) or not math.isfinite(x_new):
                x_new = 0.5 * (lo + hi)
                step = x - x_new
                bisected = True
        elif not math.isfinite(x_new):
            raise ConvergenceError(f"Newton step failed at x={x} (derivative {d})")
        if abs(step) <= tol:
            return NewtonResult(x_new, it, abs(f(x_new)), bisected)
        x = x_new
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations (last x={x})")


def sign_change_bracket(f: Callable, a, b) -> bool:
    """True iff f(a) and f(b) have provably opposite signs."""
    fa, fb = f(a), f(b)
    if isinstance(fa, Enclosure) or isinstance(fb, Enclosure):
        fa = fa if isinstance(fa, Enclosure) else Enclosure(fa)
        fb = fb if isinstance(fb, Enclosure) else Enclosure(fb)
        return ((fa.certainly_negative() and fb.certainly_positive())
                or (fa.certainly_positive() and fb.certainly_negative()))
    return fa * fb < 0


def minimize_1d(f: Callable[[float], float], a: float, b: float,
                tol: float = 1e-6, max_iter: int = 500) -> tuple[float, float]:
    """Golden-section search on [a, b]; returns (x*, f(x*)).

    The interior estimate is compared against both endpoints so the result is
    never worse than f(a) or f(b).
    """
    if not a < b:
        raise DomainError(f"minimize_1d needs a < b, got [{a}, {b}]")
    if tol <= 0:
        raise DomainError("tol must be positive")
    lo, hi = a, b
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    it = 0
    while hi - lo > tol and it < max_iter:
        it += 1
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    best = (x, f(x))
    for cand in ((c, fc), (d, fd), (a, f(a)), (b, f(b))):
        if cand[1] < best[1]:
            best = cand
    return best


@dataclass
class ConvergenceReport:
    rows: list[tuple[float, float]]
    fitted_order: float
    fit_rows: list[tuple[float, float]] = field(default_factory=list)

    def as_dicts(self) -> list[dict]:
        return [{"h": h, "error": e} for h, e in self.rows]


def fit_order(rows: Sequence[tuple[float, float]], floor: float = 1e-13) -> tuple[float, list]:
    """Least-squares slope of log(error) against log(h), ignoring rows at round-off level."""
    use = [(h, e) for h, e in rows if e > floor]
    if len(use) < 2:
        use = [(h, e) for h, e in rows if e > 0]
    if len(use) < 2:
        return math.nan, use
    lh = np.log([h for h, _ in use])
    le = np.log([e for _, e in use])
    slope = np.polyfit(lh, le, 1)[0]
    return float(slope), use


def convergence_study(f: Callable, a: float, b: float, n_list: Sequence[int],
                      reference: float, floor: float | None = None) -> ConvergenceReport:
    """Simpson errors against ``reference`` for each n, with the fitted order."""
    ns = list(n_list)
    if any(n2 <= n1 for n1, n2 in zip(ns, ns[1:])):
        raise DomainError("n_list must be increasing")
    rows = []
    for n in ns:
        est = simpson(f, a, b, n)
        rows.append(((b - a) / n, abs(est - reference)))
    if floor is None:
        floor = 50.0 * np.finfo(float).eps * max(1.0, abs(reference))
    order, used = fit_order(rows, floor)
    return ConvergenceReport(rows, order, used)
