"""Brute-force validators that share no formulas with the closed forms they check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from droplet.ball import sphere_area, unit_ball_volume
from droplet.errors import DomainError, UnsupportedConfiguration
from droplet.kernels import Family, Kernel, kernel_value, slice_energy
from droplet.numerics import simpson, simpson_weights


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    samples_or_nodes: int
    stderr: float | None = None


def ball_energy_by_slicing(k: Kernel, R: float, n_quad: int = 4096) -> OracleEstimate:
    """Ball interaction energy as a radial integral of slice energies over chords.

    The chord through the point at distance r from the axis has length
    2 sqrt(R^2 - r^2); the substitution r = R sin(theta) makes the integrand
    smooth at r = R.  For a truncated kernel the range is split where the chord
    length crosses the cutoff.
    """
    if not R > 0:
        raise DomainError("R must be positive")
    n = k.n
    pref = 0.5 * sphere_area(n) * sphere_area(n - 1)

    def integrand(theta):
        theta = np.atleast_1d(theta)
        chord = 2.0 * R * np.cos(theta)
        s = np.array([slice_energy(k, max(c, 0.0)) for c in chord])
        return s * (R * np.sin(theta)) ** (n - 2) * R * np.cos(theta)

    cuts = [0.0, math.pi / 2.0]
    if k.family is Family.TRUNC and k.kappa < 2.0 * R:
        cuts.insert(1, math.acos(k.kappa / (2.0 * R)))
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b > a:
            total += simpson(integrand, a, b, n_quad)
    return OracleEstimate(pref * total, n_quad * (len(cuts) - 1))


def uniform_ball(rng: np.random.Generator, count: int, n: int, R: float) -> np.ndarray:
    """Uniform points in the n-ball: Gaussian direction, radius R U^(1/n)."""
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = R * rng.random(count) ** (1.0 / n)
    return g * r[:, None]


def ball_energy_monte_carlo(k: Kernel, R: float, samples: int = 10**6, seed: int = 0,
                            chunk: int = 2**20) -> OracleEstimate:
    """Plain Monte Carlo over uniform pairs in the ball, scaled by the squared volume."""
    if samples < 10**4:
        raise DomainError("use at least 10^4 samples")
    rng = np.random.Generator(np.random.Philox(seed))
    n = k.n
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = uniform_ball(rng, m, n, R)
        y = uniform_ball(rng, m, n, R)
        d = np.linalg.norm(x - y, axis=1)
        d = np.where(d > 0, d, np.finfo(float).tiny)
        g = kernel_value(k, d)
        total += float(g.sum())
        total_sq += float(np.dot(g, g))
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    vol2 = (unit_ball_volume(n) * R**n) ** 2
    return OracleEstimate(vol2 * mean, samples, vol2 * math.sqrt(var / samples))


def slice_energy_by_quadrature(k: Kernel, length: float) -> float:
    """Slice self-energy via the one-dimensional reduction 2 int_0^L (L-u) u^(n-1) G(u) du."""
    if length <= 0:
        return 0.0
    n, a = k.n, k.alpha
    expo = n - 1 - a  # integrable singularity u^expo at 0 when expo < 0
    upper = length
    if k.family is Family.TRUNC:
        upper = min(length, k.kappa)

    def smooth(u):
        val = (length - u)
        if k.family is Family.YUKAWA:
            val *= math.exp(-u / k.kappa)
        return val

    val, _ = integrate.quad(smooth, 0.0, upper, weight="alg", wvar=(expo, 0.0),
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return 2.0 * val


def _disk_overlap_half(l: float, s: np.ndarray) -> np.ndarray:
    # Half the lens area of two radius-l disks at distance s, written as a
    # segment area so it does not reuse the cylinder module's expression.
    half = np.clip(s / 2.0, 0.0, l)
    return l * l * np.arccos(half / l) - half * np.sqrt(l * l - half * half)


def finite_cylinder_ratio(k: Kernel, l: float, L: float, n_quad: int = 512,
                          n_inner: int = 1024) -> OracleEstimate:
    """(perimeter + interaction) / volume of the finite cylinder of radius l, length L.

    Axial pairs are integrated first at each transverse distance s, through
    u = s sinh(v); the transverse distance has density 4 pi s I(s) on the disk.
    The outer map s = 2l ((1 - cos theta)/2)^2 flattens both the lens-area
    endpoint at s = 2l and the s^(1-alpha) growth of the axial profile at s = 0,
    so the dropped endpoint nodes carry no weight for alpha < 2.75.
    """
    if k.n != 3:
        raise UnsupportedConfiguration("finite cylinder oracle is implemented for n=3")
    if not (l > 0 and L > 0):
        raise DomainError("l and L must be positive")
    theta = np.linspace(0.0, math.pi, n_quad + 1)
    half = 0.5 * (1.0 - np.cos(theta))
    s_nodes = 2.0 * l * half * half
    ds = 2.0 * l * half * np.sin(theta)
    w_out = simpson_weights(n_quad) * (math.pi / n_quad) / 3.0
    acc = 0.0
    for s, jac, w in zip(s_nodes[1:-1], ds[1:-1], w_out[1:-1]):
        phi = _axial_profile(k, float(s), L, n_inner)
        acc += w * jac * s * float(_disk_overlap_half(l, np.array([s]))[0]) * phi
    interaction = 4.0 / (l * l * L) * acc
    value = 2.0 / l + 2.0 / L + interaction
    return OracleEstimate(value, n_quad * n_inner)


def _axial_profile(k: Kernel, s: float, L: float, n_inner: int) -> float:
    """2 int_0^L (L - u) G(sqrt(s^2 + u^2)) du."""
    top = math.asinh(L / s)
    if k.family is Family.TRUNC:
        if s >= k.kappa:
            return 0.0
        top = min(top, math.acosh(k.kappa / s))
    elif k.family is Family.YUKAWA:
        reach = 60.0 * k.kappa / s
        if reach > 1.0:
            top = min(top, math.acosh(reach))
        else:
            top = min(top, 1e-3)
    v = np.linspace(0.0, top, n_inner + 1)
    r = s * np.cosh(v)
    g = kernel_value(k, r)
    if k.family is Family.TRUNC:
        g = np.where(r < k.kappa, g, 0.0)
    f = (L - s * np.sinh(v)) * g * r
    return 2.0 * float(top / n_inner / 3.0 * np.dot(simpson_weights(n_inner), f))


def k0_by_quadrature(x: float, n_quad: int = 4096) -> float:
    """K0(x) from its defining integral of exp(-x cosh t) over t >= 0.

    The range is cut where x cosh t exceeds x + 60, leaving a tail below
    exp(-x - 60) / (x sinh t).
    """
    if not x > 0:
        raise DomainError("x must be positive")
    top = math.acosh(1.0 + 60.0 / x)
    return simpson(lambda t: np.exp(-x * np.cosh(t)), 0.0, top, n_quad)
