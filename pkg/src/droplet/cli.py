"""Command-line interface: ratio queries, sweeps, certification runs, convergence studies.

Exit codes: 0 success, 1 inconclusive or unprovable certification, 2 usage or
parse error, 3 unsupported configuration, 4 internal failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from droplet import ball, certify, cylinder
from droplet.errors import CertificationError, DomainError, UnsupportedConfiguration
from droplet.kernels import Family, Kernel, truncated, yukawa
from droplet.numerics import convergence_study
from droplet.specfun import Certified

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_INTERNAL = 0, 1, 2, 3, 4

SWEEP_FIELDS = ("kappa", "rho_ball", "l_opt", "sigma_cyl", "regime")


@dataclass(frozen=True)
class SweepRow:
    kappa: float
    rho_ball: float
    l_opt: float
    sigma_cyl: float
    regime: str


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file next to ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".droplet-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_sweep_csv(rows: Sequence[SweepRow], meta: dict[str, float] | None = None) -> str:
    buf = io.StringIO()
    for key, val in (meta or {}).items():
        buf.write(f"# {key}={_fmt(val)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_FIELDS)
    for r in rows:
        w.writerow([_fmt(r.kappa), _fmt(r.rho_ball), _fmt(r.l_opt), _fmt(r.sigma_cyl), r.regime])
    return buf.getvalue()


def parse_sweep_csv(text: str) -> tuple[list[SweepRow], dict[str, float]]:
    meta: dict[str, float] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = float(val)
        elif line.strip():
            body.append(line)
    reader = csv.DictReader(body)
    rows = [SweepRow(float(d["kappa"]), float(d["rho_ball"]), float(d["l_opt"]),
                     float(d["sigma_cyl"]), d["regime"]) for d in reader]
    return rows, meta


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def sweep_row(family: str, kappa: float, tol: float = 1e-6, n_quad: int = 4096) -> SweepRow:
    if family == "trunc":
        k = truncated(1.0, kappa)
    elif family == "yukawa":
        k = yukawa(kappa)
    else:
        raise UnsupportedConfiguration(f"sweeps cover the trunc and yukawa families, not {family!r}")
    b = ball.rho_ball(k)
    c = cylinder.rho_cyl(k, tol=tol, n_quad=n_quad)
    return SweepRow(kappa, float(b.rho), float(c.l), float(c.sigma), b.regime.value)


def _sweep_row_args(args):
    return sweep_row(*args)


def run_sweep(family: str, kappas: Sequence[float], tol: float = 1e-6, n_quad: int = 4096,
              threads: int | None = None) -> list[SweepRow]:
    """Rows in the order of ``kappas`` (sorted ascending by the caller)."""
    if threads is None:
        threads = int(os.environ.get("DROPLET_THREADS", "1") or 1)
    jobs = [(family, float(k), tol, n_quad) for k in kappas]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            return list(pool.map(_sweep_row_args, jobs))
    return [sweep_row(*j) for j in jobs]


def sweep_thresholds(family: str) -> dict[str, float]:
    if family == "trunc":
        k_min, k_max = ball.trunc_thresholds(1.0)
        return {"kappa_min": k_min, "kappa_max": k_max}
    return {"kappa_flat": ball.yukawa_flat_threshold()}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _global_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--mode", choices=("fast", "certified"), default="fast")
    g.add_argument("--precision", type=int, default=128, help="working precision in bits (certified mode)")
    g.add_argument("--quad", type=int, default=4096, help="even number of Simpson subintervals")
    g.add_argument("--tol", type=float, default=1e-6, help="minimizer interval tolerance")
    g.add_argument("--out", default=None, help="output file (written atomically)")
    g.add_argument("--seed", type=int, default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    parent = _global_parent()
    parser = argparse.ArgumentParser(prog="droplet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("ratio", parents=[parent], help="energy/mass ratio of a ball or cylinder")
    r.add_argument("kernel", help="e.g. riesz:alpha=1,n=3 or yukawa:alpha=1,kappa=0.56,n=3")
    r.add_argument("shape", choices=("ball", "cyl"))
    r.add_argument("--l", type=float, default=None, help="cylinder radius (default: optimize)")
    r.add_argument("--R", type=float, default=None, help="ball radius (default: optimize)")

    s = sub.add_parser("sweep", parents=[parent], help="ball vs cylinder ratios over a kappa range")
    s.add_argument("family", choices=("trunc", "yukawa", "riesz"))
    s.add_argument("--kappa-min", type=float, default=None)
    s.add_argument("--kappa-max", type=float, default=None)
    s.add_argument("--steps", type=int, default=100)

    c = sub.add_parser("certify", parents=[parent], help="certified cylinder-below-ball comparison")
    c.add_argument("case", choices=("trunc-coulomb", "yukawa"))
    c.add_argument("--kappa", default=None, help="rational, e.g. 11/10")
    c.add_argument("--l", default="209/100")
    c.add_argument("--N", type=int, default=30000)
    c.add_argument("--bracket", default="884/10000,885/10000")
    c.add_argument("--width-tol", type=float, default=certify.DEFAULT_WIDTH_TOL)

    v = sub.add_parser("converge", parents=[parent], help="Simpson convergence on the Yukawa integrand")
    v.add_argument("--kappa", type=float, default=0.56)
    v.add_argument("--l", type=float, default=2.09)
    v.add_argument("--n-list", default=",".join(str(2**k) for k in range(5, 13)))
    v.add_argument("--reference-n", type=int, default=2**14)
    v.add_argument("--plain", action="store_true", help="use the integrand without singularity subtraction")
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_ratio(args) -> int:
    try:
        k = Kernel.parse(args.kernel)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.mode == "certified":
        if k.family is Family.TRUNC and args.shape == "cyl" and args.l is not None \
                and math.isclose(args.l, k.kappa / 2.0) and k.n == 3 and k.alpha == 1:
            res = cylinder.sigma_cyl_trunc_exact_half(k.kappa, Certified(args.precision))
            e = res.sigma
            lo, hi = e.float_bounds()
            _emit(args, f"sigma_cyl in [{lo!r}, {hi!r}]\nl = {res.l!r}\nmethod = {res.method.value}\n")
            return EXIT_OK
        raise UnsupportedConfiguration("certified ratio queries cover trunc cylinders at l = kappa/2; "
                                       "use the certify command for the Yukawa comparison")
    if args.shape == "ball":
        if args.R is not None:
            val = ball.ball_ratio(k, args.R)
            text = f"ratio = {val!r}\nR = {args.R!r}\n"
        else:
            res = ball.rho_ball(k)
            text = f"rho_ball = {float(res.rho)!r}\nregime = {res.regime.value}\n"
            if res.r_star is not None:
                text += f"R* = {res.r_star!r}\n"
            if res.lambda_star is not None:
                text += f"lambda* = {res.lambda_star!r}\n"
    else:
        if args.l is not None:
            val = cylinder.sigma_cyl(k, args.l, args.quad)
            text = f"sigma_cyl = {val!r}\nl = {args.l!r}\n"
        else:
            if k.family is Family.RIESZ:
                res = cylinder.rho_cyl_riesz(k.n, k.alpha)
            else:
                res = cylinder.rho_cyl(k, tol=args.tol, n_quad=args.quad)
            text = f"rho_cyl = {float(res.sigma)!r}\nl* = {res.l!r}\nmethod = {res.method.value}\n"
    _emit(args, text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.family == "riesz":
        raise UnsupportedConfiguration("the Riesz family has no kappa to sweep")
    defaults = {"trunc": (0.5, 2.0), "yukawa": (0.3, 1.5)}[args.family]
    lo = args.kappa_min if args.kappa_min is not None else defaults[0]
    hi = args.kappa_max if args.kappa_max is not None else defaults[1]
    if not (0 < lo < hi) or args.steps < 2:
        print("error: need 0 < kappa-min < kappa-max and steps >= 2", file=sys.stderr)
        return EXIT_USAGE
    kappas = np.linspace(lo, hi, args.steps)
    rows = run_sweep(args.family, kappas, tol=args.tol, n_quad=args.quad)
    _emit(args, format_sweep_csv(rows, sweep_thresholds(args.family)))
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.case == "trunc-coulomb":
        rep = certify.certify_trunc_coulomb(args.kappa or "11/10", args.precision, args.width_tol)
    else:
        parts = args.bracket.split(",")
        if len(parts) != 2:
            print("error: --bracket expects a,b", file=sys.stderr)
            return EXIT_USAGE
        rep = certify.certify_yukawa(args.kappa or "56/100", args.l, args.N, tuple(parts),
                                     args.precision, args.width_tol)
    text = rep.to_json() + "\n"
    if args.out:
        write_atomic(args.out, text)
    lo_l, hi_l = rep.lower.float_bounds()
    lo_u, hi_u = rep.upper.float_bounds()
    print(f"verdict: {rep.verdict.value}")
    print(f"ball lower bound enclosure:     [{lo_l!r}, {hi_l!r}]")
    print(f"cylinder upper bound enclosure: [{lo_u!r}, {hi_u!r}]")
    for note in rep.notes:
        print(f"note: {note}")
    print(f"wall time: {rep.wall_time_s:.2f} s")
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK if rep.verdict is certify.Verdict.CERTIFIED else EXIT_INCONCLUSIVE


def converge_report(kappa: float, l: float, n_list: Sequence[int], reference_n: int,
                    plain: bool = False):
    integrand = cylinder.YukawaIntegrand(kappa, l)
    f = integrand.F if plain else integrand.F_reg
    from droplet.numerics import simpson

    reference = simpson(f, 0.0, 2.0 * l, reference_n)
    return convergence_study(f, 0.0, 2.0 * l, n_list, reference)


def cmd_converge(args) -> int:
    try:
        n_list = [int(x) for x in args.n_list.split(",") if x.strip()]
    except ValueError:
        print("error: --n-list expects comma separated integers", file=sys.stderr)
        return EXIT_USAGE
    rep = converge_report(args.kappa, args.l, n_list, args.reference_n, args.plain)
    buf = io.StringIO()
    buf.write(f"# fitted_order={_fmt(rep.fitted_order)}\n")
    buf.write(f"# rows_used_in_fit={len(rep.fit_rows)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("n", "h", "error"))
    for n, (h, e) in zip(n_list, rep.rows):
        w.writerow((n, _fmt(h), _fmt(e)))
    _emit(args, buf.getvalue())
    return EXIT_OK


COMMANDS = {"ratio": cmd_ratio, "sweep": cmd_sweep, "certify": cmd_certify, "converge": cmd_converge}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    if args.quad <= 0 or args.quad % 2:
        print("error: --quad must be a positive even integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UnsupportedConfiguration as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except CertificationError as exc:
        print(f"not provable: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
