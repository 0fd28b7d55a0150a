"""Command-line interface: ``hamchar {mu,independence,crosscheck,scan}``.

Exit codes: 0 success, 1 internal invariant failure (or a failed
cross-check), 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import analysis, haarmc
from .muclasses import make_orbit, mu_class
from .rootdata import (
    RootDatum,
    UnsupportedDatumError,
    build_root_datum,
    kset,
)

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)
SCAN_FIXED_COLUMNS = ("t", "xi", "n", "w_xi_order")
MIN_SAMPLES = 1000


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"--{field}: {message}")
        self.field = field


def group_name(datum: RootDatum) -> str:
    r = datum.rank
    return {
        "A": f"SU({r + 1})",
        "B": f"SO({2 * r + 1})",
        "C": f"Sp({r})",
        "D": f"SO({2 * r})",
    }[datum.family]


def default_xi(datum: RootDatum) -> tuple[Fraction, ...]:
    v = [Fraction(p) for p in PRIMES[: datum.ambient_dim]]
    if datum.family == "A":
        mean = sum(v) / len(v)
        v = [c - mean for c in v]
    return tuple(v)


def default_points(datum: RootDatum, xi: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    d = datum.ambient_dim
    shift = [Fraction(0)] * d
    shift[0] = Fraction(1)
    if datum.family == "A":
        shift[-1] = Fraction(-1)
    return [tuple(x + j * s for x, s in zip(xi, shift)) for j in range(3)]


# parsing ------------------------------------------------------------------------

def parse_vector(text: str, field: str) -> tuple[Fraction, ...]:
    try:
        parts = [p.strip() for p in text.split(",")]
        if not parts or any(not p for p in parts):
            raise ValueError
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(field, f"expected comma-separated rationals p/q, got {text!r}") from None


def parse_k(text: str, datum: RootDatum) -> list[int]:
    if text.strip().upper() == "K":
        return list(dict.fromkeys(kset(datum)))
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError("k", "empty k list")
    try:
        ks = [int(p) for p in parts]
    except ValueError:
        raise ConfigError("k", f"expected integers or 'K', got {text!r}") from None
    if any(k < 1 for k in ks):
        raise ConfigError("k", "k must be >= 1")
    return list(dict.fromkeys(ks))


def parse_line(text: str) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...], int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("line", "expected start:direction:steps")
    start = parse_vector(parts[0], "line")
    direction = parse_vector(parts[1], "line")
    try:
        steps = int(parts[2])
    except ValueError:
        raise ConfigError("line", f"steps must be an integer, got {parts[2]!r}") from None
    if steps < 1:
        raise ConfigError("line", "steps must be >= 1")
    if all(c == 0 for c in direction):
        raise ConfigError("line", "zero-length direction")
    return start, direction, steps


def resolve_datum(args) -> RootDatum:
    try:
        return build_root_datum(args.family, args.rank)
    except UnsupportedDatumError as exc:
        raise ConfigError("family" if "family" in str(exc) else "rank", str(exc)) from None


def resolve_orbit(datum: RootDatum, xi: Sequence[Fraction]):
    try:
        return make_orbit(datum, xi)
    except ValueError as exc:
        raise ConfigError("xi", str(exc)) from None


# commands -----------------------------------------------------------------------

def _fmt(v: Sequence) -> list[str]:
    return [str(Fraction(c)) for c in v]


def cmd_mu(args) -> tuple[str, int]:
    datum = resolve_datum(args)
    xi = parse_vector(args.xi, "xi")
    ks = parse_k(args.k, datum)
    spec = resolve_orbit(datum, xi)
    classes = []
    for k in ks:
        mc = mu_class(spec, k)
        entry = {"k": k, "is_zero": mc.is_zero, "poly": mc.poly.to_json()}
        if datum.family == "A":
            entry["chart_poly"] = mc.poly.restrict_traceless().to_json()
        entry["decomposition"] = analysis.decompose_in_generators(mc.poly, datum, k).to_json()
        classes.append(entry)
    doc = {
        "group": group_name(datum),
        "family": datum.family,
        "rank": datum.rank,
        "xi": _fmt(spec.xi),
        "n": spec.n,
        "orientation": spec.orientation,
        "stabilizer": {
            "roots": [list(a) for a in spec.r_xi_pos],
            "weyl_order": spec.w_xi_order,
        },
        "classes": classes,
    }
    return _dump(doc), 0


def cmd_independence(args) -> tuple[str, int]:
    datum = resolve_datum(args)
    xi = parse_vector(args.xi, "xi")
    ks = parse_k(args.k, datum)
    if len(ks) > datum.rank:
        raise ConfigError("k", f"at most {datum.rank} classes for {datum.label}")
    if args.trials < 1:
        raise ConfigError("trials", "must be >= 1")
    spec = resolve_orbit(datum, xi)
    polys = [mu_class(spec, k).poly for k in ks]
    rep = analysis.independence_certificate(
        polys, datum, trials=args.trials, seed=args.seed, k_list=ks
    )
    doc = {"group": group_name(datum), "family": datum.family, "rank": datum.rank,
           "xi": _fmt(spec.xi), "n": spec.n}
    doc.update(rep.to_json())
    return _dump(doc), 0


def cmd_crosscheck(args) -> tuple[str, int]:
    datum = resolve_datum(args)
    if datum.family == "C":
        raise ConfigError("family", "Monte Carlo cross-check supports SU (A) and SO (B, D) only")
    if args.samples < MIN_SAMPLES:
        raise ConfigError("samples", f"must be >= {MIN_SAMPLES}")
    xi = parse_vector(args.xi, "xi") if args.xi else default_xi(datum)
    ks = parse_k(args.k, datum)
    spec = resolve_orbit(datum, xi)
    if args.points:
        points = [parse_vector(p, "points") for p in args.points.split(";")]
        for p in points:
            if len(p) != datum.ambient_dim:
                raise ConfigError("points", f"each point needs {datum.ambient_dim} coordinates")
    else:
        points = default_points(datum, spec.xi)
    try:
        rep = haarmc.crosscheck_ratio(
            spec, ks, points, args.samples, args.seed, threads=args.threads
        )
    except haarmc.DegenerateTestPointsError as exc:
        raise ConfigError("points", str(exc)) from None
    doc = {
        "group": group_name(datum),
        "family": datum.family,
        "rank": datum.rank,
        "xi": _fmt(spec.xi),
        "n": spec.n,
        "samples": args.samples,
        "seed": args.seed,
        "status": rep.status,
        "sign": rep.sign,
        "sign_determined": rep.sign_determined,
        "per_k": [dict({"k": k}, **v) for k, v in rep.per_k.items()],
        "points": [
            {
                "k": p.k,
                "x": _fmt(p.x),
                "mu": str(Fraction(p.mu_value)),
                "mean": p.estimate.mean,
                "stderr": p.estimate.stderr,
                "integral": p.integral,
                "integral_stderr": p.integral_stderr,
                "skipped": p.skipped,
                "rho": p.rho,
                "rho_stderr": p.rho_stderr,
            }
            for p in rep.points
        ],
        "pairs": [
            {"k": q.k, "j": q.j, "observed": q.observed, "stderr": q.stderr,
             "predicted": q.predicted, "passed": q.passed}
            for q in rep.pairs
        ],
    }
    return _dump(doc), 0 if rep.passed else 1


def scan_columns(ks: Sequence[int]) -> list[str]:
    return list(SCAN_FIXED_COLUMNS) + [f"mu_{k}_zero" for k in ks] + [
        "jacobian_rank",
        "independent",
    ]


def cmd_scan(args) -> tuple[str, int]:
    datum = resolve_datum(args)
    ks = parse_k(args.k, datum)
    if len(ks) > datum.rank:
        raise ConfigError("k", f"at most {datum.rank} classes for {datum.label}")
    if not args.line:
        raise ConfigError("line", "required")
    start, direction, steps = parse_line(args.line)
    try:
        grid = analysis.line_grid(datum, start, direction, steps)
    except ValueError as exc:
        raise ConfigError("line", str(exc)) from None
    rows = analysis.genericity_scan(datum, ks, grid, trials=args.trials, seed=args.seed)
    cols = scan_columns(ks)
    records = []
    for r in rows:
        rec = {"t": str(r.t), "xi": ";".join(_fmt(r.xi)), "n": r.n, "w_xi_order": r.w_xi_order}
        for k in ks:
            rec[f"mu_{k}_zero"] = str(r.zero[k]).lower()
        rec["jacobian_rank"] = r.jacobian_rank
        rec["independent"] = str(r.independent).lower()
        records.append(rec)
    if args.format == "json":
        return _dump({"group": group_name(datum), "columns": cols, "rows": records}), 0
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue(), 0


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamchar",
        description="Hamiltonian characteristic classes of coadjoint orbits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k_default="K"):
        p.add_argument("--family", required=True, type=str.upper, help="A, B, C or D")
        p.add_argument("--rank", required=True, type=int)
        p.add_argument("--k", default=k_default, help="k, k1,k2,... or K (all degrees)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("mu", help="compute mu_k as exact polynomials")
    common(p)
    p.add_argument("--xi", required=True)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_mu)

    p = sub.add_parser("independence", help="Jacobian independence certificate")
    common(p)
    p.add_argument("--xi", required=True)
    p.add_argument("--trials", type=int, default=analysis.DEFAULT_TRIALS)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("crosscheck", help="Monte Carlo Haar cross-check of mu_k")
    common(p)
    p.add_argument("--xi", default=None, help="default: a generic point")
    p.add_argument("--points", default=None, help="test points X separated by ';'")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_crosscheck)

    p = sub.add_parser("scan", help="genericity scan along a line of xi values")
    common(p)
    p.add_argument("--line", required=True, help="start:direction:steps")
    p.add_argument("--trials", type=int, default=analysis.DEFAULT_TRIALS)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.exit(2, "hamchar: error: --threads: must be >= 1\n")
    try:
        text, code = args.func(args)
    except ConfigError as exc:
        parser.exit(2, f"hamchar: error: {exc}\n")
    except (AssertionError, ArithmeticError) as exc:
        print(f"hamchar: internal invariant failure: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
