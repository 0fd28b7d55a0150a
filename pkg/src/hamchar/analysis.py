"""Triviality tests, decomposition into basic invariants, and independence certificates."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .muclasses import is_weyl_invariant, is_zero_poly, make_orbit, mu_class
from .polyring import RatPoly
from .rootdata import RootDatum, check_point

WITNESS_BOUND = 10**6
DEFAULT_TRIALS = 25


class HypothesisViolatedError(ValueError):
    pass


class InconsistentSystemError(ArithmeticError):
    """A W-invariant polynomial failed to decompose (bug or non-invariant input)."""


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _matrix(rows: Sequence[Sequence]) -> DomainMatrix:
    n = len(rows)
    m = len(rows[0]) if rows else 0
    return DomainMatrix([[QQ.convert(Fraction(c)) for c in row] for row in rows], (n, m), QQ)


def exact_rank(rows: Sequence[Sequence]) -> int:
    if not rows or not rows[0]:
        return 0
    return _matrix(rows).rank()


def is_zero(p: RatPoly, datum: RootDatum) -> bool:
    return is_zero_poly(p, datum)


def reduce_chart(p: RatPoly, datum: RootDatum) -> RatPoly:
    """Restrict to the Cartan subalgebra: type A drops to the traceless chart."""
    return p.restrict_traceless() if datum.family == "A" else p


# basic invariants -----------------------------------------------------------

def generator_labels(datum: RootDatum) -> list[str]:
    r = datum.rank
    if datum.family == "A":
        return [f"p{j}" for j in range(2, r + 2)]
    if datum.family in ("B", "C"):
        return [f"q{j}" for j in range(1, r + 1)]
    return [f"q{j}" for j in range(1, r)] + ["pf"]


def basic_invariants(datum: RootDatum) -> list[RatPoly]:
    """Chevalley generators: power sums (A), even power sums (B, C), plus the Pfaffian (D)."""
    d = datum.ambient_dim
    r = datum.rank

    def power_sum(j: int) -> RatPoly:
        return RatPoly(d, {tuple(j if i == t else 0 for i in range(d)): 1 for t in range(d)})

    if datum.family == "A":
        gens = [power_sum(j) for j in range(2, r + 2)]
    elif datum.family in ("B", "C"):
        gens = [power_sum(2 * j) for j in range(1, r + 1)]
    else:
        gens = [power_sum(2 * j) for j in range(1, r)]
        gens.append(RatPoly(d, {(1,) * d: 1}))
    for g in gens:
        if not is_weyl_invariant(g, datum):
            raise AssertionError(f"basic invariant {g} is not W-invariant")
    return gens


def generator_degrees(datum: RootDatum) -> list[int]:
    return [g.degree() for g in basic_invariants(datum)]


def generator_monomials(datum: RootDatum, k: int) -> list[tuple[int, ...]]:
    """Exponent vectors e over the basic invariants with sum e_i * deg_i = k."""
    degs = generator_degrees(datum)
    out = []
    for e in itertools.product(*(range(k // g + 1) for g in degs)):
        if sum(a * g for a, g in zip(e, degs)) == k:
            out.append(e)
    return sorted(out, reverse=True)


def invariant_space_dim(datum: RootDatum, k: int) -> int:
    return len(generator_monomials(datum, k))


# decomposition ----------------------------------------------------------------

@dataclass
class Decomposition:
    k: int
    labels: list[str]
    coefficients: dict[tuple[int, ...], Fraction]
    generator_component: dict[str, Fraction]

    def monomial_label(self, e: tuple[int, ...]) -> str:
        parts = [
            lab + (f"^{a}" if a > 1 else "") for lab, a in zip(self.labels, e) if a
        ]
        return "*".join(parts) or "1"

    def to_json(self) -> dict:
        return {
            "generators": list(self.labels),
            "terms": [
                {"monomial": self.monomial_label(e), "exp": list(e), "coeff": str(c)}
                for e, c in sorted(self.coefficients.items(), reverse=True)
            ],
            "generator_component": {k: str(v) for k, v in self.generator_component.items()},
        }


def _reconstruct(coeffs, gens, dim) -> RatPoly:
    acc = RatPoly.zero(dim)
    for e, c in coeffs.items():
        term = RatPoly.constant(dim, c)
        for g, a in zip(gens, e):
            if a:
                term = term * g**a
        acc = acc + term
    return acc


def decompose_in_generators(p: RatPoly, datum: RootDatum, k: int) -> Decomposition:
    """Write a W-invariant degree-k polynomial in the basic invariants (exact)."""
    labels = generator_labels(datum)
    target = reduce_chart(p, datum)
    if not target.is_homogeneous(k):
        raise ValueError(f"polynomial is not homogeneous of degree {k}")
    gens = [reduce_chart(g, datum) for g in basic_invariants(datum)]
    dim = target.dim
    monos = generator_monomials(datum, k)
    columns = [_reconstruct({e: 1}, gens, dim) for e in monos]
    support = sorted(set(target.terms).union(*(c.terms for c in columns)))
    coeffs: dict[tuple[int, ...], Fraction] = {}
    if support and monos:
        rows = [[c.coefficient(m) for c in columns] + [target.coefficient(m)] for m in support]
        reduced, pivots = _matrix(rows).rref()
        ncol = len(monos)
        if ncol in pivots:
            raise InconsistentSystemError("polynomial is not in the span of invariant products")
        red = reduced.to_list()
        for row_idx, col in enumerate(pivots):
            val = _to_fraction(red[row_idx][ncol])
            if val:
                coeffs[monos[col]] = val
    elif support:
        raise InconsistentSystemError("no invariants of this degree but polynomial is nonzero")
    if _reconstruct(coeffs, gens, dim) != target:
        raise InconsistentSystemError("reconstruction identity failed")
    component = {}
    for i, lab in enumerate(labels):
        e = tuple(1 if j == i else 0 for j in range(len(labels)))
        if e in monos:
            component[lab] = coeffs.get(e, Fraction(0))
    return Decomposition(k=k, labels=labels, coefficients=coeffs, generator_component=component)


# independence -------------------------------------------------------------------

@dataclass
class IndependenceReport:
    k_list: list[int]
    witness_point: tuple[Fraction, ...] | None
    jacobian_rank: int
    independent: bool
    trials_used: int
    zero_classes: list[int] = field(default_factory=list)

    @property
    def dependence_proven(self) -> bool:
        return bool(self.zero_classes)

    def notes(self) -> list[str]:
        out = [f"mu_{k} is exactly zero" for k in self.zero_classes]
        if not self.independent and not self.zero_classes:
            out.append(
                f"rank deficit at {self.trials_used} random points: evidence of dependence, not proof"
            )
        return out

    def to_json(self) -> dict:
        return {
            "k_list": list(self.k_list),
            "witness_point": None
            if self.witness_point is None
            else [str(c) for c in self.witness_point],
            "jacobian_rank": self.jacobian_rank,
            "independent": self.independent,
            "trials_used": self.trials_used,
            "dependence_proven": self.dependence_proven,
            "notes": self.notes(),
        }


def effective_rank(datum: RootDatum) -> int:
    return datum.rank


def _witness(rng: random.Random, dim: int) -> list[int]:
    return [rng.randint(-WITNESS_BOUND, WITNESS_BOUND) for _ in range(dim)]


def _lift_point(pt: Sequence, datum: RootDatum) -> tuple[Fraction, ...]:
    pt = [Fraction(c) for c in pt]
    if datum.family == "A":
        pt.append(-sum(pt))
    return tuple(pt)


def independence_certificate(
    polys: Sequence[RatPoly],
    datum: RootDatum,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    k_list: Sequence[int] | None = None,
) -> IndependenceReport:
    """Jacobian criterion at random integer points, computed exactly over Q.

    Full rank at one point certifies algebraic independence.  Rank deficit
    at every trial is only evidence of dependence unless some polynomial is
    identically zero, which is recorded in ``zero_classes``.
    """
    if not polys:
        raise ValueError("empty polynomial list")
    if len(polys) > effective_rank(datum):
        raise ValueError(
            f"{len(polys)} polynomials exceed the rank {effective_rank(datum)} of {datum.label}"
        )
    if k_list is None:
        k_list = [p.degree() for p in polys]
    reduced = [reduce_chart(p, datum) for p in polys]
    zero = [k for k, p in zip(k_list, reduced) if p.is_zero()]
    dim = reduced[0].dim
    jac = [[p.partial(i) for i in range(dim)] for p in reduced]
    best = 0
    witness = None
    used = 0
    for t in range(trials):
        used = t + 1
        rng = random.Random(f"{seed}:{t}")
        pt = _witness(rng, dim)
        rank = exact_rank([[q.eval(pt) for q in row] for row in jac])
        if rank > best:
            best = rank
        if rank == len(polys):
            witness = _lift_point(pt, datum)
            break
    return IndependenceReport(
        k_list=list(k_list),
        witness_point=witness,
        jacobian_rank=best,
        independent=witness is not None,
        trials_used=used,
        zero_classes=zero,
    )


def jacobian_rank_at(polys: Sequence[RatPoly], datum: RootDatum, point: Sequence) -> int:
    """Exact Jacobian rank at a point given in the chart coordinates."""
    reduced = [reduce_chart(p, datum) for p in polys]
    return exact_rank([[p.partial(i).eval(point) for i in range(p.dim)] for p in reduced])


def mu_independence(
    datum: RootDatum, xi: Sequence, ks: Sequence[int], trials: int = DEFAULT_TRIALS, seed: int = 0
) -> IndependenceReport:
    spec = make_orbit(datum, xi)
    ks = list(dict.fromkeys(ks))
    polys = [mu_class(spec, k).poly for k in ks]
    return independence_certificate(polys, datum, trials=trials, seed=seed, k_list=ks)


# vanishing locus ------------------------------------------------------------------

@dataclass
class FailLocusRow:
    xi: tuple[Fraction, ...]
    generator_component: Fraction
    u_value: Fraction
    consistent: bool


@dataclass
class FailLocusReport:
    datum: RootDatum
    m: int
    generator: str
    rows: list[FailLocusRow]

    @property
    def consistent(self) -> bool:
        return all(r.consistent for r in self.rows)


def check_fail_hypothesis(datum: RootDatum, m: int) -> tuple[str, RatPoly]:
    """Return the unique degree-m generator, or raise if H^{2m}(BG) is not one-dimensional."""
    labels = generator_labels(datum)
    gens = basic_invariants(datum)
    in_degree = [i for i, g in enumerate(gens) if g.degree() == m]
    if len(in_degree) >= 2:
        raise HypothesisViolatedError(
            f"hypothesis violated: {datum.label} has {len(in_degree)} generators in degree {m} "
            f"({', '.join(labels[i] for i in in_degree)}); for SO(4k) the Euler class and the "
            f"k-th Pontryagin class both live in H^{2 * m}(BG), so that space is not one-dimensional"
        )
    dim = invariant_space_dim(datum, m)
    if dim != 1 or not in_degree:
        raise HypothesisViolatedError(
            f"hypothesis violated: invariants of degree {m} for {datum.label} "
            f"form a space of dimension {dim}, not 1"
        )
    i = in_degree[0]
    return labels[i], gens[i]


def fail_locus_check(datum: RootDatum, m: int, xi_samples: Iterable[Sequence]) -> FailLocusReport:
    """Check that mu_m vanishes exactly where the unique degree-m invariant does."""
    label, u = check_fail_hypothesis(datum, m)
    rows = []
    for xi in xi_samples:
        spec = make_orbit(datum, xi)
        dec = decompose_in_generators(mu_class(spec, m).poly, datum, m)
        lam = dec.generator_component[label]
        uval = Fraction(u.eval(spec.xi))
        rows.append(FailLocusRow(spec.xi, lam, uval, (lam == 0) == (uval == 0)))
    return FailLocusReport(datum, m, label, rows)


# genericity scans -----------------------------------------------------------------

@dataclass
class ScanRow:
    t: Fraction
    xi: tuple[Fraction, ...]
    n: int
    w_xi_order: int
    zero: dict[int, bool]
    jacobian_rank: int
    independent: bool


def line_grid(
    datum: RootDatum, start: Sequence, direction: Sequence, steps: int
) -> list[tuple[Fraction, tuple[Fraction, ...]]]:
    """Points start + t * direction for integer t centred on 0.

    For type A both vectors are first projected onto the traceless hyperplane.
    """
    start = [Fraction(c) for c in start]
    direction = [Fraction(c) for c in direction]
    if len(start) != datum.ambient_dim or len(direction) != datum.ambient_dim:
        raise ValueError(f"line vectors must have length {datum.ambient_dim}")
    if datum.family == "A":
        ms, md = sum(start) / len(start), sum(direction) / len(direction)
        start = [c - ms for c in start]
        direction = [c - md for c in direction]
    if all(c == 0 for c in direction):
        raise ValueError("zero-length direction")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    out = []
    for j in range(steps):
        t = Fraction(j - (steps - 1) // 2)
        out.append((t, tuple(s + t * v for s, v in zip(start, direction))))
    return out


def genericity_scan(
    datum: RootDatum,
    k_list: Sequence[int],
    grid: Iterable[tuple[Fraction, Sequence]],
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> list[ScanRow]:
    ks = list(dict.fromkeys(k_list))
    rows = []
    for t, xi in grid:
        try:
            v = check_point(datum, xi)
        except ValueError:
            continue
        spec = make_orbit(datum, v)
        classes = [mu_class(spec, k) for k in ks]
        rep = independence_certificate(
            [c.poly for c in classes], datum, trials=trials, seed=seed, k_list=ks
        )
        rows.append(
            ScanRow(
                t=Fraction(t),
                xi=spec.xi,
                n=spec.n,
                w_xi_order=spec.w_xi_order,
                zero={c.k: c.is_zero for c in classes},
                jacobian_rank=rep.jacobian_rank,
                independent=rep.independent,
            )
        )
    return rows
