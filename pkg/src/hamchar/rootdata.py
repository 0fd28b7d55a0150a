"""Classical root systems (types A, B, C, D) and their Weyl groups.

Vectors live in the standard integer coordinates: type A_r uses r+1
coordinates (the traceless hyperplane), types B_r, C_r, D_r use r.
Weyl group elements are signed permutations and are enumerated eagerly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

FAMILIES = ("A", "B", "C", "D")
MAX_RANK = 7

Vector = tuple[int, ...]


class UnsupportedDatumError(ValueError):
    """Family/rank combination outside the implemented range."""


class TrivialOrbitError(ValueError):
    """The point xi is zero, so its coadjoint orbit is a point."""


@dataclass(frozen=True)
class RootDatum:
    family: str
    rank: int
    ambient_dim: int
    positive_roots: tuple[Vector, ...]
    weyl_order: int
    invariant_degrees: tuple[int, ...]

    @property
    def label(self) -> str:
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class WeylElement:
    """Signed permutation ``w`` with ``w e_i = signs[i] * e_{perm[i]}``."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]
    sign: int

    def apply(self, v: Sequence) -> tuple:
        out = [0] * len(v)
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            out[p] = s * v[i]
        return tuple(out)

    def inverse(self) -> "WeylElement":
        d = len(self.perm)
        perm = [0] * d
        signs = [1] * d
        for i, (p, s) in enumerate(zip(self.perm, self.signs)):
            perm[p] = i
            signs[p] = s
        return WeylElement(tuple(perm), tuple(signs), self.sign)

    @property
    def signed_permutation(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.perm, self.signs))


def _perm_parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    parity = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def _unit(d: int, i: int, c: int = 1) -> list[int]:
    v = [0] * d
    v[i] = c
    return v


def _positive_roots(family: str, rank: int) -> list[Vector]:
    d = rank + 1 if family == "A" else rank
    roots: list[Vector] = []
    for i in range(d):
        for j in range(i + 1, d):
            v = _unit(d, i)
            v[j] = -1
            roots.append(tuple(v))
            if family != "A":
                w = _unit(d, i)
                w[j] = 1
                roots.append(tuple(w))
    if family == "B":
        roots.extend(tuple(_unit(d, i)) for i in range(d))
    elif family == "C":
        roots.extend(tuple(_unit(d, i, 2)) for i in range(d))
    return roots


def _degrees(family: str, rank: int) -> tuple[int, ...]:
    if family == "A":
        return tuple(range(2, rank + 2))
    if family in ("B", "C"):
        return tuple(range(2, 2 * rank + 1, 2))
    return tuple(sorted(list(range(2, 2 * rank - 1, 2)) + [rank]))


def _weyl_order(family: str, rank: int) -> int:
    if family == "A":
        return factorial(rank + 1)
    if family in ("B", "C"):
        return 2**rank * factorial(rank)
    return 2 ** (rank - 1) * factorial(rank)


@lru_cache(maxsize=None)
def build_root_datum(family: str, rank: int) -> RootDatum:
    family = family.upper() if isinstance(family, str) else family
    if family not in FAMILIES:
        raise UnsupportedDatumError(f"unsupported datum: family {family!r}")
    if not isinstance(rank, int) or rank < 1 or rank > MAX_RANK:
        raise UnsupportedDatumError(
            f"unsupported datum: rank {rank!r} (1 <= rank <= {MAX_RANK})"
        )
    if family == "D" and rank < 2:
        raise UnsupportedDatumError("unsupported datum: D requires rank >= 2")
    roots = _positive_roots(family, rank)
    return RootDatum(
        family=family,
        rank=rank,
        ambient_dim=rank + 1 if family == "A" else rank,
        positive_roots=tuple(roots),
        weyl_order=_weyl_order(family, rank),
        invariant_degrees=_degrees(family, rank),
    )


@lru_cache(maxsize=16)
def _weyl_list(family: str, rank: int) -> tuple[WeylElement, ...]:
    datum = build_root_datum(family, rank)
    d = datum.ambient_dim
    perms = list(itertools.permutations(range(d)))
    if family == "A":
        sign_choices = [(1,) * d]
    else:
        sign_choices = list(itertools.product((1, -1), repeat=d))
        if family == "D":
            sign_choices = [s for s in sign_choices if s.count(-1) % 2 == 0]
    out = []
    for perm in perms:
        parity = _perm_parity(perm)
        for signs in sign_choices:
            flips = 1 if signs.count(-1) % 2 == 0 else -1
            out.append(WeylElement(perm, signs, parity * flips))
    return tuple(out)


def weyl_elements(datum: RootDatum) -> Iterator[WeylElement]:
    """Yield every element of the Weyl group once (identity first)."""
    return iter(_weyl_list(datum.family, datum.rank))


def kset(datum: RootDatum) -> list[int]:
    """Degrees k with pi_{2k}(BG) (x) Q nonzero, as a sorted multiset."""
    return sorted(datum.invariant_degrees)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum(a * b for a, b in zip(u, v))


def as_rational_vector(xi: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in xi)


def check_point(datum: RootDatum, xi: Sequence) -> tuple[Fraction, ...]:
    """Validate a torus point and return it as a tuple of Fractions."""
    v = as_rational_vector(xi)
    if len(v) != datum.ambient_dim:
        raise ValueError(
            f"xi has length {len(v)}, expected {datum.ambient_dim} for {datum.label}"
        )
    if all(c == 0 for c in v):
        raise TrivialOrbitError("trivial orbit: xi = 0")
    if datum.family == "A" and sum(v) != 0:
        raise ValueError(f"xi must be traceless for family A (sum is {sum(v)})")
    return v


def stabilizer_subsystem(
    datum: RootDatum, xi: Sequence
) -> tuple[tuple[Vector, ...], int]:
    """Positive roots orthogonal to ``xi`` and the order of its Weyl stabilizer."""
    v = check_point(datum, xi)
    roots = tuple(a for a in datum.positive_roots if dot(a, v) == 0)
    order = sum(1 for w in weyl_elements(datum) if w.apply(v) == v)
    return roots, order


def coset_representatives(
    datum: RootDatum, xi: Sequence
) -> list[WeylElement]:
    """One Weyl element per point of the orbit W.xi, first in enumeration order."""
    v = as_rational_vector(xi)
    seen: dict[tuple, WeylElement] = {}
    for w in weyl_elements(datum):
        key = w.apply(v)
        if key not in seen:
            seen[key] = w
    return list(seen.values())
