"""Exact sparse multivariate polynomials over Q.

A polynomial is a mapping from exponent tuples to nonzero rational
coefficients (``int`` or ``Fraction``; both compare and combine exactly).
Variables are indexed from 0.  Nothing in this module touches floats.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .rootdata import RootDatum, WeylElement, _perm_parity, weyl_elements

Exponent = tuple[int, ...]


class DimensionError(ValueError):
    pass


class NotDivisibleError(ArithmeticError):
    """Exact division by a linear form left a nonzero remainder."""


def _as_rational(c):
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return Fraction(c.numerator, c.denominator)
    if isinstance(c, str):
        return _as_rational(Fraction(c))
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


def _exact_div(a, c):
    if c == 1:
        return a
    if c == -1:
        return -a
    q = Fraction(a) / c
    return q.numerator if q.denominator == 1 else q


def _glex_key(e: Exponent):
    return (sum(e), e)


class RatPoly:
    """Immutable sparse polynomial in ``dim`` variables with rational coefficients."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Exponent, object] | None = None):
        self.dim = dim
        clean: dict[Exponent, object] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != dim:
                    raise DimensionError(f"exponent {e} has length != {dim}")
                c = _as_rational(c)
                if c != 0:
                    clean[e] = c
        self.terms = clean

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "RatPoly":
        # caller guarantees: no zero coefficients, exponents of length dim
        p = cls.__new__(cls)
        p.dim = dim
        p.terms = terms
        return p

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "RatPoly":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c) -> "RatPoly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim: int, i: int) -> "RatPoly":
        e = [0] * dim
        e[i] = 1
        return cls._raw(dim, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "RatPoly":
        dim = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * dim
            e[i] = 1
            terms[tuple(e)] = c
        return cls(dim, terms)

    # basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, deg: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return deg is None or degs == {deg}

    def coefficient(self, exp: Sequence[int]):
        return self.terms.get(tuple(exp), 0)

    def sorted_terms(self) -> list[tuple[Exponent, object]]:
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: _glex_key(t[0]), reverse=True)

    # arithmetic -------------------------------------------------------
    def _check(self, other: "RatPoly") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "RatPoly":
        if isinstance(other, RatPoly):
            self._check(other)
            return other
        return RatPoly.constant(self.dim, other)

    def __add__(self, other) -> "RatPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return RatPoly._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "RatPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "RatPoly":
        c = _as_rational(c)
        if c == 0:
            return RatPoly.zero(self.dim)
        return RatPoly._raw(
            self.dim, {e: _as_rational(v * c) for e, v in self.terms.items()}
        )

    def __mul__(self, other) -> "RatPoly":
        if not isinstance(other, RatPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Exponent, object] = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                out[e] = get(e, 0) + c1 * c2
        return RatPoly._raw(self.dim, {e: c for e, c in out.items() if c})

    def __rmul__(self, other) -> "RatPoly":
        return self.scale(other)

    def __pow__(self, n: int) -> "RatPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = RatPoly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == RatPoly.constant(self.dim, other)
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    # calculus and evaluation -----------------------------------------
    def eval(self, point: Sequence):
        if len(point) != self.dim:
            raise DimensionError(f"point has length {len(point)}, expected {self.dim}")
        pt = [_as_rational(x) for x in point]
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, a in zip(pt, e):
                if a:
                    v *= x**a
            total += v
        return total

    def partial(self, i: int) -> "RatPoly":
        if not 0 <= i < self.dim:
            raise IndexError(f"variable index {i} out of range for dim {self.dim}")
        out = {}
        for e, c in self.terms.items():
            a = e[i]
            if a:
                f = list(e)
                f[i] = a - 1
                out[tuple(f)] = c * a
        return RatPoly._raw(self.dim, out)

    def restrict_traceless(self) -> "RatPoly":
        """Substitute x_{d-1} = -(x_0 + ... + x_{d-2}); result has d-1 variables."""
        d = self.dim
        if d < 2:
            raise DimensionError("traceless restriction needs at least 2 variables")
        s = RatPoly.linear([-1] * (d - 1))
        powers = [RatPoly.constant(d - 1, 1)]
        out: dict[Exponent, object] = {}
        for e, c in self.terms.items():
            last = e[-1]
            while len(powers) <= last:
                powers.append(powers[-1] * s)
            head = e[:-1]
            for f, v in powers[last].terms.items():
                g = tuple([a + b for a, b in zip(head, f)])
                out[g] = out.get(g, 0) + c * v
        return RatPoly._raw(d - 1, {e: c for e, c in out.items() if c})

    # serialization ----------------------------------------------------
    def to_json(self) -> list[dict]:
        return [
            {"exp": list(e), "coeff": str(Fraction(c))} for e, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, dim: int, data: Iterable[Mapping]) -> "RatPoly":
        return cls(dim, {tuple(t["exp"]): Fraction(t["coeff"]) for t in data})

    def __repr__(self) -> str:
        return f"RatPoly({self.dim}, {self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a
            )
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def weyl_apply(w: WeylElement, p: RatPoly) -> RatPoly:
    """``(w.p)(x) = p(w^{-1} x)``: substitute x_i -> signs[i] * x_{perm[i]}."""
    if len(w.perm) != p.dim:
        raise DimensionError("Weyl element and polynomial dimensions differ")
    perm, signs = w.perm, w.signs
    flips = [i for i, s in enumerate(signs) if s < 0]
    out = {}
    for e, c in p.terms.items():
        f = [0] * p.dim
        for i, a in enumerate(e):
            f[perm[i]] = a
        if sum(e[i] for i in flips) % 2:
            c = -c
        out[tuple(f)] = c
    return RatPoly._raw(p.dim, out)


def antisymmetrize_naive(datum: RootDatum, p: RatPoly) -> RatPoly:
    """Literal sum over W of sign(w) * (w.p).  Reference path for tests."""
    if datum.ambient_dim != p.dim:
        raise DimensionError("datum and polynomial dimensions differ")
    acc: dict[Exponent, object] = {}
    for w in weyl_elements(datum):
        for e, c in weyl_apply(w, p).terms.items():
            acc[e] = acc.get(e, 0) + w.sign * c
    return RatPoly._raw(p.dim, {e: c for e, c in acc.items() if c})


@lru_cache(maxsize=16)
def _permutations_with_parity(d: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    return tuple((s, _perm_parity(s)) for s in itertools.permutations(range(d)))


def antisymmetrize(datum: RootDatum, p: RatPoly) -> RatPoly:
    """Alternating sum over the Weyl group, ``sum_w sign(w) * (w.p)``.

    The result is anti-invariant, so it is determined by its coefficients
    on exponents sorted in decreasing order with distinct entries (every
    classical Weyl group contains all coordinate permutations).  Only those
    coefficients are accumulated over W; the rest of each orbit is filled
    in by permuting with the permutation sign.
    """
    d = p.dim
    if datum.ambient_dim != d:
        raise DimensionError("datum and polynomial dimensions differ")
    reps = set()
    for e in p.terms:
        s = tuple(sorted(e, reverse=True))
        if len(set(s)) == d:
            reps.add(s)
    if not reps:
        return RatPoly.zero(d)
    terms = p.terms
    elements = [
        (w.perm, tuple(i for i, s in enumerate(w.signs) if s < 0), w.sign)
        for w in weyl_elements(datum)
    ]
    rep_coeffs = {}
    for b in reps:
        total = 0
        for perm, flips, sgn in elements:
            a = tuple([b[j] for j in perm])
            c = terms.get(a)
            if c is None:
                continue
            if sum(a[i] for i in flips) % 2:
                sgn = -sgn
            total += sgn * c
        if total:
            rep_coeffs[b] = total
    out = {}
    for b, c in rep_coeffs.items():
        for sigma, parity in _permutations_with_parity(d):
            f = [0] * d
            for i, a in enumerate(b):
                f[sigma[i]] = a
            out[tuple(f)] = c if parity > 0 else -c
    return RatPoly._raw(d, out)


def divide_exact_linear(p: RatPoly, ell: RatPoly) -> RatPoly:
    """Return q with ``q * ell == p``; raise NotDivisibleError otherwise."""
    if p.dim != ell.dim:
        raise DimensionError("dimension mismatch")
    if not ell.is_homogeneous(1) or ell.is_zero():
        raise ValueError("divisor must be a nonzero linear form")
    d = p.dim
    lin = {e.index(1): c for e, c in ell.terms.items()}
    j = min(lin)
    lead = lin.pop(j)
    rest = list(lin.items())

    # p_e: coefficient of x_j^e, a polynomial in the other variables
    levels: dict[int, dict[Exponent, object]] = {}
    for e, c in p.terms.items():
        key = e[:j] + (0,) + e[j + 1:]
        levels.setdefault(e[j], {})[key] = c
    if not levels:
        return RatPoly.zero(d)
    top = max(levels)

    # p_e = lead * q_{e-1} + rest * q_e
    out: dict[Exponent, object] = {}
    q_e: dict[Exponent, object] = {}
    for e in range(top, 0, -1):
        cur = dict(levels.get(e, {}))
        for key, c in q_e.items():
            for i, ci in rest:
                k = list(key)
                k[i] += 1
                k = tuple(k)
                v = cur.get(k, 0) - ci * c
                if v:
                    cur[k] = v
                else:
                    cur.pop(k, None)
        q_e = {key: _exact_div(c, lead) for key, c in cur.items()}
        for key, c in q_e.items():
            full = key[:j] + (e - 1,) + key[j + 1:]
            out[full] = c
    remainder = dict(levels.get(0, {}))
    for key, c in q_e.items():
        for i, ci in rest:
            k = list(key)
            k[i] += 1
            k = tuple(k)
            v = remainder.get(k, 0) - ci * c
            if v:
                remainder[k] = v
            else:
                remainder.pop(k, None)
    if remainder:
        raise NotDivisibleError(f"not divisible by {ell}: {len(remainder)} remainder terms")
    return RatPoly._raw(d, out)


@lru_cache(maxsize=64)
def _compositions(d: int, n: int) -> tuple[tuple[Exponent, int], ...]:
    """All exponent vectors of total degree n in d variables with multinomials."""
    fn = factorial(n)
    out = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 1:
            e = tuple(prefix + [left])
            denom = 1
            for a in e:
                denom *= factorial(a)
            out.append((e, fn // denom))
            return
        for a in range(left, -1, -1):
            rec(prefix + [a], left - a, slots - 1)

    rec([], n, d)
    return tuple(out)


def linear_power(coeffs: Sequence, n: int) -> RatPoly:
    """Multinomial expansion of ``(sum_i coeffs[i] * x_i) ** n``."""
    d = len(coeffs)
    cs = [_as_rational(c) for c in coeffs]
    pw = [[1] * (n + 1) for _ in range(d)]
    for i, c in enumerate(cs):
        for a in range(1, n + 1):
            pw[i][a] = pw[i][a - 1] * c
    out = {}
    for e, m in _compositions(d, n):
        v = m
        for i, a in enumerate(e):
            if a:
                v *= pw[i][a]
                if not v:
                    break
        if v:
            out[e] = v
    return RatPoly._raw(d, out)
