"""Coupling class and the classes mu_k of a coadjoint orbit, in the Borel model.

H*(BT) is the polynomial ring on the torus coordinates and H*(BG) its
Weyl-invariant subring.  For the universal fibration G/G_xi -> BG_xi -> BG
the fibre integral of a W_xi-invariant polynomial f is

    pi_!(f) = antisym(f * prod_{a in R_xi+} a) / (|W_xi| * prod_{a in R+} a)

and the coupling class is the linear form <xi, x>.  Hence

    mu_k = antisym(<xi, x>^(n+k) * prod_{a in R_xi+} a) / (|W_xi| * prod_{a in R+} a).

The fibre is oriented by the fixed positive system R+.  This agrees with
the symplectic orientation of the orbit when xi is dominant; in general
the two differ by ``OrbitSpec.orientation``, and ``MuClass.symplectic_poly``
is the class for the symplectic orientation (a function of the orbit only).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .polyring import (
    RatPoly,
    antisymmetrize,
    divide_exact_linear,
    linear_power,
    weyl_apply,
)
from .rootdata import (
    RootDatum,
    Vector,
    check_point,
    coset_representatives,
    dot,
    stabilizer_subsystem,
    weyl_elements,
)


class PushforwardError(AssertionError):
    """An internal consistency check of the pushforward failed."""


@dataclass(frozen=True)
class OrbitSpec:
    datum: RootDatum
    xi: tuple[Fraction, ...]
    r_xi_pos: tuple[Vector, ...]
    w_xi_order: int
    n: int
    orientation: int = 1

    @property
    def is_regular(self) -> bool:
        return self.w_xi_order == 1


@dataclass(frozen=True)
class MuClass:
    k: int
    poly: RatPoly = field(compare=False)
    orbit: OrbitSpec
    is_zero: bool

    @property
    def symplectic_poly(self) -> RatPoly:
        return self.poly.scale(self.orbit.orientation)


def make_orbit(datum: RootDatum, xi: Sequence) -> OrbitSpec:
    v = check_point(datum, xi)
    roots, order = stabilizer_subsystem(datum, v)
    n = len(datum.positive_roots) - len(roots)
    negative = sum(1 for a in datum.positive_roots if dot(a, v) < 0)
    return OrbitSpec(
        datum=datum,
        xi=v,
        r_xi_pos=roots,
        w_xi_order=order,
        n=n,
        orientation=-1 if negative % 2 else 1,
    )


def coupling_form(spec: OrbitSpec) -> RatPoly:
    """The coupling class <xi, x> as a linear form."""
    return RatPoly.linear(spec.xi)


def root_form(root: Sequence[int]) -> RatPoly:
    return RatPoly.linear(root)


def _integral_xi(xi: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    den = lcm(*(c.denominator for c in xi))
    return tuple(int(c * den) for c in xi), den


def stabilizer_euler_factor(spec: OrbitSpec) -> RatPoly:
    d = spec.datum.ambient_dim
    g = RatPoly.constant(d, 1)
    for a in spec.r_xi_pos:
        g = g * root_form(a)
    return g


def is_zero_poly(p: RatPoly, datum: RootDatum) -> bool:
    """Zero test in H*(BT); type A is tested on the traceless hyperplane."""
    if datum.family == "A":
        return p.restrict_traceless().is_zero()
    return p.is_zero()


def _numerator_orbit(spec: OrbitSpec, xi_int, power: int) -> RatPoly:
    f = linear_power(xi_int, power) * stabilizer_euler_factor(spec)
    return antisymmetrize(spec.datum, f).scale(Fraction(1, spec.w_xi_order))


def _numerator_weyl_sum(spec: OrbitSpec, xi_int, power: int) -> RatPoly:
    # sum over W/W_xi of sign(w) <w xi, x>^N (w.g); equals antisym(...)/|W_xi|
    g = stabilizer_euler_factor(spec)
    acc = RatPoly.zero(spec.datum.ambient_dim)
    for w in coset_representatives(spec.datum, xi_int):
        term = linear_power(w.apply(xi_int), power) * weyl_apply(w, g)
        acc = acc + (term if w.sign > 0 else -term)
    return acc


def pushforward_power(spec: OrbitSpec, power: int, method: str = "orbit") -> RatPoly:
    """pi_!(Omega^power) as an exact polynomial of degree power - n."""
    datum = spec.datum
    xi_int, den = _integral_xi(spec.xi)
    if method == "orbit":
        num = _numerator_orbit(spec, xi_int, power)
    elif method == "weyl-sum":
        num = _numerator_weyl_sum(spec, xi_int, power)
    else:
        raise ValueError(f"unknown method {method!r}")
    if spec.w_xi_order > 1:
        # without the Euler factor the alternation must kill the W_xi-invariant power
        bare = antisymmetrize(datum, linear_power(xi_int, power))
        if not bare.is_zero():
            raise PushforwardError(
                "alternation of a stabilizer-invariant power is nonzero"
            )
    for a in datum.positive_roots:
        num = divide_exact_linear(num, root_form(a))
    if den != 1:
        num = num.scale(Fraction(1, den**power))
    return num


def mu_class(spec: OrbitSpec, k: int, method: str = "orbit") -> MuClass:
    if k < 1:
        raise ValueError("k must be >= 1")
    poly = pushforward_power(spec, spec.n + k, method=method)
    if not poly.is_homogeneous(k):
        raise PushforwardError(f"mu_{k} is not homogeneous of degree {k}")
    return MuClass(k=k, poly=poly, orbit=spec, is_zero=is_zero_poly(poly, spec.datum))


def mu_classes(spec: OrbitSpec, ks: Sequence[int]) -> dict[int, MuClass]:
    return {k: mu_class(spec, k) for k in dict.fromkeys(ks)}


def check_coupling_normalization(spec: OrbitSpec) -> RatPoly:
    """Assert pi_!(Omega^{n+1}) = 0 and return it (the zero polynomial)."""
    mu1 = pushforward_power(spec, spec.n + 1)
    if not mu1.is_zero():
        raise PushforwardError(f"pi_!(Omega^(n+1)) = {mu1} is not zero")
    return mu1


def is_weyl_invariant(p: RatPoly, datum: RootDatum) -> bool:
    return all(weyl_apply(w, p) == p for w in weyl_elements(datum))
