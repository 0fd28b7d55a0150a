"""Hamiltonian characteristic classes mu_k of coadjoint orbits of classical compact groups."""

from .analysis import (
    basic_invariants,
    decompose_in_generators,
    fail_locus_check,
    genericity_scan,
    independence_certificate,
    is_zero,
)
from .muclasses import MuClass, OrbitSpec, coupling_form, make_orbit, mu_class
from .polyring import RatPoly, antisymmetrize, divide_exact_linear, weyl_apply
from .rootdata import (
    RootDatum,
    WeylElement,
    build_root_datum,
    kset,
    stabilizer_subsystem,
    weyl_elements,
)

__version__ = "0.1.0"
