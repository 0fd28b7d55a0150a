import itertools
from fractions import Fraction

import pytest

_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    num, title = marker.args
    _CRITERIA[num] = ("PASS" if rep.passed else "FAIL", title, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        status, title, dur = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {title}  ({dur:.2f}s)")


def localization_value(datum, xi, k, x):
    """Symplectically oriented mu_k(x) by fixed-point localization.

    Sum over the fixed points p in W.xi of <p, x>^(n+k) divided by the
    product of the tangent weights at p, i.e. of <a, x> over all roots a
    with <a, p> > 0.  Independent of the alternation/division pipeline and
    of any choice of positive system.
    """
    from hamchar.rootdata import weyl_elements

    xi = tuple(Fraction(c) for c in xi)
    x = tuple(Fraction(c) for c in x)
    roots = list(datum.positive_roots) + [tuple(-c for c in a) for a in datum.positive_roots]
    n = sum(1 for a in datum.positive_roots if _dot(a, xi) != 0)
    total = Fraction(0)
    for p in {w.apply(xi) for w in weyl_elements(datum)}:
        den = Fraction(1)
        for a in roots:
            if _dot(a, p) > 0:
                den *= _dot(a, x)
        total += _dot(p, x) ** (n + k) / den
    return total


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def off_walls(datum, x):
    return all(_dot(a, x) != 0 for a in datum.positive_roots)


def brute_force_weyl(family, d):
    """All signed permutation matrices of the classical Weyl group, as (perm, signs, det)."""
    out = []
    for perm in itertools.permutations(range(d)):
        inversions = sum(1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j])
        parity = (-1) ** inversions
        for signs in itertools.product((1, -1), repeat=d):
            neg = signs.count(-1)
            if family == "A" and neg:
                continue
            if family == "D" and neg % 2:
                continue
            det = parity * (-1) ** neg
            out.append((perm, signs, det))
    return out
