"""Monte Carlo integration over Haar measure on SU(m) and SO(m).

Used as an independent numerical oracle for the symbolic engine: the
normalized Haar average of <X, Ad_g xi>^k is proportional, with a known
k-dependence, to mu_k(X).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, sqrt
from typing import Sequence

import numpy as np

from .muclasses import OrbitSpec, mu_class
from .rootdata import RootDatum

SHARD_SIZE = 10_000
THREADS_ENV = "HAMCHAR_THREADS"
IMAG_TOL = 1e-10


class NumericIntegrityError(ArithmeticError):
    pass


class DegenerateTestPointsError(ValueError):
    pass


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class MatrixModel:
    """Matrix realization of the compact group attached to a root datum.

    ``pairing_scale`` is the factor between ``-tr(X Y)`` on embedded torus
    elements and the coordinate dot product (1 for SU, 2 for SO).
    """

    group: str
    m: int
    pairing_scale: int

    @property
    def is_unitary(self) -> bool:
        return self.group == "SU"

    def embed_torus(self, x: Sequence) -> np.ndarray:
        x = [float(Fraction(c)) for c in x]
        if self.group == "SU":
            return np.diag(1j * np.asarray(x, dtype=float))
        out = np.zeros((self.m, self.m))
        for i, c in enumerate(x):
            out[2 * i + 1, 2 * i] = c
            out[2 * i, 2 * i + 1] = -c
        return out


def matrix_model(datum: RootDatum) -> MatrixModel:
    if datum.family == "A":
        return MatrixModel("SU", datum.rank + 1, 1)
    if datum.family == "B":
        return MatrixModel("SO", 2 * datum.rank + 1, 2)
    if datum.family == "D":
        return MatrixModel("SO", 2 * datum.rank, 2)
    raise ValueError(f"no matrix model for family {datum.family} (only SU and SO)")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int

    @classmethod
    def from_samples(cls, values: np.ndarray, seed: int) -> "McEstimate":
        n = len(values)
        return cls(
            mean=float(values.mean()),
            stderr=float(values.std(ddof=1) / sqrt(n)),
            n_samples=n,
            seed=seed,
        )


def shard_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator keyed by (seed, *stream)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def sample_haar_batch(model: MatrixModel, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` Haar-distributed elements of SU(m) or SO(m), shape (size, m, m)."""
    m = model.m
    if model.is_unitary:
        z = (rng.standard_normal((size, m, m)) + 1j * rng.standard_normal((size, m, m))) / sqrt(2)
    else:
        z = rng.standard_normal((size, m, m))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    q = q * (diag / np.abs(diag))[:, None, :]
    det = np.linalg.det(q)
    if model.is_unitary:
        # any m-th root of det^{-1}; the branch depends only on det so Haar is preserved
        q = q * (np.exp(-1j * np.angle(det) / m))[:, None, None]
    else:
        q[:, :, 0] *= np.sign(det)[:, None]
    return q


def sample_haar(model: MatrixModel, rng: np.random.Generator) -> np.ndarray:
    return sample_haar_batch(model, rng, 1)[0]


def pairing(xm: np.ndarray, ym: np.ndarray):
    """``-tr(X Y)``, batched over leading axes of ``ym``."""
    val = -np.einsum("...ij,...ji->...", np.broadcast_to(xm, ym.shape), ym)
    if np.iscomplexobj(val):
        resid = np.max(np.abs(val.imag), initial=0.0)
        if resid > IMAG_TOL * max(1.0, float(np.max(np.abs(val.real), initial=0.0))):
            raise NumericIntegrityError(f"imaginary residue {resid:.3g} in pairing")
        val = val.real
    if np.ndim(val) == 0:
        return float(val)
    return val


def _shard_values(model, xm, xim, k, seed, stream, shard, size):
    rng = shard_rng(seed, *stream, shard)
    g = sample_haar_batch(model, rng, size)
    ad = g @ xim @ np.conj(np.swapaxes(g, 1, 2))
    return pairing(xm, ad) ** k


def pairing_samples(
    spec: OrbitSpec,
    x: Sequence,
    k: int,
    n_samples: int,
    seed: int,
    stream: Sequence[int] = (),
    threads: int | None = None,
) -> np.ndarray:
    """Per-sample values of <X, Ad_g xi>^k, concatenated in shard order."""
    model = matrix_model(spec.datum)
    xm = model.embed_torus(x)
    xim = model.embed_torus(spec.xi)
    sizes = [SHARD_SIZE] * (n_samples // SHARD_SIZE)
    if n_samples % SHARD_SIZE:
        sizes.append(n_samples % SHARD_SIZE)
    args = [(model, xm, xim, k, seed, tuple(stream), i, s) for i, s in enumerate(sizes)]
    threads = threads or default_threads()
    if threads > 1 and len(args) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda a: _shard_values(*a), args))
    else:
        parts = [_shard_values(*a) for a in args]
    return np.concatenate(parts)


def estimate_I_k(
    spec: OrbitSpec,
    x: Sequence,
    k: int,
    n_samples: int,
    seed: int,
    stream: Sequence[int] = (),
    threads: int | None = None,
) -> McEstimate:
    """Estimate the normalized Haar integral of <X, Ad_g xi>^k with <A,B> = -tr(AB)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000")
    vals = pairing_samples(spec, x, k, n_samples, seed, stream, threads)
    return McEstimate.from_samples(vals, seed)


@dataclass
class RatioPoint:
    k: int
    x: tuple[Fraction, ...]
    mu_value: Fraction
    estimate: McEstimate
    integral: float  # estimate rescaled to the coordinate pairing
    integral_stderr: float
    skipped: bool
    rho: float | None = None
    rho_stderr: float | None = None


@dataclass
class RatioPair:
    k: int
    j: int
    observed: float
    stderr: float
    predicted: float
    passed: bool


@dataclass
class CrosscheckReport:
    group: str
    xi: tuple[Fraction, ...]
    n: int
    n_samples: int
    seed: int
    points: list[RatioPoint] = field(default_factory=list)
    per_k: dict = field(default_factory=dict)
    pairs: list[RatioPair] = field(default_factory=list)
    sign: int = 1
    sign_determined: bool = False
    status: str = "pass"

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "both sides vanish")


def _weighted_mean(values, sigmas):
    w = np.asarray(sigmas, dtype=float) ** -2
    v = np.asarray(values, dtype=float)
    mean = float((w * v).sum() / w.sum())
    return mean, float(w.sum() ** -0.5)


def crosscheck_ratio(
    spec: OrbitSpec,
    k_list: Sequence[int],
    x_list: Sequence[Sequence],
    n_samples: int,
    seed: int,
    threads: int | None = None,
    nsigma: float = 3.0,
) -> CrosscheckReport:
    """Compare mu_k(X) with Monte Carlo Haar integrals over several k and X.

    For each k the ratio rho_k = mu_k(X) / I_k(X) must be independent of X,
    and for k, j the ratio rho_k / rho_j must equal
    s^(k-j) * C(n+k, k) / C(n+j, j) for one sign s fitted over all pairs.
    """
    model = matrix_model(spec.datum)
    ks = list(dict.fromkeys(k_list))
    report = CrosscheckReport(
        group=f"{model.group}({model.m})",
        xi=spec.xi,
        n=spec.n,
        n_samples=n_samples,
        seed=seed,
    )
    ok = True
    vanish_all = True
    rho_by_k = {}
    for k in ks:
        mu = mu_class(spec, k)
        vals, sigs = [], []
        k_vanish = mu.is_zero
        for xi_idx, x in enumerate(x_list):
            x = tuple(Fraction(c) for c in x)
            est = estimate_I_k(spec, x, k, n_samples, seed, (k, xi_idx), threads)
            scale = model.pairing_scale**k
            integ, integ_se = est.mean / scale, est.stderr / scale
            muv = mu.poly.eval(x)
            skipped = abs(integ) <= 5 * integ_se
            pt = RatioPoint(k, x, muv, est, integ, integ_se, skipped)
            if mu.is_zero:
                # both sides must vanish
                if abs(integ) > nsigma * integ_se:
                    ok = False
            elif not skipped:
                pt.rho = float(muv) / integ
                pt.rho_stderr = abs(pt.rho) * integ_se / abs(integ)
                vals.append(pt.rho)
                sigs.append(pt.rho_stderr)
            report.points.append(pt)
        if mu.is_zero:
            report.per_k[k] = {"status": "both sides vanish" if ok else "fail"}
            continue
        vanish_all = False
        if not vals:
            raise DegenerateTestPointsError(f"degenerate test point set for k={k}")
        mean, sigma = _weighted_mean(vals, sigs)
        constant = all(abs(v - mean) <= nsigma * sqrt(s**2 + sigma**2) for v, s in zip(vals, sigs))
        ok = ok and constant
        rho_by_k[k] = (mean, sigma)
        report.per_k[k] = {"rho": mean, "rho_stderr": sigma, "constant": constant}

    pair_keys = [(k, j) for i, k in enumerate(rho_by_k) for j in list(rho_by_k)[i + 1:]]
    report.sign_determined = any((k - j) % 2 for k, j in pair_keys)

    def evaluate(s: int):
        pairs, chi2 = [], 0.0
        for k, j in pair_keys:
            (rk, sk), (rj, sj) = rho_by_k[k], rho_by_k[j]
            obs = rk / rj
            se = abs(obs) * sqrt((sk / rk) ** 2 + (sj / rj) ** 2)
            pred = s ** (k - j) * comb(spec.n + k, k) / comb(spec.n + j, j)
            chi2 += ((obs - pred) / se) ** 2
            pairs.append(RatioPair(k, j, obs, se, pred, abs(obs - pred) <= nsigma * se))
        return chi2, pairs

    fits = {s: evaluate(s) for s in (1, -1)}
    best = min((1, -1), key=lambda s: fits[s][0])
    report.sign = best if report.sign_determined else 1
    report.pairs = fits[report.sign][1]
    ok = ok and all(p.passed for p in report.pairs)
    if not ok:
        report.status = "fail"
    elif vanish_all:
        report.status = "both sides vanish"
    else:
        report.status = "pass"
    return report
