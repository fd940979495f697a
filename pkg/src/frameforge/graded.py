"""Graded-norm diagnostics: the finite-data proxies for nested smooth spaces.

The two norm families are

* ``poly``:   ||f||_k = l2 norm of (c_n * n^k)
* ``subexp``: ||f||_k = l2 norm of (c_n * e^{k n^beta})

indexed by a grading level k >= 0.  Membership of an object in the full
projective limit cannot be certified from finite data; the honest proxy
used throughout is stability of these norms across levels and under
doubling the truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_fn
from scipy.special import gammaincc, logsumexp

from .frames import FrameSystem, analysis, canonical_dual
from .hermite import HermiteContext, TestFunction, classify_coefficient_decay, project
from .weights import as_sequence

__all__ = [
    "DistributionCoefficients",
    "GradedNormProfile",
    "PairingResult",
    "PropertyPgReport",
    "expansion_error_curve",
    "fframe_bounds_estimate",
    "graded_level_norm",
    "graded_profile",
    "pair_distribution",
    "property_pg_check",
    "standard_sample_set",
]

_FAMILIES = ("poly", "subexp")


def _check_family(family: str, beta: float):
    if family not in _FAMILIES:
        raise ValueError(f"unknown norm family {family!r}")
    if family == "subexp" and not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")


def graded_level_norm(c, family: str, k: float, beta: float = 1.0) -> float:
    """l2 norm of the level-k weighted sequence, computed in log space."""
    _check_family(family, beta)
    if k < 0:
        raise ValueError("grading level must be nonnegative")
    c = as_sequence(c)
    if c.size == 0:
        return 0.0
    n = np.arange(1, c.size + 1, dtype=float)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c).astype(float))
    logs = logs + (k * np.log(n) if family == "poly" else k * n ** beta)
    logs = logs[logs > -math.inf]
    if logs.size == 0:
        return 0.0
    with np.errstate(over="ignore"):  # a true norm past 1e308 reports inf
        return float(np.exp(0.5 * logsumexp(2.0 * logs)))


@dataclass(frozen=True)
class GradedNormProfile:
    """Norms of one object across grading levels; nondecreasing in the level."""

    family: str
    beta: float
    levels: tuple[float, ...]
    norms: tuple[float, ...]

    def __post_init__(self):
        if len(self.levels) != len(self.norms):
            raise ValueError("levels and norms must align")
        for lo, hi in zip(self.norms, self.norms[1:]):
            if lo > hi * (1.0 + 1e-13):
                raise ValueError("profile norms must be nondecreasing in the level")

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "beta": self.beta,
            "levels": list(self.levels),
            "norms": [float(x) for x in self.norms],
        }


def graded_profile(c, family: str, levels=None, beta: float = 1.0) -> GradedNormProfile:
    """Profile of level norms of c at the given levels (default 0..10)."""
    if levels is None:
        levels = tuple(range(11))
    levels = tuple(float(k) for k in levels)
    if any(k < 0 for k in levels) or list(levels) != sorted(levels):
        raise ValueError("levels must be nonnegative and sorted")
    norms = tuple(graded_level_norm(c, family, k, beta) for k in levels)
    return GradedNormProfile(family=family, beta=beta, levels=levels, norms=norms)


def fframe_bounds_estimate(
    e: FrameSystem, samples, family: str, k: float, beta: float = 1.0
) -> tuple[float, float]:
    """Empirical two-sided bounds at one grading level.

    Returns (min, max) over the samples of the ratio between the level-k
    norm of the analysis coefficients and the level-k norm of the sample
    itself.  Both ends positive and finite is the finite-truncation
    evidence for a graded frame inequality at this level.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    lo, hi = math.inf, 0.0
    for f in samples:
        den = graded_level_norm(f, family, k, beta)
        if den == 0.0 or not math.isfinite(den):
            raise ValueError("sample with zero or non-finite level norm")
        ratio = graded_level_norm(analysis(e, f), family, k, beta) / den
        lo, hi = min(lo, ratio), max(hi, ratio)
    return lo, hi


def standard_sample_set(ctx: HermiteContext, n: int, count: int = 20, seed: int = 0):
    """Deterministic structured samples plus seeded random decaying vectors.

    The structured part is h_1..h_8 and the projections of the two
    reference Gaussians; the random part draws coefficients with e^{-n}
    decay and random signs.
    """
    samples = []
    for j in range(min(8, n)):
        delta = np.zeros(n)
        delta[j] = 1.0
        samples.append(delta)
    samples.append(project(ctx, TestFunction.gaussian(1.0), n))
    samples.append(project(ctx, TestFunction.gaussian(3.0), n))
    rng = np.random.default_rng(seed)
    decay = np.exp(-np.arange(1, n + 1, dtype=float))
    for _ in range(count):
        u = rng.uniform(0.5, 1.0, size=n) * rng.choice([-1.0, 1.0], size=n)
        samples.append(u * decay)
    return samples


def expansion_error_curve(
    f,
    e: FrameSystem,
    family: str,
    k: float,
    checkpoints,
    beta: float = 1.0,
) -> np.ndarray:
    """Level-k norm of f minus its M-term dual-frame expansion, per checkpoint.

    The expansion is sum_{n<=M} <f, e_n> d_n with d the canonical dual, so
    an f whose analysis against a banded system is finitely supported is
    captured exactly once M passes that support; at M = N the expansion
    reproduces every f up to solver roundoff (finite-rank exactness).
    """
    f = as_sequence(f)
    checkpoints = [int(m) for m in checkpoints]
    if any(m < 1 or m > e.n for m in checkpoints) or checkpoints != sorted(checkpoints):
        raise ValueError("checkpoints must be sorted within 1..N")
    dual = canonical_dual(e)
    a = analysis(e, f)
    errors = []
    for m in checkpoints:
        approx = dual.matrix[:m, :].T @ a[:m]
        errors.append(graded_level_norm(f - approx, family, k, beta))
    return np.asarray(errors)


@dataclass(frozen=True)
class DistributionCoefficients:
    """Coefficients of a distribution-like functional with declared growth.

    The declared bound is |b_n| <= c * n^q (poly family) or
    |b_n| <= c * e^{q n^beta} (subexp family); it is validated against
    the stored entries when the coefficients are used in a pairing.
    """

    b: np.ndarray
    q: float
    c: float

    def __post_init__(self):
        object.__setattr__(self, "b", as_sequence(self.b))
        if self.q < 0:
            raise ValueError("growth order q must be nonnegative")
        if self.c <= 0:
            raise ValueError("growth constant c must be positive")

    def validate_growth(self, family: str, beta: float = 1.0):
        _check_family(family, beta)
        n = np.arange(1, self.b.size + 1, dtype=float)
        bound = self.c * (n ** self.q if family == "poly" else np.exp(self.q * n ** beta))
        if np.any(np.abs(self.b) > bound * (1.0 + 1e-12)):
            raise ValueError("stored entries violate the declared growth bound")


@dataclass(frozen=True)
class PairingResult:
    value: complex
    tail_bound: float


def _poly_tail_integral(s: float, n: int) -> float:
    # sum_{m > n} m^-s <= integral_n^inf x^-s dx, s > 1
    return n ** (1.0 - s) / (s - 1.0)


def _subexp_tail_integral(rate: float, beta: float, n: int) -> float:
    s = 1.0 / beta
    return float(_gamma_fn(s) / (beta * rate ** s) * gammaincc(s, rate * n ** beta))


def pair_distribution(
    b: DistributionCoefficients, f, family: str, beta: float = 1.0
) -> PairingResult:
    """Finite pairing sum_n f_n b_n with an extrapolated tail estimate.

    The truncated coefficients of f are classified first; the pairing is
    accepted only if the classified decay beats the declared growth of b
    by a summable margin, and the tail bound extrapolates both behaviours
    past the truncation.
    """
    _check_family(family, beta)
    b.validate_growth(family, beta)
    f = as_sequence(f)
    if f.size != b.b.size:
        raise ValueError("pairing requires matching lengths")
    n_trunc = f.size
    report = classify_coefficient_decay(f)
    idx = np.arange(1, n_trunc + 1, dtype=float)
    if family == "poly":
        k_f = report.poly_order
        if k_f <= b.q + 1.0:
            raise ValueError("non-summable pairing declared: decay does not dominate growth")
        majorant = float(np.max(np.abs(f) * idx ** float(k_f)))
        tail = b.c * majorant * _poly_tail_integral(k_f - b.q, n_trunc)
    else:
        fit = next((s for s in report.subexp if s.beta == beta), None)
        if fit is None:
            raise ValueError(f"classification grid does not include beta={beta}")
        if math.isinf(fit.gamma):
            tail = 0.0
        else:
            if fit.gamma <= b.q:
                raise ValueError("non-summable pairing declared: decay does not dominate growth")
            majorant = float(np.max(np.abs(f) * np.exp(fit.gamma * idx ** beta)))
            tail = b.c * majorant * _subexp_tail_integral(fit.gamma - b.q, beta, n_trunc)
    value = complex(np.sum(f * b.b))
    return PairingResult(value=value, tail_bound=float(tail))


@dataclass(frozen=True)
class PropertyPgReport:
    matched: int
    total: int
    details: tuple

    @property
    def all_matched(self) -> bool:
        return self.matched == self.total


def property_pg_check(
    e: FrameSystem,
    family: str,
    trials: int = 20,
    seed: int = 0,
    beta: float = 1.0,
) -> PropertyPgReport:
    """Coefficient-decay transfer check between a function and its analysis.

    Draws random coefficient vectors with a prescribed decay class,
    classifies the vector and its analysis coefficients, and counts how
    often the classes agree: polynomial order within +-1, or
    sub-exponential rate within 10%.
    """
    _check_family(family, beta)
    rng = np.random.default_rng(seed)
    idx = np.arange(1, e.n + 1, dtype=float)
    matched = 0
    details = []
    for _ in range(trials):
        u = rng.uniform(0.5, 1.0, size=e.n) * rng.choice([-1.0, 1.0], size=e.n)
        if family == "poly":
            order = int(rng.integers(1, 5))
            f = u * idx ** (-(order + 1.0))
            rep_f = classify_coefficient_decay(f).poly_order
            rep_a = classify_coefficient_decay(analysis(e, f)).poly_order
            ok = abs(rep_f - rep_a) <= 1
            details.append((order, rep_f, rep_a, ok))
        else:
            rate = float(rng.uniform(0.5, 2.0))
            f = u * np.exp(-rate * idx ** beta)
            fit_f = classify_coefficient_decay(f, (beta,)).subexp[0]
            fit_a = classify_coefficient_decay(analysis(e, f), (beta,)).subexp[0]
            ok = (
                math.isfinite(fit_f.gamma)
                and math.isfinite(fit_a.gamma)
                and abs(fit_a.gamma - fit_f.gamma) <= 0.1 * fit_f.gamma
            )
            details.append((rate, fit_f.gamma, fit_a.gamma, ok))
        matched += ok
    return PropertyPgReport(matched=matched, total=trials, details=tuple(details))
