"""Off-diagonal decay envelopes and the bounds they induce.

A ``DecayEnvelope`` is a parametrized family of pointwise bounds
``|A[m, n]| <= envelope(m, n)`` on the entries of an infinite matrix,
evaluated here on N x N truncations.  Truncation destroys row and column
tails near the edge, so every envelope check runs on an interior window
``[margin+1, N-margin]`` (logical 1-based indices) and stability under
doubling N is the proxy for statements about the infinite matrix.

Envelope kinds and their bound at (m, n), all with m, n >= 1:

=============  ==========================================================
poly_star      c * (1+m)^g / (1+n)^(2g) for n >= m, symmetric otherwise
poly_dstar     c * (1 + |m-n|)^(-g)
poly_tstar     c * (min(m,n) / max(m,n))^g
colrow_poly    c0 * n^g0 for n > m;  c1 * n^g1 * m^(-g1) for n <= m
eq_newdecay    c0 * n^(-1-eps) for n > m;  c1 * n^g1 * m^(-g1-1-eps) else
grdecay        c * (1 + |m-n|)^(-g1-1-eps)
colrow_subexp  c0 * e^(g0 n^b) for n > m;  c1 * e^(-g1 (m^b - n^b)) else
subexp_split   c0 * e^(-eps n^b) for n > m;  c1 * e^(g1 n^b - (g1+eps) m^b)
jaffard        c * e^(-g |m-n|^b)
=============  ==========================================================

The diagonal n = m always belongs to the decaying branch.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_fn
from scipy.special import gammaincc, zeta

from .weights import as_sequence, sup_graded_norm

__all__ = [
    "DecayEnvelope",
    "DecayFit",
    "ImplicationChainReport",
    "TruncatedMatrix",
    "apply_matrix",
    "check_implication_chain",
    "convolution_constant",
    "envelope_value",
    "fit_decay",
    "fit_poly_decay",
    "membership_constant",
    "p_series",
    "poly_continuity_bound",
    "poly_series",
    "product_envelope",
    "schur_bound",
    "subexp_continuity_bound",
    "verify_fixed_level_continuity",
]

UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True)
class TruncatedMatrix:
    """Dense N x N truncation of an infinite matrix, 1-based logical indices.

    ``margin`` fixes the interior verification window
    ``[margin+1, N-margin]`` in each index; it defaults to ``N // 8``.
    """

    entries: np.ndarray
    margin: int = -1

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if a.size and not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        object.__setattr__(self, "entries", a)
        m = self.margin if self.margin >= 0 else a.shape[0] // 8
        if not 0 <= m < max(a.shape[0], 1) / 2:
            raise ValueError("margin must satisfy 0 <= margin < N/2")
        object.__setattr__(self, "margin", int(m))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def window(self) -> slice:
        """0-based slice of the interior window."""
        return slice(self.margin, self.n - self.margin)

    def window_indices(self) -> np.ndarray:
        """Logical (1-based) indices covered by the interior window."""
        return np.arange(self.margin + 1, self.n - self.margin + 1)

    def leading(self, k: int, margin: int | None = None) -> "TruncatedMatrix":
        """Leading k x k corner, margin rescaled proportionally by default."""
        if not 1 <= k <= self.n:
            raise ValueError("leading block size out of range")
        m = (self.margin * k) // self.n if margin is None else margin
        return TruncatedMatrix(self.entries[:k, :k], margin=m)


_ENVELOPE_KINDS = (
    "poly_star",
    "poly_dstar",
    "poly_tstar",
    "colrow_poly",
    "colrow_subexp",
    "grdecay",
    "eq_newdecay",
    "subexp_split",
    "jaffard",
)


@dataclass(frozen=True)
class DecayEnvelope:
    kind: str
    gamma: float = 1.0
    beta: float = 1.0
    gamma0: float = 0.0
    gamma1: float = 1.0
    eps: float = 0.5
    c: float = 1.0
    c0: float = 1.0
    c1: float = 1.0

    def __post_init__(self):
        if self.kind not in _ENVELOPE_KINDS:
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if self.kind in ("poly_star", "poly_dstar", "poly_tstar", "jaffard"):
            if self.gamma <= 0:
                raise ValueError("gamma must be positive")
        if self.kind in ("jaffard", "colrow_subexp", "subexp_split"):
            if not 0.0 < self.beta <= 1.0:
                raise ValueError("beta must lie in (0, 1]")
        if self.kind in ("colrow_poly", "colrow_subexp", "eq_newdecay", "subexp_split", "grdecay"):
            if self.gamma0 < 0:
                raise ValueError("gamma0 must be nonnegative")
            if self.gamma1 <= 0:
                raise ValueError("gamma1 must be positive")
        if self.kind in ("eq_newdecay", "grdecay", "subexp_split") and self.eps <= 0:
            raise ValueError("eps must be positive")
        for name in ("c", "c0", "c1"):
            if getattr(self, name) < 0:
                raise ValueError(f"constant {name} must be nonnegative")

    def unit(self) -> "DecayEnvelope":
        """Copy with all constants set to 1 (shape of the bound only)."""
        return dataclasses.replace(self, c=1.0, c0=1.0, c1=1.0)


def envelope_value(env: DecayEnvelope, m, n):
    """Bound the envelope assigns at logical indices (m, n); broadcasts."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    if np.any(m < 1) or np.any(n < 1):
        raise ValueError("indices are 1-based")
    k = env.kind
    if k == "poly_star":
        lo, hi = np.minimum(m, n), np.maximum(m, n)
        out = env.c * (1.0 + lo) ** env.gamma / (1.0 + hi) ** (2.0 * env.gamma)
    elif k == "poly_dstar":
        out = env.c * (1.0 + np.abs(m - n)) ** (-env.gamma)
    elif k == "poly_tstar":
        lo, hi = np.minimum(m, n), np.maximum(m, n)
        out = env.c * (lo / hi) ** env.gamma
    elif k == "colrow_poly":
        out = np.where(
            n > m,
            env.c0 * n ** env.gamma0,
            env.c1 * n ** env.gamma1 * m ** (-env.gamma1),
        )
    elif k == "eq_newdecay":
        out = np.where(
            n > m,
            env.c0 * n ** (-1.0 - env.eps),
            env.c1 * n ** env.gamma1 * m ** (-env.gamma1 - 1.0 - env.eps),
        )
    elif k == "grdecay":
        out = env.c * (1.0 + np.abs(m - n)) ** (-env.gamma1 - 1.0 - env.eps)
    elif k == "colrow_subexp":
        out = np.where(
            n > m,
            env.c0 * np.exp(env.gamma0 * n ** env.beta),
            env.c1 * np.exp(-env.gamma1 * (m ** env.beta - n ** env.beta)),
        )
    elif k == "subexp_split":
        out = np.where(
            n > m,
            env.c0 * np.exp(-env.eps * n ** env.beta),
            env.c1 * np.exp(env.gamma1 * n ** env.beta - (env.gamma1 + env.eps) * m ** env.beta),
        )
    else:  # jaffard
        out = env.c * np.exp(-env.gamma * np.abs(m - n) ** env.beta)
    if out.ndim == 0:
        return float(out)
    return out


def _window_grid(a: TruncatedMatrix):
    idx = a.window_indices()
    return np.meshgrid(idx, idx, indexing="ij")


def apply_matrix(a: TruncatedMatrix, c):
    """Finite matrix-vector product (A c)_m = sum_n A[m,n] c_n."""
    c = as_sequence(c)
    if c.size != a.n:
        raise ValueError(f"dimension mismatch: matrix is {a.n}, vector is {c.size}")
    return a.entries @ c


def _max_ratio(sub: np.ndarray, vals) -> float:
    # zero entries need no constant even where the envelope underflows;
    # a nonzero entry over an underflowed envelope honestly reports inf
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sub == 0.0, 0.0, sub / vals)
    return float(np.max(ratio))


def membership_constant(a: TruncatedMatrix, env: DecayEnvelope) -> float:
    """Smallest constant making |A| <= C * envelope hold on the window.

    The envelope's own constants are ignored (set to 1), so the return
    value is directly comparable across matrices.
    """
    w = a.window
    sub = np.abs(a.entries[w, w])
    if sub.size == 0:
        raise ValueError("interior window is empty")
    mm, nn = _window_grid(a)
    vals = envelope_value(env.unit(), mm, nn)
    return _max_ratio(sub, vals)


def envelope_excess(a: TruncatedMatrix, env: DecayEnvelope) -> float:
    """max |A| / envelope on the window, with declared constants in place.

    <= 1 means the matrix satisfies the declared envelope there.
    """
    w = a.window
    sub = np.abs(a.entries[w, w])
    if sub.size == 0:
        raise ValueError("interior window is empty")
    mm, nn = _window_grid(a)
    vals = envelope_value(env, mm, nn)
    return _max_ratio(sub, vals)


@dataclass(frozen=True)
class DecayFit:
    gamma: float
    c: float
    residual: float

    @property
    def degenerate(self) -> bool:
        return math.isinf(self.gamma)


def _antidiagonal_maxima(a: TruncatedMatrix, margin: int | None):
    m = a.margin if margin is None else int(margin)
    if not 0 <= m < a.n / 2:
        raise ValueError("margin must satisfy 0 <= margin < N/2")
    sub = np.abs(a.entries[m : a.n - m, m : a.n - m])
    k = sub.shape[0]
    dmax = k - 1
    ds, maxima = [], []
    for d in range(1, dmax + 1):
        mx = max(np.max(np.diag(sub, d)), np.max(np.diag(sub, -d)))
        if mx >= UNDERFLOW_FLOOR:
            ds.append(d)
            maxima.append(mx)
    diag_max = float(np.max(np.diag(sub))) if k else 0.0
    return np.asarray(ds, dtype=float), np.asarray(maxima, dtype=float), diag_max


def _log_linear_fit(x: np.ndarray, y: np.ndarray) -> DecayFit:
    design = np.column_stack([x, np.ones_like(x)])
    sol, *_ = np.linalg.lstsq(design, y, rcond=None)
    slope, intercept = sol
    resid = float(np.max(np.abs(design @ sol - y)))
    return DecayFit(gamma=max(0.0, -float(slope)), c=float(np.exp(intercept)), residual=resid)


def fit_decay(a: TruncatedMatrix, beta: float, margin: int | None = None) -> DecayFit:
    """Fit |A[m,n]| ~ C exp(-gamma |m-n|^beta) on the interior window.

    Regresses log of the per-anti-diagonal maxima against distance^beta
    for distances d = 1 .. N - 2*margin - 1, skipping anti-diagonals whose
    maximum is below 1e-300.  A matrix with no off-diagonal mass at all is
    reported with the +inf sentinel rate (it decays faster than any
    envelope of this form); one with fewer than 3 populated anti-diagonals
    carries too little data to fit and raises instead.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if a.n < 16:
        raise ValueError("need N >= 16 to fit a decay profile")
    ds, maxima, diag_max = _antidiagonal_maxima(a, margin)
    if ds.size == 0:
        return DecayFit(gamma=math.inf, c=diag_max, residual=0.0)
    if ds.size < 3:
        raise ValueError("fewer than 3 usable anti-diagonals")
    return _log_linear_fit(ds ** beta, np.log(maxima))


def fit_poly_decay(a: TruncatedMatrix, margin: int | None = None) -> DecayFit:
    """Fit |A[m,n]| ~ C (1 + |m-n|)^(-gamma); same protocol as fit_decay."""
    if a.n < 16:
        raise ValueError("need N >= 16 to fit a decay profile")
    ds, maxima, diag_max = _antidiagonal_maxima(a, margin)
    if ds.size == 0:
        return DecayFit(gamma=math.inf, c=diag_max, residual=0.0)
    if ds.size < 3:
        raise ValueError("fewer than 3 usable anti-diagonals")
    return _log_linear_fit(np.log1p(ds), np.log(maxima))


@dataclass(frozen=True)
class ImplicationChainReport:
    """Membership constants under the three nested polynomial conditions.

    ``*_diverges`` flags a constant that grew by factor >= 1.5 when
    re-evaluated on the full matrix versus its leading half, the finite
    signature of a condition the infinite matrix does not satisfy.
    """

    star: float
    dstar: float
    tstar: float
    star_diverges: bool
    dstar_diverges: bool
    tstar_diverges: bool


def check_implication_chain(a: TruncatedMatrix, gamma: float) -> ImplicationChainReport:
    if a.n < 32:
        raise ValueError("need N >= 32 for the doubling comparison")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    envs = {
        "star": DecayEnvelope("poly_star", gamma=gamma),
        "dstar": DecayEnvelope("poly_dstar", gamma=gamma),
        "tstar": DecayEnvelope("poly_tstar", gamma=gamma),
    }
    half = a.leading(a.n // 2)
    consts, flags = {}, {}
    for name, env in envs.items():
        c_half = membership_constant(half, env)
        c_full = membership_constant(a, env)
        consts[name] = c_full
        flags[name] = c_full >= 1.5 * c_half if c_half > 0 else c_full > 0
    return ImplicationChainReport(
        star=consts["star"],
        dstar=consts["dstar"],
        tstar=consts["tstar"],
        star_diverges=flags["star"],
        dstar_diverges=flags["dstar"],
        tstar_diverges=flags["tstar"],
    )


def schur_bound(a: TruncatedMatrix, p: float) -> float:
    """Schur-test bound K1^(1/p') K2^(1/p) on the l^p operator norm.

    K1 is the largest absolute row sum, K2 the largest absolute column
    sum, and p' the conjugate exponent.
    """
    if not (p == math.inf or p >= 1):
        raise ValueError("p must be in [1, inf]")
    ab = np.abs(a.entries)
    k1 = float(np.max(ab.sum(axis=1)))
    k2 = float(np.max(ab.sum(axis=0)))
    inv_p = 0.0 if p == math.inf else 1.0 / p
    return k1 ** (1.0 - inv_p) * k2 ** inv_p


def _subexp_tail_integral(gamma: float, beta: float, j: float) -> float:
    # sum_{k > j} e^{-gamma k^beta} <= integral_j^inf e^{-gamma x^beta} dx
    s = 1.0 / beta
    return float(_gamma_fn(s) / (beta * gamma ** s) * gammaincc(s, gamma * j ** beta))


def p_series(gamma: float, beta: float, tol: float = 1e-12) -> float:
    """Sum of e^{-gamma j^beta} over j >= 0, truncated under an integral tail bound.

    The returned value is within ``tol`` of the infinite sum: summation
    stops once the integral comparison bound on the remaining tail drops
    below ``tol``.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    total = 1.0  # j = 0 term
    carry = 0.0
    j = 1
    chunk = 4096
    cap = 50_000_000
    while True:
        upper = min(j + chunk, cap + 1)
        block = np.arange(j, upper, dtype=float)
        v = float(np.sum(np.exp(-gamma * block ** beta))) - carry
        t = total + v
        carry = (t - total) - v
        total = t
        j = upper
        if _subexp_tail_integral(gamma, beta, j - 1) < tol:
            return total
        if j > cap:
            raise RuntimeError("series did not reach tolerance within the term cap")


def poly_series(s: float) -> float:
    """Sum of n^(-s) over n >= 1 (requires s > 1)."""
    if s <= 1:
        raise ValueError("polynomial series needs exponent > 1")
    return float(zeta(s, 1))


def convolution_constant(gamma: float, beta: float, n: int) -> float:
    """Empirical constant of the kernel self-convolution bound.

    Returns ``max_{m,n <= N} [sum_k e^{-g|m-k|^b} e^{-g|k-n|^b}] * e^{(g/2)|m-n|^b}``,
    the finite-N constant for absorbing a convolution of two kernels of
    rate gamma into a single kernel of rate gamma/2.  Stability under
    doubling N is the caller's check.
    """
    if n < 16:
        raise ValueError("need N >= 16")
    if gamma <= 0 or not 0.0 < beta <= 1.0:
        raise ValueError("need gamma > 0 and beta in (0, 1]")
    idx = np.arange(1, n + 1, dtype=float)
    dist = np.abs(idx[:, None] - idx[None, :]) ** beta
    e = np.exp(-gamma * dist)
    conv = e @ e
    return float(np.max(conv * np.exp(0.5 * gamma * dist)))


def product_envelope(
    c_a: float,
    gamma_a: float,
    c_b: float,
    gamma_b: float,
    beta: float,
    gamma_target: float | None = None,
):
    """Predicted class constant for a product of two decay-class members.

    For distinct rates the product keeps the smaller rate with constant
    ``c_a * c_b * 2 * p_series(|gamma_a - gamma_b|, beta)``.  For equal
    rates the caller must supply a strictly smaller ``gamma_target``; the
    same formula applies with gap ``gamma_a - gamma_target``.
    Returns ``(predicted constant, product rate)``.
    """
    if gamma_a <= 0 or gamma_b <= 0:
        raise ValueError("rates must be positive")
    if gamma_a != gamma_b:
        rate = min(gamma_a, gamma_b)
        gap = abs(gamma_a - gamma_b)
    else:
        if gamma_target is None:
            raise ValueError("equal rates: supply gamma_target < the common rate")
        if gamma_target >= gamma_a:
            raise ValueError("gamma_target must be strictly below min(gamma_a, gamma_b)")
        rate = gamma_target
        gap = gamma_a - gamma_target
    return c_a * c_b * 2.0 * p_series(gap, beta), rate


def poly_continuity_bound(gamma0: float, gamma1: float, eps: float, c0: float, c1: float) -> float:
    """Operator constant K for the column-decay/row-growth polynomial condition.

    Any matrix dominated entrywise by the ``colrow_poly`` envelope with
    these parameters maps c with finite sup-norm at level
    ``gamma0 + gamma1 + 1 + eps`` to output with sup-norm at level
    ``gamma1`` at most K times larger.  K is the exact two-series constant
    from splitting the sum at the diagonal:
    ``K = c1 * sum n^-(gamma0+1+eps) + c0 * sum n^-(1+eps)``.
    """
    if gamma0 < 0 or gamma1 <= 0 or not 0 < eps < 1:
        raise ValueError("need gamma0 >= 0, gamma1 > 0, eps in (0, 1)")
    if c0 < 0 or c1 < 0:
        raise ValueError("constants must be nonnegative")
    total = 0.0
    if c1 > 0:
        total += c1 * poly_series(gamma0 + 1.0 + eps)
    if c0 > 0:
        total += c0 * poly_series(1.0 + eps)
    return total


def subexp_continuity_bound(
    beta: float, gamma0: float, gamma1: float, eps: float, c0: float, c1: float
) -> float:
    """Sub-exponential analogue of :func:`poly_continuity_bound`.

    ``K = c1 * sum_{n>=1} e^{-(gamma0+eps) n^beta} + c0 * sum_{n>=1} e^{-eps n^beta}``,
    bounding the sup-norm at level gamma1 of the output by K times the
    input's sup-norm at level ``gamma1 + gamma0 + eps``.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if gamma0 < 0 or gamma1 <= 0 or not 0 < eps < 1:
        raise ValueError("need gamma0 >= 0, gamma1 > 0, eps in (0, 1)")
    if c0 < 0 or c1 < 0:
        raise ValueError("constants must be nonnegative")
    total = 0.0
    if c1 > 0:
        total += c1 * (p_series(gamma0 + eps, beta) - 1.0)
    if c0 > 0:
        total += c0 * (p_series(eps, beta) - 1.0)
    return total


def verify_fixed_level_continuity(
    a: TruncatedMatrix,
    env: DecayEnvelope,
    trials: int = 100,
    seed: int = 0,
) -> float:
    """Empirical operator norm of A at the envelope's own grading level.

    For the self-mapping envelope kinds (``eq_newdecay``, ``grdecay``,
    ``subexp_split``) boundedness is claimed without an explicit constant,
    so this measures ``max ||A c|| / ||c||`` in the level-gamma1 sup norm
    over random trial vectors.  Requires A to actually satisfy the
    declared envelope on the interior window.
    """
    if env.kind not in ("eq_newdecay", "grdecay", "subexp_split"):
        raise ValueError("envelope kind has no fixed-level continuity claim")
    if trials < 1:
        raise ValueError("need at least one trial")
    if envelope_excess(a, env) > 1.0 + 1e-9:
        raise ValueError("envelope violated on the interior window")
    if env.kind == "subexp_split":
        family, beta = "subexp", env.beta
    else:
        family, beta = "poly", 1.0
    idx = np.arange(1, a.n + 1, dtype=float)
    base = idx ** -env.gamma1 if family == "poly" else np.exp(-env.gamma1 * idx ** beta)
    rng = np.random.default_rng(seed)
    worst = 0.0
    # trial 0 is the deterministic unit-ball profile; the rest perturb it
    for t in range(trials):
        if t == 0:
            c = base
        else:
            c = base * rng.uniform(0.5, 1.0, a.n) * rng.choice([-1.0, 1.0], a.n)
        den = sup_graded_norm(c, family, env.gamma1, beta)
        if den == 0.0:
            continue
        num = sup_graded_norm(a.entries @ c, family, env.gamma1, beta)
        worst = max(worst, num / den)
    return worst
