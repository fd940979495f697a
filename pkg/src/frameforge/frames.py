"""Truncated frame systems in Hermite coordinates.

A system is stored through its coefficient matrix E with ``E[m-1, n-1] =
<e_m, g_n>`` against the reference orthonormal basis (g_n), so every
frame-theoretic operation becomes dense linear algebra:

* analysis of f (coefficients c):   ``conj(E) @ c``
* synthesis of a sequence a:        ``E.T @ a``
* frame operator on coordinates:    ``E.T @ conj(E)``
* canonical dual system:            rows of ``E @ (E^H E)^{-1}``

The reference basis is the Hermite basis throughout; a general Riesz
reference is obtained by composing coefficient matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .envelopes import (
    DecayEnvelope,
    DecayFit,
    TruncatedMatrix,
    fit_decay,
    fit_poly_decay,
    membership_constant,
    p_series,
)
from .weights import Weight, as_sequence, weighted_norm

__all__ = [
    "DualLocalizationReport",
    "ExampleInequalityReport",
    "FrameSystem",
    "InverseDecayReport",
    "JaffardReport",
    "OperatorNormReport",
    "PerturbationSpec",
    "analysis",
    "build_perturbed_basis",
    "canonical_dual",
    "cross_gram",
    "dual_localization_check",
    "frame_bounds",
    "frame_operator",
    "identity_frame",
    "jaffard_predict",
    "spectral_norm",
    "synthesis",
    "verify_example_inequalities",
    "verify_inverse_decay",
    "weighted_operator_norms",
]

RANK_TOL = 1e-10
_SVD_CUTOVER = 256
_POWER_TOL = 1e-10


class FrameSystem:
    """A truncated frame given by its coefficient matrix against the ONB.

    Row m holds the Hermite coefficients of the m-th frame element.
    Factorizations are computed lazily and cached; instances are treated
    as immutable after construction.
    """

    def __init__(self, coeffs, label: str = ""):
        if not isinstance(coeffs, TruncatedMatrix):
            coeffs = TruncatedMatrix(np.asarray(coeffs))
        self.coeffs = coeffs
        self.label = label

    @property
    def n(self) -> int:
        return self.coeffs.n

    @property
    def matrix(self) -> np.ndarray:
        return self.coeffs.entries

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"<FrameSystem{tag} n={self.n}>"


def identity_frame(n: int, margin: int = -1, label: str = "onb") -> FrameSystem:
    return FrameSystem(TruncatedMatrix(np.eye(n), margin=margin), label=label)


def cross_gram(e: FrameSystem, f: FrameSystem) -> TruncatedMatrix:
    """Matrix of inner products <e_m, f_n> in coefficient space."""
    if e.n != f.n:
        raise ValueError("systems have different truncation sizes")
    return TruncatedMatrix(e.matrix @ f.matrix.conj().T, margin=e.coeffs.margin)


def analysis(e: FrameSystem, f) -> np.ndarray:
    """Analysis coefficients (<f, e_m>)_m of f given by Hermite coefficients."""
    f = as_sequence(f)
    if f.size != e.n:
        raise ValueError("coefficient length does not match the system")
    return e.matrix.conj() @ f


def synthesis(e: FrameSystem, c) -> np.ndarray:
    """Hermite coefficients of sum_n c_n e_n."""
    c = as_sequence(c)
    if c.size != e.n:
        raise ValueError("coefficient length does not match the system")
    return e.matrix.T @ c


def frame_bounds(e: FrameSystem) -> tuple[float, float]:
    """Truncated frame bounds (sigma_min^2, sigma_max^2)."""
    s = e.singular_values
    return float(s[-1] ** 2), float(s[0] ** 2)


def frame_operator(e: FrameSystem) -> TruncatedMatrix:
    """Matrix of S f = sum_n <f, e_n> e_n on Hermite coordinates."""
    return TruncatedMatrix(e.matrix.T @ e.matrix.conj(), margin=e.coeffs.margin)


def canonical_dual(e: FrameSystem) -> FrameSystem:
    """The system with rows S^{-1} e_n; biorthogonal to E when E is a basis."""
    if e.singular_values[-1] <= RANK_TOL:
        raise np.linalg.LinAlgError("frame operator is rank-deficient at this truncation")
    gram = e.matrix.conj().T @ e.matrix  # transpose of the frame operator matrix
    dual = np.linalg.solve(gram, e.matrix.conj().T).conj().T
    return FrameSystem(
        TruncatedMatrix(dual, margin=e.coeffs.margin),
        label=f"dual({e.label})" if e.label else "dual",
    )


@dataclass(frozen=True)
class DualLocalizationReport:
    primal: DecayFit
    dual: DecayFit


def dual_localization_check(
    e: FrameSystem, beta: float | None = 1.0, poly: bool = False
) -> DualLocalizationReport:
    """Decay fits of the cross-Grams of E and of its canonical dual.

    With ``poly=True`` both sides are fitted against ``(1+d)^(-gamma)``,
    otherwise against ``exp(-gamma d^beta)``.  A strictly banded primal
    (too few populated anti-diagonals to regress) is reported with the
    +inf sentinel rate; banded systems decay faster than any envelope of
    either family.
    """
    dual = canonical_dual(e)

    def _fit(system: FrameSystem) -> DecayFit:
        try:
            if poly:
                return fit_poly_decay(system.coeffs)
            return fit_decay(system.coeffs, beta)
        except ValueError as err:
            if "anti-diagonals" in str(err):
                return DecayFit(gamma=math.inf, c=float(np.max(np.abs(system.matrix))), residual=0.0)
            raise

    return DualLocalizationReport(primal=_fit(e), dual=_fit(dual))


@dataclass(frozen=True)
class PerturbationSpec:
    """Banded perturbation of the reference basis: e_n = h_n + sum_i a_i[n] h_{n+i}.

    ``a`` has shape (r, M); row i holds the coefficients multiplying the
    shift by i.  Admissibility: every entry of row i beyond the first is
    at most eps_i in modulus, the first entries sum to at most 1 in
    modulus, and the eps_i sum to strictly less than 1 (this keeps the
    perturbed system a Riesz basis).
    """

    r: int
    a: np.ndarray
    eps: tuple[float, ...]

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a))
        if self.r < 1 or a.shape[0] != self.r:
            raise ValueError("a must have one row per shift, r >= 1")
        if not np.all(np.isfinite(a)):
            raise ValueError("perturbation entries must be finite")
        eps = tuple(float(x) for x in self.eps)
        if len(eps) != self.r or any(x < 0 for x in eps):
            raise ValueError("eps must hold r nonnegative reals")
        if sum(eps) >= 1.0:
            raise ValueError("eps sum >= 1")
        for i in range(self.r):
            if a.shape[1] > 1 and np.max(np.abs(a[i, 1:])) > eps[i]:
                raise ValueError("entry exceeds eps")
        if float(np.sum(np.abs(a[:, 0]))) > 1.0:
            raise ValueError("first-row sum > 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def constant(cls, values, eps=None, n: int = 1) -> "PerturbationSpec":
        """Spec with constant coefficient sequences of length n per shift."""
        values = np.atleast_1d(np.asarray(values))
        if eps is None:
            eps = np.abs(values)
        a = np.repeat(values[:, None], n, axis=1)
        return cls(r=values.size, a=a, eps=tuple(np.atleast_1d(eps)))

    def to_json(self) -> dict:
        rows = []
        for i in range(self.r):
            row = self.a[i]
            if np.iscomplexobj(row):
                rows.append([[float(v.real), float(v.imag)] for v in row])
            else:
                rows.append([float(v) for v in row])
        return {"r": self.r, "eps": list(self.eps), "a": rows}


def build_perturbed_basis(spec: PerturbationSpec, n: int) -> tuple[FrameSystem, int]:
    """Coefficient matrix Identity + sum_i shift(a_i, offset i), truncated.

    Shift terms that would land past index n are dropped; the count of
    dropped terms is returned alongside the system.
    """
    if n < 1:
        raise ValueError("truncation size must be positive")
    if spec.a.shape[1] < n:
        raise ValueError(f"perturbation sequences cover {spec.a.shape[1]} < {n} indices")
    dtype = complex if np.iscomplexobj(spec.a) else float
    mat = np.eye(n, dtype=dtype)
    dropped = 0
    for i in range(1, spec.r + 1):
        keep = max(n - i, 0)
        rows = np.arange(keep)
        mat[rows, rows + i] += spec.a[i - 1, :keep]
        dropped += min(i, n)
    return FrameSystem(TruncatedMatrix(mat), label="perturbed"), dropped


@dataclass(frozen=True)
class ExampleInequalityReport:
    """Extrema of the three perturbation inequalities over random trials.

    ``contraction_max`` is max ||Uf - f|| / (c (||Uf|| + ||f||)) with
    c = (3 + sum eps_i)/4, ``upper_max`` is max ||Uf|| / ||f||, and
    ``lower_min`` is min ||Uf|| / |<f, h_1>| over trials with nonzero
    first coefficient.  All three hold iff contraction_max <= 1,
    upper_max <= 3, lower_min >= 1.
    """

    contraction_max: float
    upper_max: float
    lower_min: float
    trials: int

    @property
    def all_hold(self) -> bool:
        return self.contraction_max <= 1.0 and self.upper_max <= 3.0 and self.lower_min >= 1.0


def verify_example_inequalities(
    spec: PerturbationSpec, n: int, trials: int, seed: int = 0
) -> ExampleInequalityReport:
    system, _ = build_perturbed_basis(spec, n)
    c_factor = (3.0 + sum(spec.eps)) / 4.0
    rng = np.random.default_rng(seed)
    contraction = 0.0
    upper = 0.0
    lower = math.inf
    for _ in range(trials):
        f = rng.standard_normal(n)
        f /= np.linalg.norm(f)
        uf = synthesis(system, f)
        norm_uf = np.linalg.norm(uf)
        diff = np.linalg.norm(uf - f)
        contraction = max(contraction, diff / (c_factor * (norm_uf + 1.0)))
        upper = max(upper, norm_uf)
        if abs(f[0]) > 0:
            lower = min(lower, norm_uf / abs(f[0]))
    return ExampleInequalityReport(
        contraction_max=contraction, upper_max=upper, lower_min=lower, trials=trials
    )


def spectral_norm(m: np.ndarray, tol: float = _POWER_TOL) -> float:
    """Largest singular value; full SVD below N=256, power iteration above.

    The power iteration runs on M^H M from a fixed seeded start vector,
    stops when successive estimates agree to ``tol`` and is capped at
    10*N steps, so results are deterministic.
    """
    m = np.asarray(m)
    n = min(m.shape)
    if n < _SVD_CUTOVER:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    b = m.conj().T @ m
    rng = np.random.default_rng(0xF0F0)
    v = rng.standard_normal(b.shape[0])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(10 * b.shape[0]):
        w = b @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        new_est = math.sqrt(norm_w)
        v = w / norm_w
        if abs(new_est - est) <= tol * max(1.0, new_est):
            return new_est
        est = new_est
    return est


@dataclass(frozen=True)
class JaffardReport:
    """Inverse-decay prediction for an invertible decay-class matrix.

    Given |A[m,n]| <= C_A e^{-gamma |m-n|^beta} and A invertible, the
    inverse stays in the class with some smaller rate.  Writing AA* =
    ||AA*|| (Id - R) with contraction R, summing the Neumann series in
    two regimes splits at K = 2 (1 + C_AA*/||AA*||) P_{gamma'-gamma'',beta}
    and yields the rate

        gamma1 = min( ln(1/r)/ln(K/r) * gamma'' (1-eps), eps * gamma'' )

    (limit value 1 of the log ratio as r -> 0) and the constant

        C_inv = C_A (1 + r/(1-r) * 1/(2P) + 1/(1-r)) * 2 P_{gamma-gamma1,beta}.
    """

    beta: float
    gamma: float
    gamma_prime: float
    gamma_dprime: float
    eps_free: float
    c_class: float
    norm_aas: float
    r_contraction: float
    c_aas: float
    c1: float
    p_split: float
    k_split: float
    gamma1_pred: float
    c_inv_pred: float

    def to_json(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def jaffard_predict(
    a: TruncatedMatrix,
    beta: float,
    gamma: float,
    gamma_prime: float | None = None,
    gamma_dprime: float | None = None,
    eps_free: float = 0.5,
) -> JaffardReport:
    """Run the inverse-decay pipeline and return the predicted envelope.

    Free parameters default to the midpoints gamma' = gamma/2 (the rate
    the product AA* retains), gamma'' = gamma'/2 and eps_free = 1/2; all
    are overridable.  Raises when AA* fails to normalize to a contraction
    (the matrix is singular at this truncation) or the declared rate
    makes the split degenerate.
    """
    if gamma <= 0 or not 0.0 < beta <= 1.0:
        raise ValueError("need gamma > 0 and beta in (0, 1]")
    if not 0.0 < eps_free < 1.0:
        raise ValueError("eps_free must lie in (0, 1)")
    gp = gamma / 2.0 if gamma_prime is None else float(gamma_prime)
    gpp = gp / 2.0 if gamma_dprime is None else float(gamma_dprime)
    if not 0.0 < gp < gamma:
        raise ValueError("gamma_prime must lie in (0, gamma)")
    if not 0.0 < gpp < gp:
        raise ValueError("gamma_dprime must lie in (0, gamma_prime)")

    if np.linalg.svd(a.entries, compute_uv=False)[-1] <= RANK_TOL:
        raise np.linalg.LinAlgError("matrix is singular at truncation")
    c_class = membership_constant(a, DecayEnvelope("jaffard", gamma=gamma, beta=beta))
    if not math.isfinite(c_class):
        raise ValueError("matrix does not satisfy the declared decay class on the window")
    aas = a.entries @ a.entries.conj().T
    norm_aas = spectral_norm(aas)
    r = spectral_norm(np.eye(a.n) - aas / norm_aas)
    if r >= 1.0:
        raise np.linalg.LinAlgError("matrix is singular at truncation")
    c_aas = membership_constant(
        TruncatedMatrix(aas, margin=a.margin), DecayEnvelope("jaffard", gamma=gp, beta=beta)
    )
    c1 = 1.0 + c_aas / norm_aas
    p_split = p_series(gp - gpp, beta)
    k_split = 2.0 * c1 * p_split
    if k_split <= r:
        raise ValueError("degenerate log ratio: K <= r")
    log_ratio = 1.0 if r == 0.0 else math.log(1.0 / r) / math.log(k_split / r)
    gamma1 = min(log_ratio * gpp * (1.0 - eps_free), eps_free * gpp)
    neumann = 1.0 + (r / (1.0 - r)) / (2.0 * p_split) + 1.0 / (1.0 - r)
    c_inv = c_class * neumann * 2.0 * p_series(gamma - gamma1, beta)
    return JaffardReport(
        beta=beta,
        gamma=gamma,
        gamma_prime=gp,
        gamma_dprime=gpp,
        eps_free=eps_free,
        c_class=c_class,
        norm_aas=norm_aas,
        r_contraction=r,
        c_aas=c_aas,
        c1=c1,
        p_split=p_split,
        k_split=k_split,
        gamma1_pred=gamma1,
        c_inv_pred=c_inv,
    )


@dataclass(frozen=True)
class InverseDecayReport:
    violations: int
    checked: int
    gamma_fit_inverse: float
    max_inverse_entry: float


def verify_inverse_decay(a: TruncatedMatrix, report: JaffardReport) -> InverseDecayReport:
    """Entrywise check of |A^{-1}| <= C_inv e^{-gamma1 |m-n|^beta} on the window.

    The inverse is computed by direct dense solve; also reports the
    fitted decay rate of the inverse, which should dominate the predicted
    rate.
    """
    inv = np.linalg.inv(a.entries)
    inv_mat = TruncatedMatrix(inv, margin=a.margin)
    w = inv_mat.window
    sub = np.abs(inv[w, w])
    idx = inv_mat.window_indices()
    mm, nn = np.meshgrid(idx, idx, indexing="ij")
    bound = report.c_inv_pred * np.exp(-report.gamma1_pred * np.abs(mm - nn) ** report.beta)
    violations = int(np.sum(sub > bound))
    fit = fit_decay(inv_mat, report.beta)
    return InverseDecayReport(
        violations=violations,
        checked=int(sub.size),
        gamma_fit_inverse=fit.gamma,
        max_inverse_entry=float(np.max(sub)),
    )


@dataclass(frozen=True)
class OperatorNormReport:
    analysis_max: float
    synthesis_max: float
    frame_op_max: float
    frame_op_min: float
    trials: int


def weighted_operator_norms(
    e: FrameSystem,
    w: Weight,
    p: float,
    trials: int = 200,
    seed: int = 0,
    loc_beta: float = 1.0,
) -> OperatorNormReport:
    """Empirical weighted-norm ratios of analysis, synthesis and frame operator.

    Norms are taken on coefficient sequences (the Hermite-coordinate
    proxy for the weighted function spaces).  The system must be
    localized at order ``loc_beta``; sub-exponential weights must have
    strictly smaller order than the localization, which is the hypothesis
    under which these operators act boundedly.  The minimum frame-operator
    ratio doubles as an invertibility proxy.
    """
    if w.kind != "moderate" and w.effective_beta >= loc_beta:
        raise ValueError("incompatible weight: weight order must be below the localization order")
    try:
        fit = fit_decay(e.coeffs, loc_beta)
        localized = fit.gamma > 0
    except ValueError as err:
        if "anti-diagonals" not in str(err):
            raise
        localized = True  # banded cross-Gram decays faster than any rate
    if not localized:
        raise ValueError("system is not localized; weighted bounds do not apply")
    if trials < 1:
        raise ValueError("need at least one trial")
    s_matrix = frame_operator(e).entries
    rng = np.random.default_rng(seed)
    u_max = t_max = s_max = 0.0
    s_min = math.inf
    for _ in range(trials):
        f = rng.standard_normal(e.n)
        den = weighted_norm(f, w, p)
        if den == 0.0:
            continue
        u_max = max(u_max, weighted_norm(analysis(e, f), w, p) / den)
        t_max = max(t_max, weighted_norm(synthesis(e, f), w, p) / den)
        s_ratio = weighted_norm(s_matrix @ f, w, p) / den
        s_max = max(s_max, s_ratio)
        s_min = min(s_min, s_ratio)
    return OperatorNormReport(
        analysis_max=u_max,
        synthesis_max=t_max,
        frame_op_max=s_max,
        frame_op_min=s_min,
        trials=trials,
    )
