"""Operator bounds from row/column data: Schur test and continuity constants.

The Schur test turns absolute row and column sums into an l^p operator
norm bound; the continuity constants turn column-decay/row-growth
envelopes into explicit sup-norm operator bounds between grading levels.
"""

import numpy as np

from frameforge import (
    DecayEnvelope,
    TruncatedMatrix,
    envelope_value,
    p_series,
    poly_continuity_bound,
    schur_bound,
    subexp_continuity_bound,
    sup_graded_norm,
)

rng = np.random.default_rng(0)

# Schur bound always dominates the spectral norm (p = 2).
m = rng.standard_normal((64, 64))
print(f"random 64x64:  schur = {schur_bound(TruncatedMatrix(m), 2):.4f}"
      f"  spectral = {np.linalg.norm(m, 2):.4f}")

# For an exponential kernel the bound is controlled by the series constant
# 2 * P_{gamma,1} with P the sum of e^{-gamma j} over j >= 0.
gamma, n = 1.0, 256
idx = np.arange(1, n + 1, dtype=float)
kernel = TruncatedMatrix(np.exp(-gamma * np.abs(idx[:, None] - idx[None, :])))
print(f"e^(-|m-n|) kernel: schur = {schur_bound(kernel, 2):.6f}"
      f"  2*P = {2 * p_series(gamma, 1.0):.6f}")

# Column decay with row growth still gives a bounded operator between
# sup-graded levels; the constant is a pair of explicit series.
gamma0, gamma1, eps = 0.0, 2.0, 0.5
k_poly = poly_continuity_bound(gamma0, gamma1, eps, 1.0, 1.0)
print(f"\npolynomial continuity constant K = {k_poly:.6f}")

env = DecayEnvelope("colrow_poly", gamma0=gamma0, gamma1=gamma1)
mm, nn = np.meshgrid(idx, idx, indexing="ij")
dominated = envelope_value(env, mm, nn) * rng.uniform(-1, 1, (n, n))
domain_edge = idx ** -(gamma0 + gamma1 + 1 + eps)  # unit-ball profile of the domain
worst = 0.0
for t in range(200):
    c = domain_edge if t == 0 else rng.standard_normal(n)
    lhs = sup_graded_norm(dominated @ c, "poly", gamma1)
    rhs = sup_graded_norm(c, "poly", gamma0 + gamma1 + 1 + eps)
    worst = max(worst, lhs / rhs)
print(f"worst observed ratio over 200 trial vectors: {worst:.6f}  (must be <= K)")
# the envelope matrix itself acting on the positive profile comes closest:
exact = envelope_value(env, mm, nn)
tight = sup_graded_norm(exact @ domain_edge, "poly", gamma1) / sup_graded_norm(
    domain_edge, "poly", gamma0 + gamma1 + 1 + eps
)
print(f"exact envelope on the positive unit-ball profile: {tight:.6f}")

k_sub = subexp_continuity_bound(0.5, 0.0, 1.0, 0.5, 1.0, 1.0)
print(f"\nsub-exponential continuity constant (beta=1/2): K = {k_sub:.6f}")
