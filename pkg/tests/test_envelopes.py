import math

import numpy as np
import pytest

from frameforge.envelopes import (
    DecayEnvelope,
    TruncatedMatrix,
    apply_matrix,
    check_implication_chain,
    convolution_constant,
    envelope_value,
    fit_decay,
    membership_constant,
    p_series,
    poly_continuity_bound,
    poly_series,
    product_envelope,
    schur_bound,
    subexp_continuity_bound,
    verify_fixed_level_continuity,
)

# frozen oracle values (mpmath, 30 digits)
P_1_HALF = 2.67040681796633972
ZETA_1P5 = 2.612375348685488


def jaffard_matrix(n, gamma, beta=1.0, margin=-1):
    idx = np.arange(1, n + 1, dtype=float)
    d = np.abs(idx[:, None] - idx[None, :])
    return TruncatedMatrix(np.exp(-gamma * d ** beta), margin=margin)


def minmax_matrix(n, gamma, margin=-1):
    idx = np.arange(1, n + 1, dtype=float)
    lo = np.minimum(idx[:, None], idx[None, :])
    hi = np.maximum(idx[:, None], idx[None, :])
    return TruncatedMatrix((lo / hi) ** gamma, margin=margin)


def test_truncated_matrix_validation():
    with pytest.raises(ValueError):
        TruncatedMatrix(np.ones((3, 4)))
    with pytest.raises(ValueError):
        TruncatedMatrix(np.full((4, 4), np.inf))
    with pytest.raises(ValueError):
        TruncatedMatrix(np.eye(8), margin=4)
    a = TruncatedMatrix(np.eye(16))
    assert a.margin == 2
    assert list(a.window_indices()) == list(range(3, 15))


def test_apply_matrix_identity_and_ones():
    c = np.arange(1.0, 9.0)
    a = TruncatedMatrix(np.eye(8))
    np.testing.assert_array_equal(apply_matrix(a, c), c)
    b = TruncatedMatrix(np.ones((2, 2)), margin=0)
    np.testing.assert_array_equal(apply_matrix(b, np.ones(2)), [2.0, 2.0])
    with pytest.raises(ValueError):
        apply_matrix(a, np.ones(5))


def test_apply_matrix_column_extraction():
    a = jaffard_matrix(4, 1.0, margin=0)
    c = np.zeros(4)
    c[1] = 1.0
    np.testing.assert_allclose(apply_matrix(a, c), a.entries[:, 1], rtol=0, atol=0)


def test_envelope_value_examples():
    assert envelope_value(DecayEnvelope("jaffard", gamma=2, beta=1), 5, 5) == 1.0
    assert envelope_value(DecayEnvelope("poly_dstar", gamma=3), 1, 3) == pytest.approx(1 / 27)
    env = DecayEnvelope("colrow_subexp", beta=0.5, gamma0=0.0, gamma1=1.0)
    assert envelope_value(env, 9, 4) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_envelope_value_branches_and_symmetry():
    env = DecayEnvelope("poly_star", gamma=2)
    # symmetric in (m, n), diagonal takes the decaying branch
    assert envelope_value(env, 3, 7) == envelope_value(env, 7, 3)
    assert envelope_value(env, 4, 4) == pytest.approx(5.0 ** -2)
    split = DecayEnvelope("subexp_split", beta=1.0, gamma1=2.0, eps=0.5)
    # n = m sits on the decay branch: e^{2m - 2.5m} = e^{-m/2}
    assert envelope_value(split, 4, 4) == pytest.approx(math.exp(-2.0), rel=1e-14)


def test_envelope_validation():
    with pytest.raises(ValueError):
        DecayEnvelope("nope")
    with pytest.raises(ValueError):
        DecayEnvelope("jaffard", gamma=-1)
    with pytest.raises(ValueError):
        DecayEnvelope("colrow_subexp", beta=2.0)


def test_membership_identity_under_jaffard():
    a = TruncatedMatrix(np.eye(64))
    for gamma, beta in [(0.5, 1.0), (2.0, 0.5)]:
        env = DecayEnvelope("jaffard", gamma=gamma, beta=beta)
        assert membership_constant(a, env) == 1.0


def test_membership_exact_envelope_is_one():
    a = jaffard_matrix(64, 0.7)
    env = DecayEnvelope("jaffard", gamma=0.7, beta=1.0)
    assert membership_constant(a, env) == pytest.approx(1.0, rel=1e-12)


def test_membership_underflowed_envelope_no_nan():
    # at long distances a steep envelope underflows to 0.0; zero entries
    # there need no constant, nonzero ones honestly report inf
    env = DecayEnvelope("jaffard", gamma=2.0, beta=1.0)
    assert membership_constant(TruncatedMatrix(np.eye(1024)), env) == 1.0
    m = np.eye(1024)
    m[0, 1023] = 0.5
    assert membership_constant(TruncatedMatrix(m, margin=0), env) == math.inf


def test_envelope_excess_declared_constants():
    from frameforge.envelopes import envelope_excess

    a = jaffard_matrix(64, 0.7)
    within = DecayEnvelope("jaffard", gamma=0.7, beta=1.0, c=2.0)
    assert envelope_excess(a, within) == pytest.approx(0.5, rel=1e-12)
    too_tight = DecayEnvelope("jaffard", gamma=0.9, beta=1.0, c=1.0)
    assert envelope_excess(a, too_tight) > 1.0


def test_membership_counterexample_growth():
    # (min/max)^2 satisfies the ratio condition with constant 1 but its
    # distance-form constant blows up with N; brute-force maximization oracle
    big = minmax_matrix(128, 2.0)
    small = big.leading(64)
    env = DecayEnvelope("poly_dstar", gamma=2.0)

    def brute(mat):
        worst = 0.0
        w = mat.window_indices()
        for m in w:
            for n in w:
                worst = max(worst, mat.entries[m - 1, n - 1] * (1 + abs(m - n)) ** 2.0)
        return worst

    c64, c128 = membership_constant(small, env), membership_constant(big, env)
    assert c64 == pytest.approx(brute(small), rel=1e-12)
    assert c128 == pytest.approx(brute(big), rel=1e-12)
    assert c128 >= 1.5 * c64
    env3 = DecayEnvelope("poly_tstar", gamma=2.0)
    assert membership_constant(big, env3) == 1.0
    assert membership_constant(small, env3) == 1.0


def test_implication_pointwise_domination():
    # (**) <= (***) pointwise forces C_tstar <= C_dstar for every matrix
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = TruncatedMatrix(np.abs(rng.standard_normal((48, 48))))
        gamma = float(rng.uniform(0.5, 3.0))
        cd = membership_constant(a, DecayEnvelope("poly_dstar", gamma=gamma))
        ct = membership_constant(a, DecayEnvelope("poly_tstar", gamma=gamma))
        assert ct <= cd * (1 + 1e-12)
        # and (*) <= (**) pointwise likewise orders the constants
        cs = membership_constant(a, DecayEnvelope("poly_star", gamma=gamma))
        assert cd <= cs * (1 + 1e-12)


def test_fit_decay_recovers_exponential():
    a = jaffard_matrix(96, 0.7)
    fit = fit_decay(a, 1.0)
    assert fit.gamma == pytest.approx(0.7, abs=1e-6)
    assert fit.c == pytest.approx(1.0, abs=1e-6)
    assert fit.residual < 1e-8


def test_fit_decay_recovers_subexponential():
    idx = np.arange(1, 97, dtype=float)
    d = np.abs(idx[:, None] - idx[None, :])
    a = TruncatedMatrix(np.exp(-1.0 * d ** 0.5))
    fit = fit_decay(a, 0.5)
    assert fit.gamma == pytest.approx(1.0, abs=1e-6)
    assert fit.c == pytest.approx(1.0, abs=1e-6)


def test_fit_decay_identity_sentinel():
    fit = fit_decay(TruncatedMatrix(np.eye(64)), 1.0)
    assert math.isinf(fit.gamma)
    assert fit.c == 1.0


def test_fit_decay_banded_raises():
    a = TruncatedMatrix(np.eye(64) + 0.5 * np.eye(64, k=1))
    with pytest.raises(ValueError, match="anti-diagonals"):
        fit_decay(a, 1.0)


def test_fit_decay_random_class_member_rate_not_overstated():
    # dominated by the exact envelope -> fitted gamma at least the true rate
    rng = np.random.default_rng(19)
    idx = np.arange(1, 97, dtype=float)
    d = np.abs(idx[:, None] - idx[None, :])
    a = TruncatedMatrix(np.exp(-0.9 * d) * rng.uniform(0.2, 1.0, (96, 96)))
    fit = fit_decay(a, 1.0)
    assert fit.gamma >= 0.9 - 1e-9


def test_check_implication_chain_on_star_member():
    idx = np.arange(1, 65, dtype=float)
    lo = np.minimum(idx[:, None], idx[None, :])
    hi = np.maximum(idx[:, None], idx[None, :])
    star = TruncatedMatrix((1 + lo) ** 2.0 / (1 + hi) ** 4.0)
    rep = check_implication_chain(star, 2.0)
    assert rep.star == pytest.approx(1.0, rel=1e-12)
    assert not rep.star_diverges and not rep.dstar_diverges and not rep.tstar_diverges
    assert rep.dstar <= 1.0 + 1e-12 and rep.tstar <= 1.0 + 1e-12


def test_check_implication_chain_counterexample():
    rep = check_implication_chain(minmax_matrix(128, 2.0), 2.0)
    assert rep.tstar == 1.0 and not rep.tstar_diverges
    assert rep.dstar_diverges


def test_check_implication_chain_identity():
    # (**) and (***) hold with constant exactly 1; the sharper (*) bound decays
    # on the diagonal, so the identity's (*) constant grows with the window
    rep = check_implication_chain(TruncatedMatrix(np.eye(64)), 2.0)
    assert rep.dstar == 1.0 and rep.tstar == 1.0
    assert not rep.dstar_diverges and not rep.tstar_diverges
    assert rep.star > 1.0 and rep.star_diverges


def test_schur_bound_identity():
    assert schur_bound(TruncatedMatrix(np.eye(16)), 2) == 1.0


def test_schur_bound_p_extremes():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((16, 16))
    a = TruncatedMatrix(m)
    ab = np.abs(m)
    assert schur_bound(a, 1) == pytest.approx(ab.sum(axis=0).max())
    assert schur_bound(a, math.inf) == pytest.approx(ab.sum(axis=1).max())
    with pytest.raises(ValueError):
        schur_bound(a, 0.3)


def test_schur_bound_dominates_spectral_norm():
    rng = np.random.default_rng(42)
    for _ in range(100):
        m = rng.standard_normal((16, 16))
        bound = schur_bound(TruncatedMatrix(m), 2)
        sigma = np.linalg.svd(m, compute_uv=False)[0]  # oracle
        assert bound >= sigma - 1e-10


def test_schur_bound_exponential_kernel_vs_series():
    gamma = 0.8
    a = jaffard_matrix(256, gamma)
    bound = schur_bound(a, 2)
    assert bound <= 2 * p_series(gamma, 1.0) + 1e-8


def test_p_series_geometric_cases():
    assert p_series(1.0, 1.0) == pytest.approx(1 / (1 - math.exp(-1)), abs=1e-12)
    assert p_series(math.log(2.0), 1.0) == pytest.approx(2.0, abs=1e-12)


def test_p_series_subexponential_frozen_value():
    assert p_series(1.0, 0.5, tol=1e-12) == pytest.approx(P_1_HALF, abs=1e-11)


def test_p_series_closed_form_property():
    for gamma in (0.25, 0.7, 1.3, 3.0):
        assert p_series(gamma, 1.0) == pytest.approx(1 / (1 - math.exp(-gamma)), rel=1e-12)


def test_poly_series_matches_zeta():
    assert poly_series(1.5) == pytest.approx(ZETA_1P5, abs=1e-12)
    # brute-force partial-sum oracle brackets the full sum
    partial = sum(n ** -3.0 for n in range(1, 20000))
    assert partial < poly_series(3.0) < partial + 2 * 20000 ** -2.0


def test_convolution_constant_center_lower_bound():
    # at m = n the sum dominates the two-sided geometric sum 1 + 2/(e^2 - 1)
    c = convolution_constant(1.0, 1.0, 64)
    assert c >= 1 + 2 / (math.exp(2) - 1) - 1e-12


def test_convolution_constant_stability():
    c1 = convolution_constant(0.8, 1.0, 64)
    c2 = convolution_constant(0.8, 1.0, 128)
    assert abs(c2 - c1) < 0.05 * c1


def test_convolution_constant_covers_extreme_pair():
    # brute-force oracle over all pairs including (1, N)
    n, gamma = 24, 1.0
    idx = np.arange(1, n + 1, dtype=float)
    worst = 0.0
    for m in idx:
        for nn in idx:
            s = np.sum(np.exp(-gamma * np.abs(m - idx)) * np.exp(-gamma * np.abs(idx - nn)))
            worst = max(worst, s * math.exp(0.5 * gamma * abs(m - nn)))
    assert convolution_constant(gamma, 1.0, n) == pytest.approx(worst, rel=1e-12)


def test_product_envelope_identity_case():
    c_ab, rate = product_envelope(1.0, 2.0, 1.0, 1.0, 1.0)
    assert rate == 1.0
    prod = TruncatedMatrix(np.eye(32))
    assert membership_constant(prod, DecayEnvelope("jaffard", gamma=rate, beta=1.0)) <= c_ab


def test_product_envelope_frozen_constant():
    c_ab, rate = product_envelope(3.0, 2.0, 5.0, 1.0, 1.0)
    assert rate == 1.0
    assert c_ab == pytest.approx(30.0 / (1 - math.exp(-1)), rel=1e-12)  # 47.459...


def test_product_envelope_numeric_product_respects_prediction():
    n = 256
    a = jaffard_matrix(n, 2.0)
    b = jaffard_matrix(n, 1.0)
    c_ab, rate = product_envelope(1.0, 2.0, 1.0, 1.0, 1.0)
    prod = TruncatedMatrix(a.entries @ b.entries, margin=n // 8)
    emp = membership_constant(prod, DecayEnvelope("jaffard", gamma=rate, beta=1.0))
    assert emp <= c_ab


def test_product_envelope_equal_rates():
    with pytest.raises(ValueError):
        product_envelope(1.0, 2.0, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        product_envelope(1.0, 2.0, 1.0, 2.0, 1.0, gamma_target=2.5)
    c_ab, rate = product_envelope(1.0, 2.0, 1.0, 2.0, 1.0, gamma_target=1.0)
    assert rate == 1.0 and c_ab == pytest.approx(2 / (1 - math.exp(-1)), rel=1e-12)


def test_poly_continuity_bound_zeta_case():
    # strictly lower-triangular envelope: K reduces to a single zeta value
    assert poly_continuity_bound(0.0, 1.0, 0.5, 0.0, 1.0) == pytest.approx(ZETA_1P5, abs=1e-12)
    assert poly_continuity_bound(0.0, 1.0, 0.5, 0.0, 0.0) == 0.0


def test_poly_continuity_bound_holds_on_random_matrices():
    from frameforge.weights import sup_graded_norm

    rng = np.random.default_rng(31)
    n = 128
    gamma0, gamma1, eps = 0.0, 2.0, 0.5
    env = DecayEnvelope("colrow_poly", gamma0=gamma0, gamma1=gamma1)
    k = poly_continuity_bound(gamma0, gamma1, eps, 1.0, 1.0)
    idx = np.arange(1, n + 1, dtype=float)
    mm, nn = np.meshgrid(idx, idx, indexing="ij")
    bound = envelope_value(env, mm, nn)
    for _ in range(20):
        a = bound * rng.uniform(-1, 1, (n, n))
        c = rng.standard_normal(n)
        lhs = sup_graded_norm(a @ c, "poly", gamma1)
        rhs = k * sup_graded_norm(c, "poly", gamma0 + gamma1 + 1 + eps)
        assert lhs <= rhs * (1 + 1e-12)


def test_subexp_continuity_bound_formula_value():
    got = subexp_continuity_bound(1.0, 0.0, 1.0, 0.5, 1.0, 1.0)
    assert got == pytest.approx(2.0 / (math.exp(0.5) - 1.0), rel=1e-11)  # 3.082988...
    assert subexp_continuity_bound(1.0, 0.0, 1.0, 0.5, 0.0, 0.0) == 0.0


def test_subexp_continuity_bound_holds_on_random_matrices():
    from frameforge.weights import sup_graded_norm

    rng = np.random.default_rng(37)
    n = 128
    beta, gamma0, gamma1, eps = 0.5, 0.0, 1.0, 0.5
    env = DecayEnvelope("colrow_subexp", beta=beta, gamma0=gamma0, gamma1=gamma1)
    k = subexp_continuity_bound(beta, gamma0, gamma1, eps, 1.0, 1.0)
    idx = np.arange(1, n + 1, dtype=float)
    mm, nn = np.meshgrid(idx, idx, indexing="ij")
    bound = envelope_value(env, mm, nn)
    for _ in range(20):
        a = bound * rng.uniform(-1, 1, (n, n))
        c = rng.standard_normal(n)
        lhs = sup_graded_norm(a @ c, "subexp", gamma1, beta)
        rhs = k * sup_graded_norm(c, "subexp", gamma1 + gamma0 + eps, beta)
        assert lhs <= rhs * (1 + 1e-12)


def test_verify_fixed_level_continuity_zero_and_exact():
    zero = TruncatedMatrix(np.zeros((64, 64)))
    env = DecayEnvelope("eq_newdecay", gamma1=2.0, eps=0.5)
    assert verify_fixed_level_continuity(zero, env, trials=5) == 0.0

    idx = np.arange(1, 65, dtype=float)
    mm, nn = np.meshgrid(idx, idx, indexing="ij")
    exact = TruncatedMatrix(envelope_value(env, mm, nn))
    ratio = verify_fixed_level_continuity(exact, env, trials=50, seed=1)
    assert 0 < ratio < math.inf


def test_verify_fixed_level_continuity_stability_under_doubling():
    env = DecayEnvelope("eq_newdecay", gamma1=2.0, eps=0.5)

    def exact(n):
        idx = np.arange(1, n + 1, dtype=float)
        mm, nn = np.meshgrid(idx, idx, indexing="ij")
        return TruncatedMatrix(envelope_value(env, mm, nn))

    r1 = verify_fixed_level_continuity(exact(64), env, trials=50, seed=2)
    r2 = verify_fixed_level_continuity(exact(128), env, trials=50, seed=2)
    assert r1 < r2 * 1.05 + 1e-12


def test_verify_fixed_level_continuity_rejects_violator():
    env = DecayEnvelope("grdecay", gamma1=1.0, eps=0.5)
    bad = TruncatedMatrix(np.ones((64, 64)))
    with pytest.raises(ValueError, match="envelope violated"):
        verify_fixed_level_continuity(bad, env, trials=2)
