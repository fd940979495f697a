"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.
"""

import math
import time

import numpy as np

from frameforge.envelopes import (
    DecayEnvelope,
    TruncatedMatrix,
    convolution_constant,
    envelope_value,
    membership_constant,
    p_series,
    poly_continuity_bound,
    schur_bound,
    subexp_continuity_bound,
)
from frameforge.frames import (
    PerturbationSpec,
    analysis,
    build_perturbed_basis,
    canonical_dual,
    dual_localization_check,
    frame_bounds,
    identity_frame,
    jaffard_predict,
    verify_example_inequalities,
    verify_inverse_decay,
)
from frameforge.graded import expansion_error_curve, fframe_bounds_estimate, standard_sample_set
from frameforge.hermite import HermiteContext, TestFunction, project
from frameforge.weights import sup_graded_norm


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False


def report(number, name, timer=None):
    extra = f" ({timer.elapsed:.2f}s)" if timer is not None else ""
    print(f"ACCEPTANCE {number} [{name}]: PASS{extra}")


def test_criterion_01_onb_sanity():
    with Timer() as t:
        n = 64
        onb = identity_frame(n)
        a, b = frame_bounds(onb)
        assert abs(a - 1.0) <= 1e-12 and abs(b - 1.0) <= 1e-12
        dual = canonical_dual(onb)
        assert np.max(np.abs(dual.matrix - np.eye(n))) <= 1e-12
        ctx = HermiteContext(nmax=n)
        samples = standard_sample_set(ctx, n, count=10, seed=0)
        for k in range(11):
            lo, hi = fframe_bounds_estimate(onb, samples, "poly", k)
            assert abs(lo - 1.0) <= 1e-10 and abs(hi - 1.0) <= 1e-10
    assert t.elapsed < 1.0
    report(1, "ONB sanity", t)


def test_criterion_02_example_inequalities():
    with Timer() as t:
        n = 256
        spec = PerturbationSpec.constant([0.5], n=n)
        rep = verify_example_inequalities(spec, n, trials=1000, seed=20240)
        assert rep.contraction_max <= 1.0
        assert rep.upper_max <= 3.0
        assert rep.lower_min >= 1.0
        system, _ = build_perturbed_basis(spec, n)
        sv = np.linalg.svd(system.matrix, compute_uv=False)  # oracle
        assert sv.min() >= 0.5 - 1e-8
        assert sv.max() <= 1.5 + 1e-8
    assert t.elapsed < 10.0
    report(2, "perturbation inequalities", t)


def test_criterion_03_jaffard_pipeline():
    with Timer() as t:
        n = 512
        mat = np.eye(n) + 0.3 * np.eye(n, k=1) + 0.3 * np.eye(n, k=-1)
        a = TruncatedMatrix(mat, margin=64)
        gamma = math.log(1.0 / 0.3)  # exact class rate of the band, C = 1
        rep = jaffard_predict(a, beta=1.0, gamma=gamma)
        check = verify_inverse_decay(a, rep)
        assert check.violations == 0
        assert check.gamma_fit_inverse >= rep.gamma1_pred
    assert t.elapsed < 30.0
    report(3, "inverse decay prediction", t)


def test_criterion_04_schur_bound():
    with Timer() as t:
        rng = np.random.default_rng(404)
        for _ in range(100):
            m = rng.standard_normal((64, 64))
            bound = schur_bound(TruncatedMatrix(m), 2)
            sigma = np.linalg.svd(m, compute_uv=False)[0]  # oracle
            assert bound >= sigma - 1e-10
        gamma, n = 1.0, 256
        idx = np.arange(1, n + 1, dtype=float)
        kernel = TruncatedMatrix(np.exp(-gamma * np.abs(idx[:, None] - idx[None, :])))
        assert schur_bound(kernel, 2) <= 2.0 * p_series(gamma, 1.0) + 1e-8
    report(4, "Schur bound", t)


def test_criterion_05_continuity_constants():
    with Timer() as t:
        rng = np.random.default_rng(505)
        n = 512
        idx = np.arange(1, n + 1, dtype=float)
        mm, nn = np.meshgrid(idx, idx, indexing="ij")

        env_p = DecayEnvelope("colrow_poly", gamma0=0.0, gamma1=2.0)
        k_poly = poly_continuity_bound(0.0, 2.0, 0.5, 1.0, 1.0)
        dom_p = envelope_value(env_p, mm, nn)
        for _ in range(100):
            a = dom_p * rng.uniform(-1.0, 1.0, (n, n))
            c = rng.standard_normal(n)
            lhs = sup_graded_norm(a @ c, "poly", 2.0)
            rhs = k_poly * sup_graded_norm(c, "poly", 4.5)
            assert lhs <= rhs

        beta, gamma1, eps = 0.5, 1.0, 0.5
        env_s = DecayEnvelope("colrow_subexp", beta=beta, gamma0=0.0, gamma1=gamma1)
        k_sub = subexp_continuity_bound(beta, 0.0, gamma1, eps, 1.0, 1.0)
        dom_s = envelope_value(env_s, mm, nn)
        for _ in range(100):
            a = dom_s * rng.uniform(-1.0, 1.0, (n, n))
            c = rng.standard_normal(n)
            lhs = sup_graded_norm(a @ c, "subexp", gamma1, beta)
            rhs = k_sub * sup_graded_norm(c, "subexp", gamma1 + eps, beta)
            assert lhs <= rhs
    assert t.elapsed < 60.0
    report(5, "continuity constants", t)


def test_criterion_06_counterexample_growth():
    with Timer() as t:
        idx = np.arange(1, 129, dtype=float)
        lo = np.minimum(idx[:, None], idx[None, :])
        hi = np.maximum(idx[:, None], idx[None, :])
        big = TruncatedMatrix((lo / hi) ** 2.0)
        small = big.leading(64)
        dstar = DecayEnvelope("poly_dstar", gamma=2.0)
        tstar = DecayEnvelope("poly_tstar", gamma=2.0)
        c64 = membership_constant(small, dstar)
        c128 = membership_constant(big, dstar)
        assert c128 >= 1.5 * c64
        assert membership_constant(small, tstar) == 1.0
        assert membership_constant(big, tstar) == 1.0
    report(6, "ratio-vs-distance counterexample", t)


def test_criterion_07_convolution_constant_stability():
    with Timer() as t:
        c1 = convolution_constant(1.0, 0.5, 1000)
        c2 = convolution_constant(1.0, 0.5, 2000)
        assert abs(c2 - c1) < 0.05 * c1
    report(7, "convolution constant stability", t)


def test_criterion_08_product_envelope():
    with Timer() as t:
        n = 256
        idx = np.arange(1, n + 1, dtype=float)
        d = np.abs(idx[:, None] - idx[None, :])
        a = np.exp(-2.0 * d)
        b = np.exp(-1.0 * d)
        predicted = 1.0 * 1.0 * 2.0 * p_series(1.0, 1.0)
        prod = TruncatedMatrix(a @ b, margin=n // 8)
        emp = membership_constant(prod, DecayEnvelope("jaffard", gamma=1.0, beta=1.0))
        assert emp <= predicted  # zero interior violations of the predicted bound
    report(8, "product envelope constant", t)


def test_criterion_09_expansion_convergence():
    with Timer() as t:
        n = 256
        spec = PerturbationSpec.constant([0.5], n=n)
        system, _ = build_perturbed_basis(spec, n)
        ctx = HermiteContext(nmax=n)
        f = project(ctx, TestFunction.gaussian(3.0), n)
        checkpoints = [4, 8, 16, 32, 64, 128, 256]
        for k in range(5):
            errs = expansion_error_curve(f, system, "poly", k, checkpoints)
            assert np.all(np.diff(errs) <= 1e-10)
            assert errs[-1] < 1e-8
        # permutation proxy: expansion total is ordering-independent
        dual = canonical_dual(system)
        a = analysis(system, f)
        total_ref = dual.matrix.T @ a
        rng = np.random.default_rng(909)
        for _ in range(50):
            perm = rng.permutation(n)
            acc = np.zeros(n)
            for j in perm:
                acc = acc + a[j] * dual.matrix[j]
            assert np.max(np.abs(acc - total_ref)) <= 1e-10
    report(9, "expansion convergence", t)


def test_criterion_10_dual_localization():
    with Timer() as t:
        gammas = {}
        for n in (128, 256):
            system, _ = build_perturbed_basis(PerturbationSpec.constant([0.5], n=n), n)
            rep = dual_localization_check(system, beta=1.0)
            assert rep.dual.gamma > 0
            gammas[n] = rep.dual.gamma
        assert abs(gammas[256] - gammas[128]) <= 0.1 * gammas[128]
    report(10, "dual localization", t)


def test_criterion_11_hermite_layer():
    with Timer() as t:
        ctx = HermiteContext(nmax=64)
        basis = ctx.basis
        gram = (basis * ctx.weights[:, None]).T @ basis
        assert np.max(np.abs(gram - np.eye(64))) < 1e-10
        c1 = project(ctx, TestFunction.gaussian(1.0), 64)
        target = np.zeros(64)
        target[0] = math.pi ** 0.25
        assert np.max(np.abs(c1 - target)) <= 1e-10
        c3 = project(ctx, TestFunction.gaussian(3.0), 64)
        assert abs(float(np.sum(c3 ** 2)) - math.sqrt(math.pi / 3.0)) <= 1e-8
    report(11, "Hermite layer", t)
