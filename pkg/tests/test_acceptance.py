"""Acceptance gate: ten top-level criteria, one printed line each.

The first three criteria rebuild their expected values inline (explicit
matrix products, partial-sum sweeps); the rest drive the check families,
each of which compares two independently coded routes internally. Sizes,
seeds and tolerances are pinned below and in each test.
"""
from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sp

from chaoscalc.functionals import Functional, riesz_embed
from chaoscalc.martingale import (
    BernoulliParams,
    conditional_moments,
    exact_gram,
    monte_carlo_gram,
)
from chaoscalc.operators import (
    annihilate,
    apply_annihilate,
    create,
    gwn_apply,
    hop_apply,
    hop_expr,
    l2_annihilate,
    l2_create,
    materialize,
    materialize_apply,
    number_apply,
    number_series_partial,
    series_partial_1d,
    series_partial_2d,
    wn1d_apply,
)
from chaoscalc.qms import check_generator_structure, check_sum_identity
from chaoscalc.reports import CHECK, NEGATIVE_CONTROL, residual
from chaoscalc.verifier import (
    FAMILY_NAMES,
    check_commutation_1d,
    check_commutation_2d,
    check_commutation_number,
    check_l2_lemmas,
    check_norm_bounds,
    check_riesz_intertwining,
    check_spectral_shifts,
    random_functional,
    random_weight1d,
    random_weight2d,
    run_all,
)
from chaoscalc.weights import Weight1D, Weight2D

IDENTITY_TOL = 1e-12
SHIFT_TOL = 1e-14
SEED = 42

RUNNING = Weight2D({(0, 1): 2.0, (1, 1): 3.0})
DIAG_ONES = Weight2D.from_weight1d(Weight1D.constant(1.0, 4))


def announce(capsys, idx: int, ok: bool, text: str) -> None:
    with capsys.disabled():
        print(f"ACCEPTANCE {idx:02d} {'PASS' if ok else 'FAIL'} - {text}")
    assert ok, text


def checks_pass(reports, tol=None):
    worst = 0.0
    for rep in reports:
        if rep.kind != CHECK:
            continue
        limit = rep.tolerance if tol is None else tol
        if rep.residual > limit:
            return False, rep
        worst = max(worst, rep.residual)
    return True, worst


def test_01_car_identities_exact(capsys):
    n = 8
    started = time.perf_counter()
    eye = sp.identity(1 << n, dtype=complex, format="csr")
    worst = 0.0
    for side in ("transform", "l2"):
        if side == "transform":
            a = [materialize(annihilate(k), n) for k in range(n)]
            c = [materialize(create(k), n) for k in range(n)]
        else:
            a = [
                materialize_apply(lambda f, k=k: l2_annihilate(k, f), n)
                for k in range(n)
            ]
            c = [
                materialize_apply(lambda f, k=k: l2_create(k, f), n)
                for k in range(n)
            ]
        for j in range(n):
            for k in range(n):
                if j == k:
                    dev = c[k] @ a[k] + a[k] @ c[k] - eye
                    worst = max(worst, abs(dev).max() if dev.nnz else 0.0)
                    nil = a[k] @ a[k]
                    worst = max(worst, abs(nil).max() if nil.nnz else 0.0)
                else:
                    # distinct indices act on disjoint bits: they commute
                    for dev in (
                        a[j] @ a[k] - a[k] @ a[j],
                        c[j] @ c[k] - c[k] @ c[j],
                        a[j] @ c[k] - c[k] @ a[j],
                    ):
                        worst = max(worst, abs(dev).max() if dev.nnz else 0.0)
        for k in range(n):
            adj = c[k] - a[k].conjugate().transpose()
            worst = max(worst, abs(adj).max() if adj.nnz else 0.0)
    elapsed = time.perf_counter() - started
    ok = worst == 0.0 and elapsed < 5.0
    announce(
        capsys, 1, ok,
        f"ladder anticommutation exact on both sides at n={n} "
        f"(residual {worst:.1e}, {elapsed:.2f}s < 5s)",
    )


def test_02_hop_closed_form(capsys):
    n = 8
    worst = 0.0
    for j in range(n):
        for k in range(n):
            closed = materialize_apply(lambda f: hop_apply(j, k, f), n)
            composed = materialize(hop_expr(j, k), n)
            dev = closed - composed
            worst = max(worst, abs(dev).max() if dev.nnz else 0.0)
    ok = worst == 0.0
    announce(
        capsys, 2, ok,
        f"four-fold ladder product equals closed form on all 2^{n} basis "
        f"columns, all (j,k) (residual {worst:.1e})",
    )


def test_03_series_stabilization(capsys):
    n = 8
    rng = np.random.default_rng(SEED)
    phi = random_functional(rng, n)
    worst = 0.0
    genuine = True
    for w in (Weight2D.zero(), DIAG_ONES, RUNNING):
        target = gwn_apply(w, phi)
        cutoff = w.support_bound()
        for m in range(cutoff, n + 1):
            worst = max(worst, residual(series_partial_2d(w, phi, m), target))
        if cutoff > 0:
            genuine &= residual(series_partial_2d(w, phi, cutoff - 1), target) > 1e-6
    u = Weight1D.constant(1.0, 4)
    target_u = wn1d_apply(u, phi)
    for m in range(4, n + 1):
        worst = max(worst, residual(series_partial_1d(u, phi, m), target_u))
    genuine &= residual(series_partial_1d(u, phi, 3), target_u) > 1e-6
    target_num = number_apply(phi)
    worst = max(worst, residual(number_series_partial(phi, n), target_num))
    genuine &= residual(number_series_partial(phi, n - 1), target_num) > 1e-6
    ok = worst <= IDENTITY_TOL and genuine
    announce(
        capsys, 3, ok,
        f"square-array, 1D and number series all stabilize at their support "
        f"cutoff and match the diagonal action (residual {worst:.1e} <= 1e-12)",
    )


def test_04_commutation_suite(capsys):
    n = 8
    started = time.perf_counter()
    rng = np.random.default_rng(SEED)
    reports = []
    for _ in range(5):
        w = random_weight2d(rng, 4)
        u = random_weight1d(rng, 4)
        reports += check_commutation_2d(w, n)
        reports += check_commutation_1d(u, n)
        reports += check_l2_lemmas(w, u, n)
    reports += check_commutation_number(n)
    elapsed = time.perf_counter() - started
    ok, info = checks_pass(reports, IDENTITY_TOL)
    ok = ok and elapsed < 60.0
    announce(
        capsys, 4, ok,
        f"2D/1D/number commutators and square-integrable-side lemmas pass for "
        f"5 random weights at n={n} "
        + (f"(worst {info:.1e} <= 1e-12, {elapsed:.1f}s < 60s)" if ok
           else f"(first failure: {getattr(info, 'name', info)})"),
    )


def test_05_spectral_shifts(capsys):
    n = 8
    rng = np.random.default_rng(SEED)
    reports = []
    for _ in range(3):
        reports += check_spectral_shifts(random_weight2d(rng, 4), n)
    assert any(r.name == "theta-vs-double-sum" for r in reports)
    ok, info = checks_pass(reports, SHIFT_TOL)
    announce(
        capsys, 5, ok,
        f"index add/remove shifts exact on all of Gamma_{n} x {{0..{n - 1}}} "
        f"against the literal double-sum oracle "
        + (f"(worst {info:.1e} <= 1e-14)" if ok else f"(failed: {info.name})"),
    )


def test_06_norm_bounds(capsys):
    n = 8
    rng = np.random.default_rng(SEED)
    w = random_weight2d(rng, 4)
    u = random_weight1d(rng, 4)
    reports = check_norm_bounds(w, u, n, trials=1000, seed=SEED)
    names = {r.name for r in reports}
    assert "remark-1d-comparison" in names
    ok, info = checks_pass(reports)
    announce(
        capsys, 6, ok,
        "dual-scale bounds (factor 2*alpha, sharp factor beta) hold for 1000 "
        "random functionals at p in {0,1,2}, plus the one-vs-two-factor "
        "comparison" + ("" if ok else f" (failed: {info.name})"),
    )


def test_07_riesz_intertwining(capsys):
    n = 8
    w = random_weight2d(np.random.default_rng(SEED), 4)
    reports = check_riesz_intertwining(w, n, trials=100, seed=SEED)
    ok, info = checks_pass(reports, IDENTITY_TOL)

    xi = Functional({0b011: 1.0 + 2.0j, 0b100: -0.5j, 0: 1.0}, n)
    assert any(abs(c.imag) > 0 for _, c in xi)
    explicit = 0.0
    for k in range(n):
        lhs = riesz_embed(l2_annihilate(k, xi))
        rhs = apply_annihilate(k, riesz_embed(xi))
        explicit = max(explicit, residual(lhs, rhs))
    ok = ok and explicit <= IDENTITY_TOL
    announce(
        capsys, 7, ok,
        f"conjugation embedding intertwines both operator sides on 100 random "
        f"complex vectors and an explicit non-real one (residual {explicit:.1e})",
    )


def test_08_bernoulli_noise(capsys):
    pattern = (0.25, 1 / 3, 2 / 3, 0.9)
    worst_gram = 0.0
    worst_moment = 0.0
    for params in (
        BernoulliParams.constant(0.5, 10),
        BernoulliParams.cycling(pattern, 10),
    ):
        gram = exact_gram(params)
        worst_gram = max(worst_gram, float(np.abs(gram - np.eye(1 << 10)).max()))
        rep = conditional_moments(params)
        worst_moment = max(worst_moment, rep.max_mean_dev, rep.max_second_dev)
    mc_params = BernoulliParams.cycling(pattern, 6)
    gram, stderr = monte_carlo_gram(mc_params, 100_000, SEED)
    excess = float((np.abs(gram - np.eye(1 << 6)) - 4.0 * stderr).max())
    ok = worst_gram <= IDENTITY_TOL and worst_moment <= IDENTITY_TOL and excess <= 1e-12
    announce(
        capsys, 8, ok,
        f"orthonormality exact at n=10 (dev {worst_gram:.1e}), conditional "
        f"moments exact (dev {worst_moment:.1e}), sampled Gram at n=6 with "
        f"10^5 draws within 4 standard errors (excess {excess:.1e})",
    )


def test_09_generator_identities(capsys):
    n = 6
    w = random_weight2d(np.random.default_rng(SEED), 4)
    reports = check_sum_identity(w, n) + check_generator_structure(
        w, n, trials=100, seed=SEED
    )
    names = {r.name for r in reports}
    assert {"qms-unital", "qms-hermiticity"} <= names
    ok, info = checks_pass(reports, IDENTITY_TOL)
    announce(
        capsys, 9, ok,
        f"dissipator sums agree three ways at n={n}, the identity is killed "
        f"exactly, and adjoints are preserved on 100 random observables"
        + ("" if ok else f" (failed: {info.name})"),
    )


def test_10_negative_controls(capsys):
    bad_families = []
    for family in FAMILY_NAMES:
        reports, _ = run_all(n=5, seed=SEED, only=[family])
        controls = [r for r in reports if r.kind == NEGATIVE_CONTROL]
        genuine = [r for r in reports if r.kind == CHECK]
        if not controls or any(c.passed for c in controls) or not all(
            g.passed for g in genuine
        ):
            bad_families.append(family)
    ok = not bad_families
    announce(
        capsys, 10, ok,
        f"all {len(FAMILY_NAMES)} families detect a 1e-6 single-entry "
        f"perturbation while their genuine checks pass"
        + ("" if ok else f" (offenders: {bad_families})"),
    )
