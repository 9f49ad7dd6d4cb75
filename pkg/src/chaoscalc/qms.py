"""Lindblad-type generator built from index-transfer jump operators.

The jump operator for an ordered pair (j, k) moves occupation from index k
to index j on the product basis; its rate is the weight entry w(j, k),
stored and used verbatim (no square roots are taken anywhere). The
generator acts on observables, matrices over the truncated basis:

    L(X) = i (H X - X H) - 1/2 * sum_{j,k} w(j,k) (X B'B - 2 B' X B + B'B X)

with B the transfer matrix for (j, k) and B' its adjoint. Summing the rates
against B'B collapses to the diagonal spectral function, which gives the
verification suite three independent evaluation routes to compare.

The Euler stepper at the bottom is a demo: it is not validated, carries no
step-size control, and nothing in the package depends on it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .basis import check_truncation, popcount_vector
from .operators import l2_annihilate, l2_create, materialize_apply
from .reports import (
    CHECK,
    NEGATIVE_CONTROL,
    VerificationReport,
    max_abs,
    perturbed,
    residual,
)
from .weights import Weight2D

_HERMITIAN_TOL = 1e-12


def demo_hamiltonian(n: int) -> np.ndarray:
    """Default Hamiltonian for demos: diagonal subset cardinality."""
    return np.diag(popcount_vector(n).astype(complex))


@lru_cache(maxsize=None)
def transfer_matrix(j: int, k: int, n: int) -> sp.csr_matrix:
    """Jump operator moving occupation k -> j, as a truncated matrix.

    Built by sweeping the square-integrable-side applications over basis
    columns; treat the cached result as read-only.
    """
    n = check_truncation(n)
    return materialize_apply(lambda xi: l2_create(j, l2_annihilate(k, xi)), n)


@dataclass
class GeneratorSpec:
    """Weight (jump rates), truncation and optional Hamiltonian."""

    weight: Weight2D
    truncation: int
    hamiltonian: np.ndarray | None = None

    def __post_init__(self):
        self.truncation = check_truncation(self.truncation)
        size = 1 << self.truncation
        if self.weight.support_bound() > self.truncation:
            raise ValueError(
                f"weight support bound {self.weight.support_bound()} exceeds "
                f"truncation {self.truncation}"
            )
        if self.hamiltonian is not None:
            h = np.asarray(self.hamiltonian, dtype=complex)
            if h.shape != (size, size):
                raise ValueError(
                    f"hamiltonian shape {h.shape} does not match basis size {size}"
                )
            gap = max_abs(h - h.conj().T)
            if gap > _HERMITIAN_TOL * max(1.0, max_abs(h)):
                raise ValueError(f"hamiltonian is not hermitian (gap {gap:.3e})")
            self.hamiltonian = h

    def ham(self) -> np.ndarray:
        if self.hamiltonian is None:
            return demo_hamiltonian(self.truncation)
        return self.hamiltonian


_TERMS_CACHE: dict = {}


def _jump_terms(w: Weight2D, n: int) -> list:
    """Dense (rate, B, B adjoint, B'B) tuples, cached per weight and size."""
    key = (json.dumps(w.to_json(), sort_keys=True), n)
    if key not in _TERMS_CACHE:
        terms = []
        for (j, k), rate in sorted(w.entries.items()):
            b = transfer_matrix(j, k, n).toarray()
            b_adj = np.ascontiguousarray(b.conj().T)
            terms.append((rate, b, b_adj, b_adj @ b))
        _TERMS_CACHE[key] = terms
    return _TERMS_CACHE[key]


def dissipator_apply(w: Weight2D, n: int, x: np.ndarray) -> np.ndarray:
    """The rate-weighted jump part of the generator applied to an observable."""
    n = check_truncation(n)
    x = np.asarray(x, dtype=complex)
    out = np.zeros_like(x)
    for rate, b, b_adj, bb in _jump_terms(w, n):
        out += rate * (b_adj @ x @ b - 0.5 * (x @ bb + bb @ x))
    return out


def generator_apply(spec: GeneratorSpec, x: np.ndarray) -> np.ndarray:
    """Full generator: commutator with the Hamiltonian plus the dissipator."""
    x = np.asarray(x, dtype=complex)
    size = 1 << spec.truncation
    if x.shape != (size, size):
        raise ValueError(f"observable shape {x.shape} does not match basis size {size}")
    h = spec.ham()
    return 1j * (h @ x - x @ h) + dissipator_apply(spec.weight, spec.truncation, x)


def euler_step(spec: GeneratorSpec, x: np.ndarray, dt: float) -> np.ndarray:
    """One explicit Euler step of the observable flow. Demo only."""
    return np.asarray(x, dtype=complex) + dt * generator_apply(spec, x)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def _report(name, statement, res, tol, *, kind=CHECK, inputs=None, notes=()):
    return VerificationReport.build(
        name, statement, res, tol, kind=kind, inputs=inputs, notes=notes
    )


def check_sum_identity(
    w: Weight2D, n: int, tolerance: float = 1e-12, tag: str = "w"
) -> list:
    """Rate-weighted B'B summed three ways: adjoint, explicit, diagonal.

    Route one multiplies each transfer matrix by its numerical adjoint; route
    two composes the four elementary moves explicitly; route three is the
    diagonal spectral function. All three must agree entrywise.
    """
    n = check_truncation(n)
    if not w.is_exact() or w.support_bound() > n:
        raise ValueError(
            "sum identity needs explicitly listed weights supported within "
            "the truncation"
        )
    size = 1 << n
    inputs = {"n": n, "weight": tag}
    via_adjoint = np.zeros((size, size), dtype=complex)
    via_explicit = np.zeros((size, size), dtype=complex)
    for (j, k), rate in sorted(w.entries.items()):
        b = transfer_matrix(j, k, n).toarray()
        via_adjoint += rate * (b.conj().T @ b)
        explicit = materialize_apply(
            lambda xi: l2_create(k, l2_annihilate(j, l2_create(j, l2_annihilate(k, xi)))),
            n,
        ).toarray()
        via_explicit += rate * explicit
    diagonal = np.diag(w.theta_vector(n).astype(complex))
    return [
        _report(
            "exclusion-sum-adjoint-vs-explicit",
            "sum of w(j,k) B'B with numerical adjoints equals the literal "
            "four-fold composition",
            residual(via_adjoint, via_explicit),
            tolerance,
            inputs=inputs,
        ),
        _report(
            "exclusion-sum-explicit-vs-diagonal",
            "the composed sum equals the diagonal spectral function",
            residual(via_explicit, diagonal),
            tolerance,
            inputs=inputs,
        ),
        _report(
            "exclusion-sum-adjoint-vs-diagonal",
            "the adjoint-route sum equals the diagonal spectral function",
            residual(via_adjoint, diagonal),
            tolerance,
            inputs=inputs,
        ),
        _report(
            "exclusion-sum-negative-control",
            "adjoint-route sum with one entry off by 1e-6 must fail",
            residual(perturbed(via_adjoint, 1e-6), diagonal),
            tolerance,
            kind=NEGATIVE_CONTROL,
            inputs=inputs,
        ),
    ]


def check_generator_structure(
    w: Weight2D,
    n: int,
    trials: int = 100,
    seed: int = 42,
    tolerance: float = 1e-12,
    hamiltonian: np.ndarray | None = None,
    tag: str = "w",
) -> list:
    """Structural facts: unital kernel, hermiticity preservation, linearity,
    and the classical (diagonal) reduction."""
    n = check_truncation(n)
    size = 1 << n
    spec = GeneratorSpec(weight=w, truncation=n, hamiltonian=hamiltonian)
    rng = np.random.default_rng(seed)
    inputs = {"n": n, "weight": tag, "trials": trials, "seed": seed}

    unital = max_abs(generator_apply(spec, np.eye(size, dtype=complex)))

    worst_herm = worst_lin = 0.0
    for _ in range(trials):
        x = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        y = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        lx = generator_apply(spec, x)
        worst_herm = max(
            worst_herm, residual(generator_apply(spec, x.conj().T), lx.conj().T)
        )
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        worst_lin = max(
            worst_lin,
            residual(
                generator_apply(spec, a * x + b * y),
                a * lx + b * generator_apply(spec, y),
            ),
        )

    diag_entries = {(j, k): v for (j, k), v in w.entries.items() if j == k}
    if not diag_entries:
        diag_entries = {(k, k): 1.0 for k in range(n)}
    diag_weight = Weight2D(diag_entries)
    diag_spec = GeneratorSpec(weight=diag_weight, truncation=n)
    x_diag = np.diag(rng.standard_normal(size).astype(complex))
    image = generator_apply(diag_spec, x_diag)
    off_diag = max_abs(image - np.diag(np.diag(image))) / max(1.0, max_abs(image))

    return [
        _report(
            "qms-unital",
            "the generator kills the identity observable",
            unital,
            tolerance,
            inputs=inputs,
        ),
        _report(
            "qms-hermiticity",
            "the generator of the adjoint observable is the adjoint image",
            worst_herm,
            tolerance,
            inputs=inputs,
        ),
        _report(
            "qms-linearity",
            "the generator is complex-linear in the observable",
            worst_lin,
            tolerance,
            inputs=inputs,
        ),
        _report(
            "qms-diagonal-reduction",
            "diagonal rates and a diagonal observable stay diagonal "
            "(classical birth-death reduction)",
            off_diag,
            tolerance,
            inputs=inputs,
        ),
        _report(
            "qms-negative-control",
            "unital check with one entry off by 1e-6 must fail",
            max_abs(perturbed(generator_apply(spec, np.eye(size, dtype=complex)), 1e-6)),
            tolerance,
            kind=NEGATIVE_CONTROL,
            inputs=inputs,
        ),
    ]


# ---------------------------------------------------------------------------
# observable serialization
# ---------------------------------------------------------------------------


def matrix_to_json(x: np.ndarray, n: int) -> dict:
    x = np.asarray(x, dtype=complex)
    size = 1 << check_truncation(n)
    if x.shape != (size, size):
        raise ValueError(f"matrix shape {x.shape} does not match basis size {size}")
    return {
        "n": n,
        "rows": [[[float(v.real), float(v.imag)] for v in row] for row in x],
    }


def matrix_from_json(data: dict) -> tuple:
    if "n" not in data or "rows" not in data:
        raise ValueError("matrix JSON requires 'n' and 'rows'")
    n = check_truncation(data["n"])
    size = 1 << n
    rows = data["rows"]
    if len(rows) != size or any(len(r) != size for r in rows):
        raise ValueError(f"matrix JSON must be {size} x {size} for n = {n}")
    out = np.empty((size, size), dtype=complex)
    for i, row in enumerate(rows):
        for j, pair in enumerate(row):
            re, im = pair
            out[i, j] = complex(float(re), float(im))
    return out, n
