"""Ladder and weighted-number operators on coefficient tables.

Two families act on :class:`~chaoscalc.functionals.Functional`:

* transform-side operators (``apply_*``, expression trees): the annihilator
  moves mass from ``sigma + {k}`` down to ``sigma``, the creator gates on
  membership, diagonal operators multiply by a function of the subset;
* square-integrable-side operators (``l2_*``): the same index moves written
  against the orthonormal product basis, kept as an independent code path so
  the verification suite can compare the two routes instead of testing a
  function against itself.

Expressions compose with ``@``, add with ``+`` and scale with ``*``; they can
be applied directly (sparse, dictionary-based) or materialized as scipy CSR
matrices over the truncated basis, columns indexed by input subset mask.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .basis import Subset, check_truncation, lam, lam_vector, popcount_vector
from .functionals import Functional
from .weights import Weight1D, Weight2D

# ---------------------------------------------------------------------------
# direct applications
# ---------------------------------------------------------------------------


def _check_index(k: int, n: int, what: str) -> int:
    if not 0 <= int(k) < n:
        raise ValueError(f"{what} index {k} outside truncation {n}")
    return int(k)


def apply_annihilate(k: int, phi: Functional) -> Functional:
    """Transform-side annihilator: output at sigma reads input at sigma + {k}."""
    k = _check_index(k, phi.truncation, "annihilate")
    bit = 1 << k
    out = {}
    for m, c in phi.coeffs.items():
        if m & bit:
            out[m ^ bit] = c
    return Functional(out, phi.truncation)


def apply_create(k: int, phi: Functional) -> Functional:
    """Transform-side creator: output at sigma containing k reads sigma - {k}."""
    k = _check_index(k, phi.truncation, "create")
    bit = 1 << k
    out = {}
    for m, c in phi.coeffs.items():
        if not m & bit:
            out[m | bit] = c
    return Functional(out, phi.truncation)


def apply_diagonal(fn: Callable[[Subset], complex], phi: Functional) -> Functional:
    """Multiply each coefficient by fn(sigma)."""
    return Functional(
        {m: fn(Subset(m)) * c for m, c in phi.coeffs.items()}, phi.truncation
    )


def occupation_apply(k: int, phi: Functional) -> Functional:
    """create(k) after annihilate(k): multiplies by the membership indicator."""
    k = _check_index(k, phi.truncation, "occupation")
    bit = 1 << k
    return Functional(
        {m: c for m, c in phi.coeffs.items() if m & bit}, phi.truncation
    )


def hop_apply(j: int, k: int, phi: Functional) -> Functional:
    """Closed form of create(k) @ annihilate(j) @ create(j) @ annihilate(k).

    Diagonal: sigma keeps its coefficient exactly when k is present and
    (for j != k) j is absent; for j == k only the presence of k matters.
    """
    n = phi.truncation
    j = _check_index(j, n, "hop row")
    k = _check_index(k, n, "hop column")
    bit_j, bit_k = 1 << j, 1 << k
    out = {}
    for m, c in phi.coeffs.items():
        if m & bit_k and (j == k or not m & bit_j):
            out[m] = c
    return Functional(out, n)


def gwn_apply(w: Weight2D, phi: Functional) -> Functional:
    """Weighted number operator for 2D weights: multiply by theta(sigma)."""
    return Functional(
        {m: w.theta(m) * c for m, c in phi.coeffs.items()}, phi.truncation
    )


def wn1d_apply(u: Weight1D, phi: Functional) -> Functional:
    """Weighted number operator for 1D weights: multiply by count(sigma)."""
    return Functional(
        {m: u.count(m) * c for m, c in phi.coeffs.items()}, phi.truncation
    )


def number_apply(phi: Functional) -> Functional:
    """Plain number operator: multiply by the cardinality of sigma."""
    return Functional(
        {m: m.bit_count() * c for m, c in phi.coeffs.items()}, phi.truncation
    )


def series_partial_2d(w: Weight2D, phi: Functional, m: int) -> Functional:
    """Square partial sum of the double series for the 2D operator.

    Sums w(j, k) * hop(j, k) over listed entries with j < m and k < m. Once m
    reaches the weight's support bound the sum has stabilized; if the weight
    carries closed-form column sums the unlisted mass is simply not summable
    term by term, so callers should hold an exact weight here.
    """
    if m < 0 or m > phi.truncation:
        raise ValueError(f"partial-sum cutoff {m} outside [0, {phi.truncation}]")
    total = Functional.zero(phi.truncation)
    for (j, k), v in sorted(w.entries.items()):
        if j < m and k < m:
            total = total + v * hop_apply(j, k, phi)
    return total


def series_partial_1d(u: Weight1D, phi: Functional, m: int) -> Functional:
    """Partial sum of u(k) * occupation(k) over k < m."""
    if m < 0 or m > phi.truncation:
        raise ValueError(f"partial-sum cutoff {m} outside [0, {phi.truncation}]")
    total = Functional.zero(phi.truncation)
    for k, v in sorted(u.values.items()):
        if k < m:
            total = total + v * occupation_apply(k, phi)
    return total


def number_series_partial(phi: Functional, m: int) -> Functional:
    """Partial sum of occupation(k) over k < m; stabilizes at m == truncation."""
    return series_partial_1d(Weight1D.constant(1.0, phi.truncation), phi, m)


# ---------------------------------------------------------------------------
# square-integrable side (independent code path)
# ---------------------------------------------------------------------------


def l2_annihilate(k: int, xi: Functional) -> Functional:
    """Gradient-type operator on product-basis coefficients.

    Sends the basis vector labeled sigma to the one labeled sigma - {k} when
    k is present, and kills it otherwise.
    """
    k = _check_index(k, xi.truncation, "l2 annihilate")
    bit = 1 << k
    out = {}
    for m, c in xi.coeffs.items():
        if m >> k & 1:
            out[m & ~bit] = out.get(m & ~bit, 0j) + c
    return Functional(out, xi.truncation)


def l2_create(k: int, xi: Functional) -> Functional:
    """Adjoint of :func:`l2_annihilate` on product-basis coefficients."""
    k = _check_index(k, xi.truncation, "l2 create")
    bit = 1 << k
    out = {}
    for m, c in xi.coeffs.items():
        if not m >> k & 1:
            out[m | bit] = out.get(m | bit, 0j) + c
    return Functional(out, xi.truncation)


def l2_wn_apply(w: Weight2D, xi: Functional) -> Functional:
    """Weighted number operator on the square-integrable side: diagonal theta."""
    out = {}
    for m, c in xi.coeffs.items():
        out[m] = w.theta(m) * c
    return Functional(out, xi.truncation)


def l2_wn1d_apply(u: Weight1D, xi: Functional) -> Functional:
    """1D weighted number operator on the square-integrable side."""
    out = {}
    for m, c in xi.coeffs.items():
        out[m] = u.count(m) * c
    return Functional(out, xi.truncation)


def l2_wn_diagnostics(w: Weight2D, n: int) -> dict:
    """Sup of theta over the truncated basis plus a boundedness caveat.

    On the truncation every diagonal operator is trivially bounded; the sup
    reported here certifies boundedness on the full space only if it is known
    to dominate theta on every finite subset, which a finite scan cannot
    decide. The caveat field says exactly that.
    """
    n = check_truncation(n)
    sup = float(np.max(w.theta_vector(n)))
    return {
        "sup_theta_on_truncation": sup,
        "bounded_on_truncation": True,
        "caveat": "finite scan; certifies nothing beyond the truncated basis",
    }


def materialize_apply(
    apply_fn: Callable[[Functional], Functional], n: int
) -> sp.csr_matrix:
    """Matrix of an operator given only its action, by sweeping basis columns."""
    n = check_truncation(n)
    size = 1 << n
    rows, cols, data = [], [], []
    for m in range(size):
        image = apply_fn(Functional.delta(m, n))
        for mm, c in image.coeffs.items():
            rows.append(mm)
            cols.append(m)
            data.append(c)
    return sp.csr_matrix((data, (rows, cols)), shape=(size, size), dtype=complex)


# ---------------------------------------------------------------------------
# expression trees
# ---------------------------------------------------------------------------


class OperatorExpr:
    """Base class: a symbolic operator applicable to functionals."""

    def apply(self, phi: Functional) -> Functional:
        raise NotImplementedError

    def materialize(self, n: int) -> sp.csr_matrix:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __add__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Sum((self, other))

    def __sub__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Sum((self, Scale(-1.0, other)))

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorExpr):
            return NotImplemented
        return Scale(complex(scalar), self)

    __rmul__ = __mul__

    def __neg__(self):
        return Scale(-1.0, self)

    def __matmul__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Compose((self, other))


@lru_cache(maxsize=None)
def _annihilate_matrix(k: int, n: int) -> sp.csr_matrix:
    size = 1 << n
    bit = 1 << k
    cols = np.array([m for m in range(size) if m & bit], dtype=np.int64)
    rows = cols ^ bit
    data = np.ones(len(cols), dtype=complex)
    return sp.csr_matrix((data, (rows, cols)), shape=(size, size))


@lru_cache(maxsize=None)
def _create_matrix(k: int, n: int) -> sp.csr_matrix:
    size = 1 << n
    bit = 1 << k
    cols = np.array([m for m in range(size) if not m & bit], dtype=np.int64)
    rows = cols | bit
    data = np.ones(len(cols), dtype=complex)
    return sp.csr_matrix((data, (rows, cols)), shape=(size, size))


_DIAGONAL_CACHE: dict = {}


@dataclass(frozen=True)
class Annihilate(OperatorExpr):
    k: int

    def apply(self, phi):
        return apply_annihilate(self.k, phi)

    def materialize(self, n):
        n = check_truncation(n)
        _check_index(self.k, n, "annihilate")
        return _annihilate_matrix(self.k, n)

    def to_json(self):
        return {"op": "annihilate", "k": self.k}


@dataclass(frozen=True)
class Create(OperatorExpr):
    k: int

    def apply(self, phi):
        return apply_create(self.k, phi)

    def materialize(self, n):
        n = check_truncation(n)
        _check_index(self.k, n, "create")
        return _create_matrix(self.k, n)

    def to_json(self):
        return {"op": "create", "k": self.k}


@dataclass(frozen=True, eq=False)
class Diagonal(OperatorExpr):
    """Multiplication by a real function of the subset.

    ``name`` keys the per-truncation vector cache (only supply one per
    distinct function); ``vector_fn`` provides a fast full-basis evaluation;
    ``json_form`` makes the node serializable when the function has one.
    """

    fn: Callable[[Subset], float]
    name: str | None = None
    vector_fn: Callable[[int], np.ndarray] | None = None
    json_form: dict | None = None

    def apply(self, phi):
        return apply_diagonal(self.fn, phi)

    def vector(self, n: int) -> np.ndarray:
        n = check_truncation(n)
        key = (self.name, n)
        if self.name is not None and key in _DIAGONAL_CACHE:
            return _DIAGONAL_CACHE[key]
        if self.vector_fn is not None:
            vec = np.asarray(self.vector_fn(n), dtype=float)
        else:
            vec = np.array([self.fn(Subset(m)) for m in range(1 << n)], dtype=float)
        if self.name is not None:
            _DIAGONAL_CACHE[key] = vec
        return vec

    def materialize(self, n):
        return sp.diags(self.vector(n).astype(complex), format="csr")

    def to_json(self):
        if self.json_form is None:
            raise ValueError(
                "only named diagonal forms (gwn/wn1d/number) serialize to JSON"
            )
        return dict(self.json_form)


@dataclass(frozen=True)
class Identity(OperatorExpr):
    def apply(self, phi):
        return Functional(dict(phi.coeffs), phi.truncation)

    def materialize(self, n):
        return sp.identity(1 << check_truncation(n), dtype=complex, format="csr")

    def to_json(self):
        return {"op": "identity"}


@dataclass(frozen=True)
class Zero(OperatorExpr):
    def apply(self, phi):
        return Functional.zero(phi.truncation)

    def materialize(self, n):
        size = 1 << check_truncation(n)
        return sp.csr_matrix((size, size), dtype=complex)

    def to_json(self):
        return {"op": "zero"}


@dataclass(frozen=True)
class Sum(OperatorExpr):
    terms: tuple

    def apply(self, phi):
        out = Functional.zero(phi.truncation)
        for term in self.terms:
            out = out + term.apply(phi)
        return out

    def materialize(self, n):
        size = 1 << check_truncation(n)
        out = sp.csr_matrix((size, size), dtype=complex)
        for term in self.terms:
            out = out + term.materialize(n)
        return out

    def to_json(self):
        return {"op": "sum", "args": [t.to_json() for t in self.terms]}


@dataclass(frozen=True)
class Scale(OperatorExpr):
    factor: complex
    arg: OperatorExpr

    def apply(self, phi):
        return self.factor * self.arg.apply(phi)

    def materialize(self, n):
        return (self.factor * self.arg.materialize(n)).tocsr()

    def to_json(self):
        return {
            "op": "scale",
            "c": [self.factor.real, self.factor.imag],
            "arg": self.arg.to_json(),
        }


@dataclass(frozen=True)
class Compose(OperatorExpr):
    """Composition, leftmost factor applied last (operator product order)."""

    factors: tuple

    def apply(self, phi):
        out = phi
        for factor in reversed(self.factors):
            out = factor.apply(out)
        return out

    def materialize(self, n):
        size = 1 << check_truncation(n)
        out = sp.identity(size, dtype=complex, format="csr")
        for factor in self.factors:
            out = out @ factor.materialize(n)
        return out.tocsr()

    def to_json(self):
        return {"op": "compose", "args": [f.to_json() for f in self.factors]}


# -- expression constructors -------------------------------------------------


def annihilate(k: int) -> Annihilate:
    return Annihilate(int(k))


def create(k: int) -> Create:
    return Create(int(k))


def identity() -> Identity:
    return Identity()


def zero() -> Zero:
    return Zero()


def occupation(k: int) -> Compose:
    """create(k) @ annihilate(k); symbol is the membership indicator."""
    return Compose((Create(int(k)), Annihilate(int(k))))


def hop_expr(j: int, k: int) -> Compose:
    """The four-fold product create(k) @ annihilate(j) @ create(j) @ annihilate(k)."""
    return Compose((Create(int(k)), Annihilate(int(j)), Create(int(j)), Annihilate(int(k))))


def _weight_tag(data: dict) -> str:
    blob = json.dumps(data, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def number() -> Diagonal:
    return Diagonal(
        fn=lambda s: float(len(s)),
        name="number",
        vector_fn=lambda n: popcount_vector(n).astype(float),
        json_form={"op": "number"},
    )


def lambda_diagonal() -> Diagonal:
    """Multiplication by lambda(sigma); handy in tests and demos."""
    return Diagonal(fn=lam, name="lambda", vector_fn=lam_vector)


def gwn_expr(w: Weight2D) -> Diagonal:
    """Expression form of the 2D weighted number operator (diagonal theta)."""
    data = w.to_json()
    return Diagonal(
        fn=w.theta,
        name=f"theta:{_weight_tag(data)}",
        vector_fn=w.theta_vector,
        json_form={"op": "gwn", "weight": data},
    )


def wn1d_expr(u: Weight1D) -> Diagonal:
    """Expression form of the 1D weighted number operator (diagonal count)."""
    data = u.to_json()
    return Diagonal(
        fn=u.count,
        name=f"count:{_weight_tag(data)}",
        vector_fn=u.count_vector,
        json_form={"op": "wn1d", "weight": data},
    )


def materialize(expr: OperatorExpr, n: int) -> sp.csr_matrix:
    """CSR matrix of an expression over the truncated basis (column = input)."""
    return expr.materialize(n)


def parse_expr(data: dict) -> OperatorExpr:
    """Rebuild an expression tree from its JSON form."""
    if not isinstance(data, dict) or "op" not in data:
        raise ValueError(f"operator JSON must be an object with an 'op' key, got {data!r}")
    op = data["op"]
    if op == "annihilate":
        return Annihilate(int(data["k"]))
    if op == "create":
        return Create(int(data["k"]))
    if op == "identity":
        return Identity()
    if op == "zero":
        return Zero()
    if op == "number":
        return number()
    if op == "gwn":
        return gwn_expr(Weight2D.from_json(data["weight"]))
    if op == "wn1d":
        return wn1d_expr(Weight1D.from_json(data["weight"]))
    if op == "sum":
        return Sum(tuple(parse_expr(arg) for arg in data["args"]))
    if op == "scale":
        re, im = data["c"]
        return Scale(complex(float(re), float(im)), parse_expr(data["arg"]))
    if op == "compose":
        return Compose(tuple(parse_expr(arg) for arg in data["args"]))
    raise ValueError(f"unknown operator kind {op!r}")
