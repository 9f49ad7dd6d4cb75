"""Truncated functionals: coefficient tables over the subset basis.

A functional is a finite table ``sigma -> complex`` over subsets of
{0, ..., n-1}. The same container serves both sides of the duality: test
vectors carry chaotic-expansion coefficients, generalized elements carry
the values of their transform on basis subsets. The scale of norms

    norm(xi, p)^2      = sum lambda(sigma)^(2p) |c(sigma)|^2
    dual_norm(phi, p)^2 = sum lambda(sigma)^(-2p) |phi(sigma)|^2

makes the conjugation map an isometry between the two at every level p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .basis import Subset, _mask_of, basis_size, check_truncation, lam, lam_vector


@dataclass
class Functional:
    """Finite coefficient table over the truncated subset basis."""

    coeffs: Mapping
    truncation: int

    def __post_init__(self):
        self.truncation = check_truncation(self.truncation)
        limit = 1 << self.truncation
        cleaned = {}
        for key, value in dict(self.coeffs).items():
            mask = _mask_of(key)
            if mask >= limit:
                raise ValueError(
                    f"subset {Subset(mask)!r} lies outside truncation {self.truncation}"
                )
            c = complex(value)
            if c != 0:
                cleaned[mask] = c
        self.coeffs = cleaned

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Functional":
        return cls({}, n)

    @classmethod
    def delta(cls, sigma, n: int) -> "Functional":
        """The basis functional supported on a single subset."""
        return cls({_mask_of(sigma): 1.0}, n)

    @classmethod
    def from_vector(cls, vec, n: int) -> "Functional":
        n = check_truncation(n)
        vec = np.asarray(vec)
        if vec.shape != (1 << n,):
            raise ValueError(
                f"vector length {vec.shape} does not match basis size {1 << n}"
            )
        return cls({m: vec[m] for m in range(1 << n) if vec[m] != 0}, n)

    # -- access ------------------------------------------------------------

    def fock(self, sigma) -> complex:
        """Coefficient (transform value) at sigma; zero off the support."""
        return self.coeffs.get(_mask_of(sigma), 0j)

    def support(self) -> list:
        return [Subset(m) for m in sorted(self.coeffs)]

    def as_vector(self) -> np.ndarray:
        out = np.zeros(basis_size(self.truncation), dtype=complex)
        for m, c in self.coeffs.items():
            out[m] = c
        return out

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def __iter__(self) -> Iterator:
        for m in sorted(self.coeffs):
            yield Subset(m), self.coeffs[m]

    # -- linear structure ----------------------------------------------------

    def _merge(self, other: "Functional", sign: int) -> "Functional":
        if not isinstance(other, Functional):
            return NotImplemented
        n = max(self.truncation, other.truncation)
        merged = dict(self.coeffs)
        for m, c in other.coeffs.items():
            merged[m] = merged.get(m, 0j) + sign * c
        return Functional(merged, n)

    def __add__(self, other):
        return self._merge(other, 1)

    def __sub__(self, other):
        return self._merge(other, -1)

    def __mul__(self, scalar):
        if isinstance(scalar, Functional):
            return NotImplemented
        z = complex(scalar)
        return Functional({m: z * c for m, c in self.coeffs.items()}, self.truncation)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Functional)
            and self.truncation == other.truncation
            and self.coeffs == other.coeffs
        )

    def isclose(self, other: "Functional", tol: float = 1e-12) -> bool:
        diff = self - other
        scale = max(1.0, self.max_abs(), other.max_abs())
        return diff.max_abs() <= tol * scale

    # -- norms and duality ---------------------------------------------------

    def norm(self, p: float) -> float:
        """Graded norm with weight lambda^(2p); p = 0 is the plain l2 norm."""
        return math.sqrt(
            sum(lam(m) ** (2 * p) * abs(c) ** 2 for m, c in self.coeffs.items())
        )

    def dual_norm(self, p: float) -> float:
        """Dual-side norm with weight lambda^(-2p)."""
        return math.sqrt(
            sum(lam(m) ** (-2 * p) * abs(c) ** 2 for m, c in self.coeffs.items())
        )

    def conjugated(self) -> "Functional":
        """Coefficient-wise complex conjugate; realizes the duality embedding."""
        return Functional(
            {m: c.conjugate() for m, c in self.coeffs.items()}, self.truncation
        )

    def pair(self, xi: "Functional") -> complex:
        """Bilinear pairing: sum of products of coefficients, no conjugation."""
        if len(self.coeffs) > len(xi.coeffs):
            return xi.pair(self)
        return sum(c * xi.coeffs.get(m, 0j) for m, c in self.coeffs.items())

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "truncation": self.truncation,
            "coefficients": [
                [Subset(m).to_json(), self.coeffs[m].real, self.coeffs[m].imag]
                for m in sorted(self.coeffs)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Functional":
        if "truncation" not in data:
            raise ValueError("functional JSON requires a 'truncation' field")
        coeffs = {}
        for item in data.get("coefficients", []):
            if len(item) != 3:
                raise ValueError(
                    f"coefficient must be [[indices], re, im], got {item!r}"
                )
            indices, re, im = item
            mask = Subset.from_json(indices).mask
            if mask in coeffs:
                raise ValueError(f"duplicate coefficient for subset {indices!r}")
            coeffs[mask] = complex(float(re), float(im))
        return cls(coeffs, data["truncation"])


def riesz_embed(xi: Functional) -> Functional:
    """Embed a test vector into the dual side (coefficient conjugation)."""
    return xi.conjugated()


def pair(phi: Functional, xi: Functional) -> complex:
    return phi.pair(xi)


@dataclass(frozen=True)
class GrowthBound:
    """Pointwise bound |phi(sigma)| <= scale * lambda(sigma)**order."""

    scale: float
    order: float

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError(f"scale must be nonnegative, got {self.scale}")
        if self.order < 0:
            raise ValueError(f"order must be nonnegative, got {self.order}")

    def value(self, sigma) -> float:
        return self.scale * lam(sigma) ** self.order


@dataclass(frozen=True)
class GrowthCheckResult:
    satisfied: bool
    worst_excess: float
    witness: Subset | None
    dual_norm_at_next: float | None = None
    dual_norm_cap: float | None = None
    dual_bound_holds: bool | None = None


def check_growth(phi: Functional, bound: GrowthBound, tol: float = 1e-12) -> GrowthCheckResult:
    """Check the pointwise growth bound and, when it holds, its norm consequence.

    The consequence probed is: a bound of order p caps the dual norm one level
    up, dual_norm(phi, p + 1) <= scale * sqrt(sum over the truncated basis of
    lambda^(-2)), since each coefficient contributes at most
    (scale * lambda^p)^2 * lambda^(-2(p+1)).
    """
    worst = 0.0
    witness = None
    for m, c in sorted(phi.coeffs.items()):
        excess = abs(c) - bound.value(m)
        if excess > worst:
            worst = excess
            witness = Subset(m)
    satisfied = worst <= tol
    if not satisfied:
        return GrowthCheckResult(False, worst, witness)
    lams = lam_vector(phi.truncation)
    cap = bound.scale * math.sqrt(float(np.sum(lams**-2.0)))
    value = phi.dual_norm(bound.order + 1)
    holds = value <= cap * (1.0 + 1e-12) + 1e-15
    return GrowthCheckResult(True, 0.0, None, value, cap, holds)
