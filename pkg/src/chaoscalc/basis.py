"""Finite subsets of the nonnegative integers, used as basis labels.

Every basis object in this package is indexed by a finite subset ``sigma``
of {0, 1, 2, ...}, stored as a bitmask (bit k set means k is in sigma).
Enumerating all subsets of {0, ..., n-1} in mask order gives the canonical
ordering of the truncated basis: position == mask.
"""
from __future__ import annotations

import math
import os
from typing import Iterable, Iterator

import numpy as np
from scipy.special import zeta

_DEFAULT_MAX_TRUNCATION = 20
_UINT64_MAX = 2**64 - 1


def max_truncation() -> int:
    """Hard cap on the truncation level (full bases have 2**n elements).

    Override with the environment variable CHAOSCALC_MAX_N.
    """
    raw = os.environ.get("CHAOSCALC_MAX_N")
    if raw is None:
        return _DEFAULT_MAX_TRUNCATION
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"CHAOSCALC_MAX_N must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ValueError(f"CHAOSCALC_MAX_N must be nonnegative, got {value}")
    return value


def check_truncation(n: int) -> int:
    """Validate a truncation level and return it as a plain int."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"truncation level must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise ValueError(f"truncation level must be nonnegative, got {n}")
    cap = max_truncation()
    if n > cap:
        raise ValueError(
            f"truncation level {n} exceeds the cap {cap}; "
            "set CHAOSCALC_MAX_N to raise it"
        )
    return n


class Subset:
    """A finite subset of {0, 1, 2, ...} backed by a bitmask.

    Immutable, hashable, iterates in increasing order. The mask doubles as
    the basis index once a truncation level is fixed.
    """

    __slots__ = ("mask",)

    def __init__(self, mask: int = 0):
        if not isinstance(mask, (int, np.integer)) or isinstance(mask, bool):
            raise ValueError(f"mask must be an integer, got {mask!r}")
        if mask < 0:
            raise ValueError(f"mask must be nonnegative, got {mask}")
        object.__setattr__(self, "mask", int(mask))

    def __setattr__(self, name, value):
        raise AttributeError("Subset is immutable")

    @classmethod
    def of(cls, *indices: int) -> "Subset":
        return cls.from_indices(indices)

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "Subset":
        mask = 0
        for k in indices:
            if k < 0:
                raise ValueError(f"indices must be nonnegative, got {k}")
            mask |= 1 << int(k)
        return cls(mask)

    @classmethod
    def from_json(cls, data) -> "Subset":
        if not isinstance(data, (list, tuple)):
            raise ValueError(f"subset JSON must be a list of indices, got {data!r}")
        return cls.from_indices(data)

    def to_json(self) -> list:
        return list(self.indices())

    def indices(self) -> tuple:
        return tuple(k for k in range(self.mask.bit_length()) if self.mask >> k & 1)

    def indicator(self, k: int) -> int:
        """1 if k is in the subset, else 0."""
        return self.mask >> k & 1

    def with_index(self, k: int) -> "Subset":
        """Union with {k}."""
        return Subset(self.mask | 1 << k)

    def without_index(self, k: int) -> "Subset":
        """Difference with {k}."""
        return Subset(self.mask & ~(1 << k))

    def __contains__(self, k) -> bool:
        return isinstance(k, (int, np.integer)) and k >= 0 and bool(self.mask >> int(k) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __eq__(self, other) -> bool:
        return isinstance(other, Subset) and self.mask == other.mask

    def __hash__(self) -> int:
        return hash(("Subset", self.mask))

    def __repr__(self) -> str:
        return f"Subset.of({', '.join(map(str, self.indices()))})"


def _mask_of(sigma) -> int:
    if isinstance(sigma, Subset):
        return sigma.mask
    if isinstance(sigma, (int, np.integer)) and not isinstance(sigma, bool):
        if sigma < 0:
            raise ValueError(f"mask must be nonnegative, got {sigma}")
        return int(sigma)
    if isinstance(sigma, (list, tuple, set, frozenset)):
        return Subset.of(*sigma).mask
    raise ValueError(f"expected a Subset, a bitmask or indices, got {sigma!r}")


def cardinality(sigma) -> int:
    return _mask_of(sigma).bit_count()


def indicator(sigma, k: int) -> int:
    return _mask_of(sigma) >> k & 1


def lam(sigma) -> float:
    """Product of (k + 1) over k in sigma; equals 1 on the empty set."""
    out = 1.0
    mask = _mask_of(sigma)
    k = 0
    while mask:
        if mask & 1:
            out *= k + 1
        mask >>= 1
        k += 1
    return out


def lam_exact(sigma) -> int:
    """Exact integer version of :func:`lam`.

    Raises OverflowError once the product no longer fits in an unsigned
    64-bit integer, so callers never get a silently wrapped value.
    """
    out = 1
    for k in Subset(_mask_of(sigma)):
        out *= k + 1
        if out > _UINT64_MAX:
            raise OverflowError(
                f"lambda exceeds 2**64 - 1 on subset {Subset(_mask_of(sigma))!r}"
            )
    return out


def enumerate_basis(n: int) -> list:
    """All subsets of {0, ..., n-1} in mask order (position == mask)."""
    n = check_truncation(n)
    return [Subset(mask) for mask in range(1 << n)]


def basis_size(n: int) -> int:
    return 1 << check_truncation(n)


def lam_vector(n: int) -> np.ndarray:
    """lambda over the full truncated basis, as a float array of length 2**n.

    Built by the subset-product recursion: appending index m multiplies by m+1,
    and masks with bit m set occupy the upper half of each doubling step.
    """
    n = check_truncation(n)
    out = np.ones(1, dtype=float)
    for m in range(n):
        out = np.concatenate([out, out * (m + 1)])
    return out


def popcount_vector(n: int) -> np.ndarray:
    """Cardinality of every subset of {0, ..., n-1}, length 2**n."""
    n = check_truncation(n)
    masks = np.arange(1 << n, dtype=np.uint64)
    return np.bitwise_count(masks).astype(np.int64)


def lambda_series_partial(r: float, n: int) -> float:
    """Partial sum of lambda^(-r) over all subsets of {0, ..., n-1}.

    Uses the factorization over independent bits:
    sum over Gamma_n of lambda^(-r) == prod_{k<n} (1 + (k+1)^(-r)).
    Requires r > 1 (the full series diverges otherwise).
    """
    if not r > 1:
        raise ValueError(f"series requires r > 1, got {r}")
    n = check_truncation(n)
    out = 1.0
    for k in range(n):
        out *= 1.0 + float(k + 1) ** (-r)
    return out


def lambda_series_bound(r: float) -> float:
    """Upper bound exp(zeta(r)) for the full series, finite for r > 1."""
    if not r > 1:
        raise ValueError(f"series bound requires r > 1, got {r}")
    return math.exp(float(zeta(r)))
