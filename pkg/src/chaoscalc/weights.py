"""Weight data for the weighted number operators.

Two containers:

* ``Weight1D`` -- a nonnegative function u on indices with a finite sup
  bound; drives the diagonal counting function ``count(sigma) = sum_{k in
  sigma} u(k)``.
* ``Weight2D`` -- a nonnegative function w on index pairs whose columns are
  summable, with ``alpha = sup_k sum_j w(j, k)`` finite; drives the spectral
  function ``theta``.

Entries not listed are zero, except that a column may carry a closed-form
``column_sums`` value (entries then only need to cover the indices a
computation will actually touch) plus a ``tail_bound`` for mass that is not
accounted for at all.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .basis import Subset, _mask_of, check_truncation

_REL_TOL = 1e-12


def _as_clean_float(v, what: str) -> float:
    value = float(v)
    if not np.isfinite(value):
        raise ValueError(f"{what} must be finite, got {value}")
    if value < 0:
        raise ValueError(f"{what} must be nonnegative, got {value}")
    return value


@dataclass(frozen=True, eq=False)
class Weight1D:
    """Nonnegative weights on single indices, zero off the listed support."""

    values: Mapping[int, float]
    sup_bound: float | None = None

    def __post_init__(self):
        cleaned = {}
        for k, v in dict(self.values).items():
            if not isinstance(k, (int, np.integer)) or k < 0:
                raise ValueError(f"weight index must be a nonnegative int, got {k!r}")
            value = _as_clean_float(v, f"weight value at {k}")
            if value != 0.0:
                cleaned[int(k)] = value
        object.__setattr__(self, "values", cleaned)
        listed_sup = max(cleaned.values(), default=0.0)
        if self.sup_bound is None:
            object.__setattr__(self, "sup_bound", listed_sup)
        else:
            bound = _as_clean_float(self.sup_bound, "sup_bound")
            if bound + _REL_TOL * max(1.0, bound) < listed_sup:
                raise ValueError(
                    f"sup_bound {bound} is below a listed value {listed_sup}"
                )
            object.__setattr__(self, "sup_bound", bound)

    @classmethod
    def constant(cls, value: float, n: int) -> "Weight1D":
        """u == value on {0, ..., n-1}."""
        n = check_truncation(n)
        return cls({k: value for k in range(n)}, sup_bound=float(value))

    @classmethod
    def zero(cls) -> "Weight1D":
        return cls({})

    def __call__(self, k: int) -> float:
        return self.values.get(int(k), 0.0)

    def beta(self) -> float:
        """Sup bound used in the one-dimensional norm estimates."""
        return self.sup_bound

    def count(self, sigma) -> float:
        """sum_{k in sigma} u(k); the weighted occupation total."""
        mask = _mask_of(sigma)
        return sum(v for k, v in self.values.items() if mask >> k & 1)

    def count_vector(self, n: int) -> np.ndarray:
        """count over the full truncated basis, length 2**n."""
        n = check_truncation(n)
        out = np.zeros(1 << n, dtype=float)
        masks = np.arange(1 << n, dtype=np.int64)
        for k, v in self.values.items():
            if k < n:
                out[(masks >> k & 1).astype(bool)] += v
        return out

    def support_bound(self) -> int:
        """1 + largest listed index (0 when empty)."""
        return 1 + max(self.values, default=-1)

    def to_json(self) -> dict:
        return {
            "kind": "diag1d",
            "entries": [[k, self.values[k]] for k in sorted(self.values)],
            "sup_bound": self.sup_bound,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Weight1D":
        if data.get("kind") != "diag1d":
            raise ValueError(f"expected kind 'diag1d', got {data.get('kind')!r}")
        entries = data.get("entries", [])
        values = {}
        for item in entries:
            if len(item) != 2:
                raise ValueError(f"diag1d entry must be [k, value], got {item!r}")
            k, v = item
            if k in values:
                raise ValueError(f"duplicate entry for index {k}")
            values[int(k)] = v
        return cls(values, sup_bound=data.get("sup_bound"))


@dataclass(frozen=True, eq=False)
class Weight2D:
    """Nonnegative weights on index pairs (j, k) with summable columns."""

    entries: Mapping[tuple, float]
    column_sums: Mapping[int, float] | None = None
    tail_bound: float = 0.0

    def __post_init__(self):
        cleaned = {}
        for key, v in dict(self.entries).items():
            if len(key) != 2:
                raise ValueError(f"entry key must be a pair (j, k), got {key!r}")
            j, k = key
            if j < 0 or k < 0:
                raise ValueError(f"entry indices must be nonnegative, got {key!r}")
            value = _as_clean_float(v, f"weight value at {key}")
            if value != 0.0:
                cleaned[(int(j), int(k))] = value
        object.__setattr__(self, "entries", cleaned)
        object.__setattr__(
            self, "tail_bound", _as_clean_float(self.tail_bound, "tail_bound")
        )
        if self.column_sums is not None:
            sums = {}
            for k, v in dict(self.column_sums).items():
                value = _as_clean_float(v, f"column sum at {k}")
                listed = self._listed_colsum(int(k))
                if value + _REL_TOL * max(1.0, value) < listed:
                    raise ValueError(
                        f"column sum {value} at k={k} is below the listed sum {listed}"
                    )
                sums[int(k)] = value
            object.__setattr__(self, "column_sums", sums)

    @classmethod
    def from_entries(cls, triples, tail_bound: float = 0.0) -> "Weight2D":
        """Build from an iterable of (j, k, value) triples."""
        entries = {}
        for j, k, v in triples:
            if (j, k) in entries:
                raise ValueError(f"duplicate entry for pair ({j}, {k})")
            entries[(j, k)] = v
        return cls(entries, tail_bound=tail_bound)

    @classmethod
    def from_weight1d(cls, u: Weight1D) -> "Weight2D":
        """Diagonal lift: w(k, k) = u(k), zero off the diagonal."""
        return cls({(k, k): v for k, v in u.values.items()})

    @classmethod
    def zero(cls) -> "Weight2D":
        return cls({})

    def __call__(self, j: int, k: int) -> float:
        return self.entries.get((int(j), int(k)), 0.0)

    def _listed_colsum(self, k: int) -> float:
        return sum(v for (j, kk), v in self.entries.items() if kk == k)

    def colsum(self, k: int) -> float:
        """Column sum sum_j w(j, k), using a supplied closed form if present."""
        k = int(k)
        if self.column_sums is not None and k in self.column_sums:
            return self.column_sums[k]
        return self._listed_colsum(k)

    def alpha(self) -> float:
        """sup_k colsum(k) + tail_bound; exact when tail_bound == 0."""
        columns = {k for (_, k) in self.entries}
        if self.column_sums is not None:
            columns |= set(self.column_sums)
        best = max((self.colsum(k) for k in columns), default=0.0)
        return best + self.tail_bound

    def row_slice(self, k: int) -> Weight1D:
        """The function m -> w(k, m) as one-dimensional weights."""
        values = {m: v for (j, m), v in self.entries.items() if j == int(k)}
        return Weight1D(values, sup_bound=self._slice_sup(values))

    def col_slice(self, k: int) -> Weight1D:
        """The function j -> w(j, k) as one-dimensional weights."""
        values = {j: v for (j, m), v in self.entries.items() if m == int(k)}
        return Weight1D(values, sup_bound=self._slice_sup(values))

    def _slice_sup(self, values: dict) -> float:
        listed = max(values.values(), default=0.0)
        if self.tail_bound == 0.0 and not self._has_unlisted_mass():
            return listed
        # any single unlisted entry is dominated by the unaccounted column mass
        return listed + self._unlisted_mass_bound()

    def _has_unlisted_mass(self) -> bool:
        if self.column_sums is None:
            return False
        return any(
            self.column_sums[k] > self._listed_colsum(k) for k in self.column_sums
        )

    def _unlisted_mass_bound(self) -> float:
        slack = 0.0
        if self.column_sums is not None:
            slack = max(
                (self.column_sums[k] - self._listed_colsum(k) for k in self.column_sums),
                default=0.0,
            )
        return max(slack, 0.0) + self.tail_bound

    def theta(self, sigma) -> float:
        """Spectral value of the weighted number operator at sigma.

        Computed by splitting the double sum over rows and columns hitting
        sigma: the diagonal part contributes w(j, j) for j in sigma, and each
        column k in sigma contributes its total mass minus the part whose row
        index also lies in sigma (counted once via the diagonal).
        """
        mask = _mask_of(sigma)
        total = 0.0
        for k in Subset(mask):
            total += self.entries.get((k, k), 0.0)
            inside = sum(
                v for (j, kk), v in self.entries.items() if kk == k and mask >> j & 1
            )
            total += self.colsum(k) - inside
        return total

    def theta_vector(self, n: int) -> np.ndarray:
        """theta over the full truncated basis, length 2**n.

        Same rearrangement as :meth:`theta`, vectorized: per-index subset sums
        of w(k,k) + colsum(k), minus the quadratic part over listed entries
        with both indices inside sigma.
        """
        n = check_truncation(n)
        size = 1 << n
        masks = np.arange(size, dtype=np.int64)
        out = np.zeros(size, dtype=float)
        for k in range(n):
            inside_k = (masks >> k & 1).astype(bool)
            out[inside_k] += self.entries.get((k, k), 0.0) + self.colsum(k)
        for (j, k), v in self.entries.items():
            if j < n and k < n:
                both = ((masks >> j & 1) & (masks >> k & 1)).astype(bool)
                out[both] -= v
        return out

    def support_bound(self) -> int:
        """1 + largest index appearing in entries or column_sums (0 if none)."""
        best = -1
        for j, k in self.entries:
            best = max(best, j, k)
        if self.column_sums is not None:
            best = max(best, max(self.column_sums, default=-1))
        return 1 + best

    def is_exact(self) -> bool:
        """True when all mass is listed: no tail, no closed-form slack."""
        return self.tail_bound == 0.0 and not self._has_unlisted_mass()

    def is_diagonal(self) -> bool:
        return all(j == k for (j, k) in self.entries)

    def to_json(self) -> dict:
        data = {
            "kind": "dense",
            "entries": [
                [j, k, self.entries[(j, k)]] for (j, k) in sorted(self.entries)
            ],
            "tail_bound": self.tail_bound,
        }
        if self.column_sums is None:
            data["column_sums"] = "from_entries"
        else:
            data["column_sums"] = {str(k): self.column_sums[k] for k in sorted(self.column_sums)}
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Weight2D":
        kind = data.get("kind")
        if kind == "diag1d":
            return cls.from_weight1d(Weight1D.from_json(data))
        if kind != "dense":
            raise ValueError(f"expected kind 'dense' or 'diag1d', got {kind!r}")
        entries = {}
        for item in data.get("entries", []):
            if len(item) != 3:
                raise ValueError(f"dense entry must be [j, k, value], got {item!r}")
            j, k, v = item
            if (int(j), int(k)) in entries:
                raise ValueError(f"duplicate entry for pair ({j}, {k})")
            entries[(int(j), int(k))] = v
        sums = data.get("column_sums", "from_entries")
        if sums == "from_entries":
            column_sums = None
        elif isinstance(sums, dict):
            column_sums = {int(k): v for k, v in sums.items()}
        else:
            raise ValueError(f"column_sums must be 'from_entries' or a mapping, got {sums!r}")
        return cls(entries, column_sums=column_sums, tail_bound=data.get("tail_bound", 0.0))


def theta_double_sum(w: Weight2D, sigma) -> float:
    """Literal double-sum evaluation of theta, term by term.

    Slower than :meth:`Weight2D.theta` and unable to use closed-form column
    sums, but independent of the rearranged formula; kept as the oracle the
    verification suite compares against.
    """
    mask = _mask_of(sigma)
    total = 0.0
    for (j, k), v in sorted(w.entries.items()):
        inside_j = mask >> j & 1
        inside_k = mask >> k & 1
        if j == k:
            total += v * inside_j
        else:
            total += v * inside_k * (1 - inside_j)
    return total
