"""Result tables: dimension vectors, Hodge diamonds and spectral-sequence pages."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, List, Sequence, Tuple


@dataclass(frozen=True)
class DimVector:
    """Dimensions indexed by ``k = 0..2n``."""

    n: int
    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if self.n < 0:
            raise ValueError("dimension must be nonnegative")
        if len(dims) != 2 * self.n + 1:
            raise ValueError(f"a DimVector over n={self.n} needs {2 * self.n + 1} entries, got {len(dims)}")
        if any(d < 0 for d in dims):
            raise ValueError("dimensions must be nonnegative")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def of(cls, values: Sequence[int]) -> "DimVector":
        """Infer ``n`` from an odd-length sequence."""
        if len(values) % 2 != 1:
            raise ValueError(f"a dimension vector has odd length 2n+1, got {len(values)}")
        return cls((len(values) - 1) // 2, tuple(values))

    @classmethod
    def zero(cls, n: int) -> "DimVector":
        return cls(n, (0,) * (2 * n + 1))

    def __getitem__(self, k: int) -> int:
        """``dims[k]``; zero outside ``0..2n``."""
        if 0 <= k <= 2 * self.n:
            return self.dims[k]
        return 0

    def __len__(self):
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def as_list(self) -> List[int]:
        return list(self.dims)


@dataclass(frozen=True)
class HodgeDiamond:
    """``h[p][q]`` for ``0 <= p, q <= n``."""

    n: int
    h: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.h)
        if len(rows) != self.n + 1 or any(len(r) != self.n + 1 for r in rows):
            raise ValueError(f"a Hodge diamond over n={self.n} is an {self.n + 1}x{self.n + 1} table")
        if any(x < 0 for r in rows for x in r):
            raise ValueError("Hodge numbers must be nonnegative")
        object.__setattr__(self, "h", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "HodgeDiamond":
        return cls(len(rows) - 1, tuple(tuple(r) for r in rows))

    @classmethod
    def torus(cls, n: int) -> "HodgeDiamond":
        return cls(n, tuple(tuple(comb(n, p) * comb(n, q) for q in range(n + 1)) for p in range(n + 1)))

    @classmethod
    def projective_space(cls, n: int) -> "HodgeDiamond":
        return cls(n, tuple(tuple(int(p == q) for q in range(n + 1)) for p in range(n + 1)))

    def __getitem__(self, pq: Tuple[int, int]) -> int:
        p, q = pq
        if 0 <= p <= self.n and 0 <= q <= self.n:
            return self.h[p][q]
        return 0

    def as_lists(self) -> List[List[int]]:
        return [list(r) for r in self.h]

    def row_sums_by_offset(self) -> Dict[int, int]:
        """``{p - q: sum of h[p][q]}``."""
        out: Dict[int, int] = {}
        for p in range(self.n + 1):
            for q in range(self.n + 1):
                out[p - q] = out.get(p - q, 0) + self.h[p][q]
        return out

    def pyramid_rows(self) -> List[List[int]]:
        """Rows of the usual picture: row m lists ``h^{p,q}`` with ``p + q = m``, p descending."""
        rows = []
        for m in range(2 * self.n + 1):
            row = [self.h[p][m - p] for p in range(min(m, self.n), max(0, m - self.n) - 1, -1)]
            rows.append(row)
        return rows


@dataclass(frozen=True)
class PageTable:
    """Page ``E_r`` of a spectral sequence: ``e[(s, t)]`` and ranks of ``d_r`` out of ``(s, t)``."""

    n: int
    r: int
    e: Dict[Tuple[int, int], int] = field(default_factory=dict)
    d_ranks: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def total(self, k: int) -> int:
        return sum(v for (s, t), v in self.e.items() if s + t == k)

    def totals(self) -> List[int]:
        return [self.total(k) for k in range(2 * self.n + 1)]

    def nonzero_differentials(self) -> List[Tuple[int, int]]:
        return sorted(st for st, v in self.d_ranks.items() if v)


def check_duality(dv: DimVector) -> bool:
    """``dims[k] == dims[2n - k]`` for all k."""
    return all(dv.dims[k] == dv.dims[2 * dv.n - k] for k in range(2 * dv.n + 1))


def euler_characteristic(dv: DimVector) -> int:
    return sum((-1) ** k * d for k, d in enumerate(dv.dims))


def convolve(a: Iterable[int], b: Iterable[int]) -> List[int]:
    a, b = list(a), list(b)
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out
