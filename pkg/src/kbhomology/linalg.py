"""Exact arithmetic over the Gaussian rationals Q(i) and sparse exact matrices.

Every cohomology dimension in the package is a rank computed here, so there is
no floating point anywhere.  Elimination is plain pivoted Gauss on sparse rows;
when a matrix has no imaginary entries it is eliminated over ``Fraction``
directly, which is several times faster than carrying complex pairs around.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Scalar = Union["GaussianRational", int, Fraction]


class GaussianRational:
    """An exact element ``re + im*i`` of Q(i).

    Both parts are :class:`fractions.Fraction`, so they are always in lowest
    terms with a positive denominator.  Instances are immutable.
    """

    __slots__ = ("_re", "_im")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("cannot combine a GaussianRational with an imaginary part")
            re, im = re.re, re.im
        object.__setattr__(self, "_re", Fraction(re))
        object.__setattr__(self, "_im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Rational)):
            return cls(Fraction(x))
        if isinstance(x, complex):
            raise TypeError("floating-point complex numbers are not exact; pass GaussianRational")
        raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")

    def is_real(self) -> bool:
        return self._im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self._re, -self._im)

    def norm(self) -> Fraction:
        return self._re * self._re + self._im * self._im

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re + o._re, self._im + o._im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re - o._re, self._im - o._im)

    def __rsub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self._re * o._re - self._im * o._im,
            self._re * o._im + self._im * o._re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * o.conjugate()
        return GaussianRational(num._re / nrm, num._im / nrm)

    def __rtruediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self._re, -self._im)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self._re) or bool(self._im)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self._re == o._re and self._im == o._im

    def __hash__(self):
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return format_scalar(self)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def gr(re=0, im=0) -> GaussianRational:
    """Shorthand constructor."""
    return GaussianRational(re, im)


def _fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_scalar(c: GaussianRational) -> str:
    """Render ``c`` as ``3/2``, ``-2i``, ``1+1/2i`` and so on."""
    re, im = c.re, c.im
    if im == 0:
        return _fmt_rational(re)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = _fmt_rational(im) + "i"
    if re == 0:
        return ims
    sign = "" if ims.startswith("-") else "+"
    return f"{_fmt_rational(re)}{sign}{ims}"


# ---------------------------------------------------------------------------
# sparse matrices


@dataclass(frozen=True)
class SparseMatrix:
    """A ``rows x cols`` matrix over Q(i) storing only nonzero entries."""

    rows: int
    cols: int
    entries: Mapping[Tuple[int, int], GaussianRational] = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix shape must be nonnegative")
        clean: Dict[Tuple[int, int], GaussianRational] = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i}, {j}) outside a {self.rows}x{self.cols} matrix")
            v = GaussianRational.coerce(v)
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> "SparseMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def to_dense(self) -> List[List[GaussianRational]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self) -> Dict[int, Dict[int, GaussianRational]]:
        rows: Dict[int, Dict[int, GaussianRational]] = {}
        for (i, j), v in self.entries.items():
            rows.setdefault(i, {})[j] = v
        return rows

    def matvec(self, v: Sequence[Scalar]) -> List[GaussianRational]:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        out = [ZERO] * self.rows
        for (i, j), a in self.entries.items():
            if v[j]:
                out[i] = out[i] + a * v[j]
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        right = other.row_dicts()
        acc: Dict[Tuple[int, int], GaussianRational] = {}
        for (i, k), a in self.entries.items():
            for j, b in right.get(k, {}).items():
                acc[(i, j)] = acc.get((i, j), ZERO) + a * b
        return SparseMatrix(self.rows, other.cols, acc)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "SparseMatrix":
        rmap = {r: a for a, r in enumerate(row_idx)}
        cmap = {c: b for b, c in enumerate(col_idx)}
        ent = {
            (rmap[i], cmap[j]): v
            for (i, j), v in self.entries.items()
            if i in rmap and j in cmap
        }
        return SparseMatrix(len(row_idx), len(col_idx), ent)

    def is_zero(self) -> bool:
        return not self.entries


# ---------------------------------------------------------------------------
# elimination


def _field_rows(rows: Iterable[Mapping[int, GaussianRational]]):
    """Convert rows to Fraction entries when every entry is real."""
    rows = [r for r in rows if r]
    if all(v.im == 0 for r in rows for v in r.values()):
        return [{j: v.re for j, v in r.items()} for r in rows], True
    return [dict(r) for r in rows], False


def _reduce_into(row: dict, pivots: Dict[int, dict]) -> Optional[int]:
    """Reduce ``row`` in place against ``pivots``; return its new pivot column."""
    while row:
        c = min(row)
        piv = pivots.get(c)
        if piv is None:
            return c
        f = row[c]
        for j, v in piv.items():
            nv = row.get(j, 0) - f * v
            if nv:
                row[j] = nv
            else:
                row.pop(j, None)
    return None


class Echelon:
    """Incremental row echelon form.

    Rows are inserted one at a time; :attr:`rank` is always the rank of the
    rows seen so far.  The staircase ranks used by the spectral-sequence code
    rely on this prefix property.
    """

    def __init__(self):
        self.pivots: Dict[int, dict] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, row: Mapping) -> bool:
        r = dict(row)
        c = _reduce_into(r, self.pivots)
        if c is None:
            return False
        inv = 1 / r[c]
        self.pivots[c] = {j: v * inv for j, v in r.items()}
        return True


def _to_field(v: GaussianRational, real: bool):
    return v.re if real else v


def rank(m: SparseMatrix) -> int:
    """Exact rank of ``m`` over Q(i)."""
    if m.rows == 0 or m.cols == 0 or not m.entries:
        return 0
    # eliminate along the shorter side
    mat = m if m.rows <= m.cols else m.transpose()
    rows, _ = _field_rows(mat.row_dicts().values())
    rows.sort(key=len)
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def row_prefix_ranks(rows: Sequence[Mapping[int, GaussianRational]]) -> List[int]:
    """Ranks of the leading ``0, 1, ..., len(rows)`` rows, as a list."""
    frows, _ = _field_rows(rows)
    it = iter(frows)
    ech = Echelon()
    out = [0]
    for r in rows:
        if r:
            ech.add(next(it))
        out.append(ech.rank)
    return out


def rref(m: SparseMatrix):
    """Reduced row echelon data: ``(pivot_cols, rows)`` with unit pivots.

    ``rows`` maps pivot column to a dict row whose only pivot-column entry is
    the leading 1.  Entries are Fractions when the matrix is real, else
    :class:`GaussianRational`.
    """
    frows, real = _field_rows(m.row_dicts().values())
    frows.sort(key=len)
    ech = Echelon()
    for r in frows:
        ech.add(r)
    pivots = ech.pivots
    # back substitution, highest pivot first
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for c2 in sorted(pivots):
            if c2 >= c:
                break
            other = pivots[c2]
            f = other.get(c)
            if f:
                for j, v in row.items():
                    nv = other.get(j, 0) - f * v
                    if nv:
                        other[j] = nv
                    else:
                        other.pop(j, None)
    return sorted(pivots), pivots, real


def kernel_basis(m: SparseMatrix) -> List[List[GaussianRational]]:
    """Basis of the right null space ``{v : m v = 0}`` as dense vectors."""
    pivot_cols, rows, _ = rref(m)
    pset = set(pivot_cols)
    basis = []
    for free in range(m.cols):
        if free in pset:
            continue
        v = [ZERO] * m.cols
        v[free] = ONE
        for c in pivot_cols:
            a = rows[c].get(free)
            if a:
                v[c] = -GaussianRational.coerce(a)
        basis.append(v)
    return basis


def nullity(m: SparseMatrix) -> int:
    return m.cols - rank(m)


def span_rank(vectors: Iterable[Sequence[Scalar]]) -> int:
    """Dimension of the span of the given dense vectors."""
    rows = []
    for v in vectors:
        rows.append({j: GaussianRational.coerce(x) for j, x in enumerate(v) if x})
    frows, _ = _field_rows(rows)
    ech = Echelon()
    for r in frows:
        ech.add(r)
    return ech.rank


def iter_nonzero(v: Sequence[Scalar]) -> Iterator[Tuple[int, Scalar]]:
    for j, x in enumerate(v):
        if x:
            yield j, x
