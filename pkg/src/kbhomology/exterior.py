"""Bigraded exterior algebra on w^1..w^n, w^1b..w^nb and polyvectors on X_1..X_n.

Generators are ordered globally as ``w^1 < ... < w^n < w^1b < ... < w^nb``.
A :class:`Monomial` is a pair of bitmasks (bit ``i-1`` stands for index ``i``)
and never carries a sign; signs live in the coefficients of a :class:`Form`.

Contraction by a decomposable polyvector follows one fixed order::

    iota(X_a ^ X_b) = iota(X_b) o iota(X_a)

so that ``iota(X_1 ^ X_2) w^12 = +1``.  With this choice the pairing
``<w^a ^ w^b, X_a ^ X_b> = 1`` agrees with evaluating a 2-form on a pair of
vectors, and the Koszul-Brylinski identities for the six-dimensional
nilmanifold model come out with the published signs (see the golden tests).
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Tuple

from .linalg import ONE, ZERO, GaussianRational, format_scalar


class Monomial(NamedTuple):
    hol: int
    anti: int

    @property
    def bidegree(self) -> Tuple[int, int]:
        return popcount(self.hol), popcount(self.anti)

    @property
    def degree(self) -> int:
        return popcount(self.hol) + popcount(self.anti)

    def hol_indices(self) -> List[int]:
        return mask_indices(self.hol)

    def anti_indices(self) -> List[int]:
        return mask_indices(self.anti)

    def __str__(self):
        return render_monomial(self)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_indices(mask: int) -> List[int]:
    """1-based indices of the set bits, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"generator index must be >= 1, got {i}")
        bit = 1 << (i - 1)
        if m & bit:
            raise ValueError(f"repeated generator index {i}")
        m |= bit
    return m


def merge_sign(a: int, b: int) -> int:
    """Sign of sorting the word ``a`` followed by ``b`` (disjoint masks)."""
    inversions = 0
    while b:
        low = b & -b
        # bits of a strictly above this bit of b must hop over it
        inversions += popcount(a & ~((low << 1) - 1))
        b ^= low
    return -1 if inversions & 1 else 1


def masks_of_size(n: int, k: int) -> List[int]:
    """All ``k``-subsets of ``{1..n}`` as masks, in lexicographic index order."""
    from itertools import combinations

    return [mask_of(c) for c in combinations(range(1, n + 1), k)]


def monomial_wedge(x: Monomial, y: Monomial) -> Tuple[int, Monomial]:
    """``x ^ y`` as ``(sign, monomial)``; sign 0 when a generator repeats."""
    if x.hol & y.hol or x.anti & y.anti:
        return 0, Monomial(0, 0)
    s = merge_sign(x.hol, y.hol) * merge_sign(x.anti, y.anti)
    if popcount(x.anti) & 1 and popcount(y.hol) & 1:
        s = -s
    return s, Monomial(x.hol | y.hol, x.anti | y.anti)


def _clean(terms: Mapping) -> Dict:
    out = {}
    for k, v in terms.items():
        v = GaussianRational.coerce(v)
        if v:
            out[k] = v
    return out


class Form:
    """Sparse linear combination of monomials with Q(i) coefficients."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, object] = None):
        self.n = n
        full = (1 << n) - 1
        clean = {}
        for m, v in (terms or {}).items():
            m = Monomial(*m)
            if m.hol & ~full or m.anti & ~full:
                raise ValueError(f"monomial {render_monomial(m)} uses an index above n={n}")
            v = GaussianRational.coerce(v)
            if v:
                clean[m] = v
        self.terms: Dict[Monomial, GaussianRational] = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: Dict[Monomial, GaussianRational]) -> "Form":
        f = object.__new__(cls)
        f.n = n
        f.terms = terms
        f._hash = None
        return f

    @classmethod
    def zero(cls, n: int) -> "Form":
        return cls._raw(n, {})

    @classmethod
    def monomial(cls, n: int, hol=(), anti=(), coeff=ONE) -> "Form":
        """The signed monomial ``w^{hol} ^ w^{anti}`` with indices in the given order."""
        sign = 1
        h = 0
        for i in hol:
            s, mon = monomial_wedge(Monomial(h, 0), Monomial(mask_of([i]), 0))
            if s == 0:
                return cls.zero(n)
            sign *= s
            h = mon.hol
        a = 0
        for j in anti:
            s, mon = monomial_wedge(Monomial(0, a), Monomial(0, mask_of([j])))
            if s == 0:
                return cls.zero(n)
            sign *= s
            a = mon.anti
        return cls(n, {Monomial(h, a): GaussianRational.coerce(coeff) * sign})

    @classmethod
    def basis(cls, n: int, m: Monomial) -> "Form":
        return cls._raw(n, {m: ONE})

    # algebra -------------------------------------------------------------

    def _check(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError(f"expected a Form, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"forms over different n ({self.n} vs {other.n})")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.terms)
        for m, v in other.terms.items():
            nv = out.get(m, ZERO) + v
            if nv:
                out[m] = nv
            else:
                out.pop(m, None)
        return Form._raw(self.n, out)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form._raw(self.n, {m: -v for m, v in self.terms.items()})

    def scale(self, c) -> "Form":
        c = GaussianRational.coerce(c)
        if not c:
            return Form.zero(self.n)
        return Form._raw(self.n, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, Form):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Form):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __iter__(self) -> Iterator[Tuple[Monomial, GaussianRational]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coefficient(self, m: Monomial) -> GaussianRational:
        return self.terms.get(Monomial(*m), ZERO)

    def bidegrees(self) -> set:
        return {m.bidegree for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len({m.degree for m in self.terms}) <= 1

    def conjugate_barred(self) -> "Form":
        """Swap barred and unbarred indices and conjugate coefficients."""
        out = {}
        for m, v in self.terms.items():
            # reordering anti block in front of hol block
            s = -1 if (popcount(m.hol) * popcount(m.anti)) & 1 else 1
            out[Monomial(m.anti, m.hol)] = v.conjugate() * s
        return Form._raw(self.n, out)

    def __repr__(self):
        return f"Form(n={self.n}, {render_form(self)})"

    def __str__(self):
        return render_form(self)


def wedge(a: Form, b: Form) -> Form:
    """Exterior product with the Koszul sign of the canonical reordering."""
    a._check(b)
    out: Dict[Monomial, GaussianRational] = {}
    for ma, va in a.terms.items():
        for mb, vb in b.terms.items():
            s, m = monomial_wedge(ma, mb)
            if s == 0:
                continue
            c = va * vb
            nv = out.get(m, ZERO) + (c if s > 0 else -c)
            if nv:
                out[m] = nv
            else:
                out.pop(m, None)
    return Form._raw(a.n, out)


class Polyvector:
    """Constant-coefficient element of the exterior algebra on X_1..X_n."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[int, object] = None):
        self.n = n
        full = (1 << n) - 1
        clean = {}
        for mask, v in (terms or {}).items():
            if mask & ~full:
                raise ValueError(f"polyvector index above n={n}")
            v = GaussianRational.coerce(v)
            if v:
                clean[mask] = v
        self.terms: Dict[int, GaussianRational] = clean
        self._hash = None

    @classmethod
    def _raw(cls, n, terms) -> "Polyvector":
        p = object.__new__(cls)
        p.n = n
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, n: int) -> "Polyvector":
        return cls._raw(n, {})

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int], coeff=ONE) -> "Polyvector":
        """``coeff * X_{i1} ^ X_{i2} ^ ...`` in the given (possibly unsorted) order."""
        sign = 1
        m = 0
        for i in indices:
            bit = mask_of([i])
            if m & bit:
                return cls.zero(n)
            sign *= merge_sign(m, bit)
            m |= bit
        return cls(n, {m: GaussianRational.coerce(coeff) * sign})

    @classmethod
    def bivector(cls, n: int, coeffs: Mapping[Tuple[int, int], object]) -> "Polyvector":
        """Sum of ``c * X_i ^ X_j`` over a mapping ``(i, j) -> c``."""
        out = cls.zero(n)
        for (i, j), c in coeffs.items():
            out = out + cls.from_indices(n, (i, j), c)
        return out

    @property
    def degrees(self) -> set:
        return {popcount(m) for m in self.terms}

    def pure_degree(self):
        """The common degree of all terms, ``None`` for zero, or raise."""
        ds = self.degrees
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError("polyvector is not homogeneous")
        return next(iter(ds))

    def _check(self, other):
        if not isinstance(other, Polyvector):
            raise TypeError(f"expected a Polyvector, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"polyvectors over different n ({self.n} vs {other.n})")

    def __add__(self, other: "Polyvector") -> "Polyvector":
        self._check(other)
        out = dict(self.terms)
        for m, v in other.terms.items():
            nv = out.get(m, ZERO) + v
            if nv:
                out[m] = nv
            else:
                out.pop(m, None)
        return Polyvector._raw(self.n, out)

    def __neg__(self):
        return Polyvector._raw(self.n, {m: -v for m, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Polyvector":
        c = GaussianRational.coerce(c)
        if not c:
            return Polyvector.zero(self.n)
        return Polyvector._raw(self.n, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, Polyvector):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __xor__(self, other):
        return pv_wedge(self, other)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Polyvector):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polyvector(n={self.n}, {render_polyvector(self)})"

    def __str__(self):
        return render_polyvector(self)


def pv_wedge(a: Polyvector, b: Polyvector) -> Polyvector:
    a._check(b)
    out: Dict[int, GaussianRational] = {}
    for ma, va in a.terms.items():
        for mb, vb in b.terms.items():
            if ma & mb:
                continue
            c = va * vb
            if merge_sign(ma, mb) < 0:
                c = -c
            m = ma | mb
            nv = out.get(m, ZERO) + c
            if nv:
                out[m] = nv
            else:
                out.pop(m, None)
    return Polyvector._raw(a.n, out)


# ---------------------------------------------------------------------------
# contractions


def contract_vector(i: int, a: Form) -> Form:
    """Interior product by the vector field X_i (a degree -1 derivation)."""
    bit = 1 << (i - 1)
    out = {}
    for m, v in a.terms.items():
        if not m.hol & bit:
            continue
        below = popcount(m.hol & (bit - 1))
        out[Monomial(m.hol ^ bit, m.anti)] = -v if below & 1 else v
    return Form._raw(a.n, out)


def _contract_mask(mask: int, m: Monomial):
    """Apply iota(X_{i_k}) o ... o iota(X_{i_1}) for the sorted indices of mask."""
    if mask & ~m.hol:
        return 0, m
    sign = 1
    hol = m.hol
    rest = mask
    while rest:
        bit = rest & -rest
        if popcount(hol & (bit - 1)) & 1:
            sign = -sign
        hol ^= bit
        rest ^= bit
    return sign, Monomial(hol, m.anti)


def contract(pi: Polyvector, a: Form) -> Form:
    """Interior product of a form by a homogeneous polyvector.

    ``iota(X_{i1} ^ ... ^ X_{ik})`` contracts ``X_{i1}`` first.  For a
    bivector this lowers bidegree by ``(2, 0)``.
    """
    if pi.n != a.n:
        raise ValueError(f"polyvector over n={pi.n} but form over n={a.n}")
    pi.pure_degree()
    out: Dict[Monomial, GaussianRational] = {}
    for mask, c in pi.terms.items():
        for m, v in a.terms.items():
            s, mm = _contract_mask(mask, m)
            if s == 0:
                continue
            val = c * v
            nv = out.get(mm, ZERO) + (val if s > 0 else -val)
            if nv:
                out[mm] = nv
            else:
                out.pop(mm, None)
    return Form._raw(a.n, out)


def anchor(pi: Polyvector, alpha: Form) -> Polyvector:
    """``pi#(alpha)``: contract a (1,0)-form into the first slot of a bivector.

    For ``pi = X_a ^ X_b``: ``pi#(w^a) = X_b`` and ``pi#(w^b) = -X_a``.  Then
    ``pi(alpha, beta) = beta(pi#(alpha)) = iota(pi)(alpha ^ beta)``.
    """
    if pi.n != alpha.n:
        raise ValueError(f"polyvector over n={pi.n} but form over n={alpha.n}")
    if pi.pure_degree() not in (None, 2):
        raise ValueError("anchor needs a bivector")
    for m in alpha.terms:
        if m.bidegree != (1, 0):
            raise ValueError(f"anchor needs a (1,0)-form, got a term of bidegree {m.bidegree}")
    out: Dict[int, GaussianRational] = {}
    for mask, c in pi.terms.items():
        first, second = mask_indices(mask)
        for m, v in alpha.terms.items():
            (k,) = mask_indices(m.hol)
            if k == first:
                tgt, val = second, c * v
            elif k == second:
                tgt, val = first, -(c * v)
            else:
                continue
            bit = 1 << (tgt - 1)
            nv = out.get(bit, ZERO) + val
            if nv:
                out[bit] = nv
            else:
                out.pop(bit, None)
    return Polyvector._raw(pi.n, out)


def pairing(pi: Polyvector, alpha: Form, beta: Form) -> GaussianRational:
    """``pi(alpha, beta)`` for (1,0)-forms, as a scalar."""
    v = anchor(pi, alpha)
    total = ZERO
    for bit, c in v.terms.items():
        total = total + c * beta.coefficient(Monomial(bit, 0))
    return total


def scalar_part(a: Form) -> GaussianRational:
    return a.coefficient(Monomial(0, 0))


# ---------------------------------------------------------------------------
# rendering


def _idx(indices: List[int]) -> str:
    if all(i < 10 for i in indices):
        return "".join(map(str, indices))
    return ",".join(map(str, indices))


def render_monomial(m: Monomial) -> str:
    """ASCII rendering: ``w^134``, ``w^12 ^ wb^35``, ``wb^2``, or ``1``."""
    parts = []
    if m.hol:
        parts.append("w^" + _idx(mask_indices(m.hol)))
    if m.anti:
        parts.append("wb^" + _idx(mask_indices(m.anti)))
    return " ^ ".join(parts) if parts else "1"


def _render_sum(items: List[Tuple[str, GaussianRational]]) -> str:
    if not items:
        return "0"
    out = []
    for k, (label, c) in enumerate(items):
        if c.im != 0 and c.re != 0:
            coef = "(" + format_scalar(c) + ")"
            sign = "+"
        else:
            neg = (c.re < 0) if c.im == 0 else (c.im < 0)
            sign = "-" if neg else "+"
            coef = format_scalar(-c if neg else c)
        if coef == "1" and label != "1":
            body = label
        elif label == "1":
            body = coef
        else:
            body = f"{coef} {label}"
        if k == 0:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def form_sort_key(m: Monomial):
    return (m.degree, popcount(m.hol), mask_indices(m.hol), mask_indices(m.anti))


def render_form(a: Form) -> str:
    items = [(render_monomial(m), a.terms[m]) for m in sorted(a.terms, key=form_sort_key)]
    return _render_sum(items)


def render_polyvector(p: Polyvector) -> str:
    keys = sorted(p.terms, key=lambda m: (popcount(m), mask_indices(m)))
    items = []
    for m in keys:
        idx = mask_indices(m)
        label = "^".join(f"X{i}" for i in idx) if idx else "1"
        items.append((label, p.terms[m]))
    return _render_sum(items)
