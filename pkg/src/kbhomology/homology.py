"""Cohomology engines for invariant models.

All complexes here are bounded double complexes ``C^{s,t}`` with a vertical
differential ``(s, t) -> (s, t+1)`` and a horizontal one ``(s, t) -> (s+1, t)``,
filtered by ``s``.  Total cohomology and every spectral-sequence page are read
off from exact ranks of "staircase" submatrices of the total differential:

    rho_k(a, b) = rank of D_k from F^a C^k into C^{k+1} / F^b C^{k+1}

With ``Z_r^s = F^s ∩ D^{-1} F^{s+r}`` and ``B_r^s = F^s ∩ D F^{s-r}``,

    dim E_r^s      = z_r(s) - z_{r-1}(s+1) - b_{r-1}(s) + b_r(s+1)
    rank d_r out   = z_r(s) - z_{r+1}(s) - z_{r-1}(s+1) + z_r(s+1)

using ``Z_{r-1}^{s+1} ∩ B_{r-1}^s = B_r^{s+1}`` and
``Z_{r+1}^s ∩ Z_{r-1}^{s+1} = Z_r^{s+1}``.  For a fixed ``a`` every
``rho_k(a, b)`` comes out of one elimination pass with rows sorted by ``s``.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from math import comb
from typing import Callable, Dict, Hashable, List, NamedTuple, Sequence, Tuple

from .exterior import Form, Monomial, Polyvector, masks_of_size, popcount
from .lie_model import (
    ConsistencyError,
    LieModel,
    _d_pi_hol,
    _delbar_anti,
    b_pi,
    d_pi,
    require_poisson,
    require_valid,
)
from .linalg import ZERO, GaussianRational, SparseMatrix, rank, row_prefix_ranks
from .tables import DimVector, HodgeDiamond, PageTable, check_duality, euler_characteristic

log = logging.getLogger(__name__)

Label = Hashable
Image = Dict[Label, GaussianRational]


class DoubleComplex:
    """A bounded double complex given by bases and differential images.

    ``blocks[(s, t)]`` lists basis labels; ``vertical(label)`` and
    ``horizontal(label)`` return sparse images as ``{label: coeff}``.  The
    total differential is their plain sum, so the two must already
    anticommute.
    """

    def __init__(
        self,
        blocks: Dict[Tuple[int, int], List[Label]],
        vertical: Callable[[Label], Image],
        horizontal: Callable[[Label], Image],
        max_degree: int,
    ):
        self.blocks = {st: list(b) for st, b in blocks.items() if b}
        self.max_degree = max_degree
        self.s_max = max((s for s, _ in self.blocks), default=0)
        self.where: Dict[Label, Tuple[int, int]] = {}
        for st, labels in self.blocks.items():
            for lab in labels:
                self.where[lab] = st
        self.vert = {lab: vertical(lab) for lab in self.where}
        self.horiz = {lab: horizontal(lab) for lab in self.where}
        for lab in self.where:
            s, t = self.where[lab]
            for tgt in self.vert[lab]:
                if self.where.get(tgt) != (s, t + 1):
                    raise ConsistencyError(f"vertical map sends {lab} outside ({s}, {t + 1})")
            for tgt in self.horiz[lab]:
                if self.where.get(tgt) != (s + 1, t):
                    raise ConsistencyError(f"horizontal map sends {lab} outside ({s + 1}, {t})")
        # total-degree bases sorted by filtration index
        self.total_basis: Dict[int, List[Label]] = {}
        for k in range(max_degree + 1):
            labels = []
            for s in range(self.s_max + 1):
                labels.extend(self.blocks.get((s, k - s), []))
            self.total_basis[k] = labels
        self.index = {k: {lab: i for i, lab in enumerate(b)} for k, b in self.total_basis.items()}
        self._stair: Dict[Tuple[int, int], List[int]] = {}
        self._drank: Dict[int, int] = {}

    # -- basic data --------------------------------------------------------

    def dim(self, k: int) -> int:
        return len(self.total_basis.get(k, ()))

    def image(self, lab: Label) -> Image:
        out = dict(self.vert[lab])
        for tgt, v in self.horiz[lab].items():
            nv = out.get(tgt, ZERO) + v
            if nv:
                out[tgt] = nv
            else:
                out.pop(tgt, None)
        return out

    def total_matrix(self, k: int) -> SparseMatrix:
        """Matrix of ``D: C^k -> C^{k+1}`` in the sorted total bases."""
        src = self.total_basis.get(k, [])
        tgt_index = self.index.get(k + 1, {})
        ent = {}
        for c, lab in enumerate(src):
            for tgt, v in self.image(lab).items():
                ent[(tgt_index[tgt], c)] = v
        return SparseMatrix(len(tgt_index), len(src), ent)

    def assert_square_zero(self) -> None:
        """``D^2 = 0`` on every basis element, checked per component."""
        for lab in self.where:
            vv: Image = {}
            mixed: Image = {}
            hh: Image = {}
            for mid, a in self.vert[lab].items():
                _acc(vv, self.vert[mid], a)
                _acc(mixed, self.horiz[mid], a)
            for mid, a in self.horiz[lab].items():
                _acc(mixed, self.vert[mid], a)
                _acc(hh, self.horiz[mid], a)
            for name, img in (("vertical^2", vv), ("anticommutator", mixed), ("horizontal^2", hh)):
                if img:
                    raise ConsistencyError(f"{name} is nonzero on basis element {lab}: {img}")

    # -- ranks -------------------------------------------------------------

    def d_rank(self, k: int) -> int:
        if k not in self._drank:
            if k < 0 or k >= self.max_degree:
                self._drank[k] = 0
            else:
                self._drank[k] = rank(self.total_matrix(k))
        return self._drank[k]

    def f(self, k: int, s: int) -> int:
        """``dim F^s C^k``."""
        s = max(s, 0)
        return sum(len(self.blocks.get((u, k - u), ())) for u in range(s, self.s_max + 1))

    def _staircase(self, k: int, a: int) -> List[int]:
        """``[rho_k(a, b) for b = 0..s_max+1]``."""
        key = (k, a)
        if key in self._stair:
            return self._stair[key]
        smax = self.s_max
        out = [0] * (smax + 2)
        if 0 <= k < self.max_degree:
            cols = {}
            for c, lab in enumerate(self.total_basis[k]):
                if self.where[lab][0] >= a:
                    cols[lab] = c
            # rows of the submatrix, grouped by filtration index of the target
            rows_by_s: Dict[int, Dict[Label, Image]] = {}
            for lab in cols:
                for tgt, v in self.image(lab).items():
                    rows_by_s.setdefault(self.where[tgt][0], {}).setdefault(tgt, {})[cols[lab]] = v
            ordered = []
            bounds = []
            for s in range(smax + 1):
                ordered.extend(rows_by_s.get(s, {}).values())
                bounds.append(len(ordered))
            pref = row_prefix_ranks(ordered)
            for b in range(smax + 2):
                out[b] = 0 if b <= a else pref[bounds[b - 1]]
        self._stair[key] = out
        return out

    def rho(self, k: int, a: int, b: int) -> int:
        a = max(a, 0)
        b = min(b, self.s_max + 1)
        if b <= a or k < 0 or k >= self.max_degree:
            return 0
        return self._staircase(k, a)[b]

    def z(self, r: int, s: int, k: int) -> int:
        return self.f(k, s) - self.rho(k, s, s + r)

    def b(self, r: int, s: int, k: int) -> int:
        return self.rho(k - 1, s - r, self.s_max + 1) - self.rho(k - 1, s - r, s)

    def page_entry(self, r: int, s: int, k: int) -> int:
        return self.z(r, s, k) - self.z(r - 1, s + 1, k) - self.b(r - 1, s, k) + self.b(r, s + 1, k)

    def page_rank_out(self, r: int, s: int, k: int) -> int:
        return self.z(r, s, k) - self.z(r + 1, s, k) - self.z(r - 1, s + 1, k) + self.z(r, s + 1, k)

    # -- results -----------------------------------------------------------

    def cohomology(self) -> List[int]:
        return [self.dim(k) - self.d_rank(k) - self.d_rank(k - 1) for k in range(self.max_degree + 1)]

    def page(self, r: int, n: int) -> PageTable:
        e = {}
        d = {}
        for s in range(self.s_max + 1):
            for k in range(self.max_degree + 1):
                t = k - s
                if t < 0:
                    continue
                e[(s, t)] = self.page_entry(r, s, k)
                d[(s, t)] = self.page_rank_out(r, s, k)
        return PageTable(n, r, e, d)


def _acc(out: Image, img: Image, a: GaussianRational) -> None:
    for tgt, v in img.items():
        nv = out.get(tgt, ZERO) + a * v
        if nv:
            out[tgt] = nv
        else:
            out.pop(tgt, None)


# ---------------------------------------------------------------------------
# bases


def bidegree_basis(n: int, p: int, q: int) -> List[Monomial]:
    return [Monomial(h, a) for h in masks_of_size(n, p) for a in masks_of_size(n, q)]


# ---------------------------------------------------------------------------
# Dolbeault


def _dbar_image(model: LieModel, m: Monomial) -> Image:
    out: Image = {}
    if not m.anti:
        return out
    sign = -1 if popcount(m.hol) & 1 else 1
    for mm, v in _delbar_anti(model, m.anti).terms.items():
        out[Monomial(m.hol, mm.anti)] = v if sign > 0 else -v
    return out


def _dbar_matrix(model: LieModel, p: int, q: int) -> SparseMatrix:
    n = model.n
    src = bidegree_basis(n, p, q)
    tgt = bidegree_basis(n, p, q + 1)
    idx = {m: i for i, m in enumerate(tgt)}
    ent = {}
    for c, m in enumerate(src):
        for mm, v in _dbar_image(model, m).items():
            ent[(idx[mm], c)] = v
    return SparseMatrix(len(tgt), len(src), ent)


@lru_cache(maxsize=None)
def dolbeault_dims(model: LieModel) -> HodgeDiamond:
    """Lie-algebra Hodge numbers ``h^{p,q}`` of ``(Lambda^{p,*}, delbar)``."""
    require_valid(model)
    n = model.n
    ranks = {}
    for p in range(n + 1):
        for q in range(n):
            ranks[(p, q)] = rank(_dbar_matrix(model, p, q))
    h = []
    for p in range(n + 1):
        row = []
        for q in range(n + 1):
            dim = comb(n, p) * comb(n, q)
            row.append(dim - ranks.get((p, q), 0) - ranks.get((p, q - 1), 0))
        h.append(tuple(row))
    diamond = HodgeDiamond(n, tuple(h))
    for p in range(n + 1):
        for q in range(n + 1):
            if diamond.h[p][q] != comb(n, p) * diamond.h[0][q]:
                raise ConsistencyError(f"h^{p},{q} breaks the product law h^p,q = C(n,p) h^0,q")
    return diamond


def e1_sums(diamond: HodgeDiamond) -> List[int]:
    """``sum_{p - q = n - k} h^{p,q}`` for ``k = 0..2n``."""
    n = diamond.n
    offs = diamond.row_sums_by_offset()
    return [offs.get(n - k, 0) for k in range(2 * n + 1)]


# ---------------------------------------------------------------------------
# Koszul-Brylinski


def _kb_horizontal(model: LieModel, pi: Polyvector, m: Monomial) -> Image:
    out: Image = {}
    for mm, v in _d_pi_hol(model, pi, m.hol).terms.items():
        out[Monomial(mm.hol, m.anti)] = v
    return out


@lru_cache(maxsize=None)
def kb_complex(model: LieModel, pi: Polyvector) -> DoubleComplex:
    """Total complex of ``(Lambda^{p,q}, d_pi, delbar)`` with ``s = n - p``, ``t = q``.

    Validates the model and the Poisson condition, and checks ``D^2 = 0``.
    """
    require_valid(model)
    require_poisson(model, pi)
    n = model.n
    blocks = {(n - p, q): bidegree_basis(n, p, q) for p in range(n + 1) for q in range(n + 1)}
    cx = DoubleComplex(
        blocks,
        vertical=lambda m: _dbar_image(model, m),
        horizontal=lambda m: _kb_horizontal(model, pi, m),
        max_degree=2 * n,
    )
    cx.assert_square_zero()
    return cx


def kb_dims(model: LieModel, pi: Polyvector) -> DimVector:
    """``dim H_k`` of the total complex, ``k = n - p + q``."""
    cx = kb_complex(model, pi)
    return DimVector(model.n, tuple(cx.cohomology()))


# ---------------------------------------------------------------------------
# Lichnerowicz-Poisson


@lru_cache(maxsize=None)
def _b_pi_mask(model: LieModel, pi: Polyvector, mask: int) -> Dict[int, GaussianRational]:
    return dict(b_pi(model, pi, Polyvector(model.n, {mask: 1})).terms)


@lru_cache(maxsize=None)
def lp_complex(model: LieModel, pi: Polyvector) -> DoubleComplex:
    """Total complex of ``(Lambda^p g^{1,0} ⊗ Lambda^{0,q}, [pi, -], delbar)``.

    Elements are labelled ``(P, J)`` (polyvector mask, barred mask); ``s = p``,
    ``t = q``, and the vertical map carries the Koszul sign ``(-1)^p``.
    """
    require_valid(model)
    require_poisson(model, pi)
    n = model.n
    blocks = {
        (p, q): [(P, J) for P in masks_of_size(n, p) for J in masks_of_size(n, q)]
        for p in range(n + 1)
        for q in range(n + 1)
    }

    def vertical(lab):
        P, J = lab
        sign = -1 if popcount(P) & 1 else 1
        return {(P, m.anti): (v if sign > 0 else -v) for m, v in _delbar_anti(model, J).terms.items()}

    def horizontal(lab):
        P, J = lab
        return {(Q, J): v for Q, v in _b_pi_mask(model, pi, P).items()}

    cx = DoubleComplex(blocks, vertical, horizontal, max_degree=2 * n)
    cx.assert_square_zero()
    return cx


def lp_dims(model: LieModel, pi: Polyvector) -> DimVector:
    """``dim H^k`` of the Lichnerowicz-Poisson total complex, ``k = p + q``."""
    cx = lp_complex(model, pi)
    return DimVector(model.n, tuple(cx.cohomology()))


# ---------------------------------------------------------------------------
# spectral sequence and checks


def spectral_pages(model: LieModel, pi: Polyvector, r_max: int) -> List[PageTable]:
    """Pages ``E_1 .. E_{r_max}`` of the Dolbeault-Koszul-Brylinski spectral sequence.

    ``E_1^{s,t} = h^{n-s,t}`` and ``d_r`` has bidegree ``(r, 1 - r)``.
    """
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    cx = kb_complex(model, pi)
    pages = [cx.page(r, model.n) for r in range(1, r_max + 1)]
    _check_pages(cx, pages)
    return pages


def stable_page_index(model: LieModel) -> int:
    """A page index from which ``E_r = E_infinity`` (filtration length)."""
    return model.n + 1


def e_infinity(model: LieModel, pi: Polyvector) -> PageTable:
    cx = kb_complex(model, pi)
    return cx.page(stable_page_index(model), model.n)


def _check_pages(cx: DoubleComplex, pages: Sequence[PageTable]) -> None:
    for pg in pages:
        for (s, t), v in pg.e.items():
            if v < 0 or pg.d_ranks[(s, t)] < 0:
                raise ConsistencyError(f"negative entry on page {pg.r} at {(s, t)}")
    for cur, nxt in zip(pages, pages[1:]):
        r = cur.r
        for (s, t), v in cur.e.items():
            incoming = cur.d_ranks.get((s - r, t + r - 1), 0)
            expect = v - cur.d_ranks[(s, t)] - incoming
            if nxt.e[(s, t)] != expect:
                raise ConsistencyError(f"E_{r + 1}{(s, t)} != E_{r} - rank in - rank out")


class Degeneracy(NamedTuple):
    degenerate: bool
    defects: Tuple[int, ...]


def check_e1_degeneracy(model: LieModel, pi: Polyvector) -> Degeneracy:
    """``defect[k] = sum_{p-q=n-k} h^{p,q} - dim H_k``; degenerate iff all zero."""
    e1 = e1_sums(dolbeault_dims(model))
    kb = kb_dims(model, pi)
    defects = tuple(a - b for a, b in zip(e1, kb.dims))
    if any(d < 0 for d in defects):
        raise ConsistencyError(f"dim H_k exceeds the E_1 total at some k: {defects}")
    return Degeneracy(not any(defects), defects)


def check_unimodular(model: LieModel, pi: Polyvector) -> bool:
    """``d_pi`` of the holomorphic volume monomial ``w^{1..n}`` vanishes."""
    require_poisson(model, pi)
    vol = Form.basis(model.n, Monomial((1 << model.n) - 1, 0))
    return not d_pi(model, pi, vol)


def hodge_euler(diamond: HodgeDiamond) -> int:
    n = diamond.n
    return sum((-1) ** (n - p + q) * diamond.h[p][q] for p in range(n + 1) for q in range(n + 1))


__all__ = [
    "DoubleComplex",
    "Degeneracy",
    "bidegree_basis",
    "check_duality",
    "check_e1_degeneracy",
    "check_unimodular",
    "dolbeault_dims",
    "e1_sums",
    "e_infinity",
    "euler_characteristic",
    "hodge_euler",
    "kb_complex",
    "kb_dims",
    "lp_complex",
    "lp_dims",
    "spectral_pages",
    "stable_page_index",
]
