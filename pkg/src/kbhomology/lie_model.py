"""Invariant models of complex-parallelisable nilmanifolds.

A model is given by the structure equations ``d w^k`` of its left-invariant
holomorphic coframe, transcribed verbatim (signs included).  Everything else
is derived from them:

* ``del`` extends ``w^k -> d w^k`` as a graded derivation and kills barred
  generators;
* ``delbar`` uses the conjugate structure equations on barred generators and
  kills unbarred ones;
* the Lie bracket of the dual frame is ``[X_i, X_j] = sum_k c^k_ij X_k`` with
  ``<d w^k, X_i ^ X_j> = -c^k_ij``;
* ``d_pi = iota(pi) o del - del o iota(pi)`` is the Koszul-Brylinski operator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, NamedTuple, Optional, Tuple

from .exterior import (
    Form,
    Monomial,
    Polyvector,
    anchor,
    contract,
    mask_indices,
    monomial_wedge,
    pairing,
    popcount,
    pv_wedge,
)
from .linalg import ONE, ZERO, Echelon, GaussianRational

log = logging.getLogger(__name__)


class ModelError(ValueError):
    """Structurally invalid model data (bad indices, wrong bidegree)."""


class NotPoissonError(ValueError):
    """Raised when a bivector fails ``[pi, pi] = 0``; carries the 3-vector witness."""

    def __init__(self, witness: Polyvector, message: Optional[str] = None):
        self.witness = witness
        super().__init__(message or f"[pi, pi] = {witness} != 0, so pi is not Poisson")


class ConsistencyError(AssertionError):
    """Two routes to the same mathematical fact disagree; always a bug."""


class LieModel:
    """Structure equations ``d w^k`` of an n-dimensional complex Lie algebra dual.

    ``d_hol`` maps a generator index to a (2,0)-form; absent generators are
    closed.  Construction checks indices and bidegrees only; integrability is
    reported by :func:`validate`.
    """

    __slots__ = ("name", "n", "d_hol", "_hash")

    def __init__(self, name: str, n: int, d_hol: Mapping[int, Form] = None):
        if n < 1:
            raise ModelError("complex dimension must be at least 1")
        clean: Dict[int, Form] = {}
        for k, f in (d_hol or {}).items():
            if not (1 <= k <= n):
                raise ModelError(f"d w{k}: generator index outside 1..{n}")
            if f.n != n:
                raise ModelError(f"d w{k}: form lives over n={f.n}, model has n={n}")
            for m in f.terms:
                if m.bidegree != (2, 0):
                    raise ModelError(f"d w{k}: term {m} is not of bidegree (2,0)")
            if f:
                clean[k] = f
        self.name = name
        self.n = n
        self.d_hol = clean
        self._hash = hash((name, n, frozenset(clean.items())))

    def __eq__(self, other):
        if not isinstance(other, LieModel):
            return NotImplemented
        return self.name == other.name and self.n == other.n and self.d_hol == other.d_hol

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"LieModel({self.name!r}, n={self.n})"

    def d_of(self, k: int) -> Form:
        return self.d_hol.get(k, Form.zero(self.n))

    def dbar_of(self, k: int) -> Form:
        """``delbar w^{k bar}``: conjugate of ``d w^k`` with all indices barred."""
        return self.d_of(k).conjugate_barred()


def abelian(n: int) -> LieModel:
    return LieModel(f"torus{n}", n, {})


# ---------------------------------------------------------------------------
# derivations


def _derivation_on_mask(mask: int, images: Dict[int, Form], n: int) -> Form:
    """Extend generator images as a graded derivation over a single mask block.

    The block is either all unbarred or all barred generators; ``images`` is
    keyed by 1-based index and holds even-degree forms, so
    ``D(g1 ... gm) = sum_t (-1)^(t-1) D(g_t) ^ (g1 .. ^g_t .. gm)``.
    """
    out: Dict[Monomial, GaussianRational] = {}
    for pos, i in enumerate(mask_indices(mask)):
        img = images.get(i)
        if not img:
            continue
        rest = mask ^ (1 << (i - 1))
        for m, v in img.terms.items():
            out_m, s = _wedge_block(m, rest)
            if s == 0:
                continue
            if pos & 1:
                s = -s
            c = v if s > 0 else -v
            nv = out.get(out_m, ZERO) + c
            if nv:
                out[out_m] = nv
            else:
                out.pop(out_m, None)
    return Form._raw(n, out)


def _wedge_block(m: Monomial, rest: int) -> Tuple[Monomial, int]:
    """``m ^ w^rest`` where ``rest`` sits in the same block as ``m``'s nonempty part."""
    if m.hol:
        s, r = monomial_wedge(m, Monomial(rest, 0))
    else:
        s, r = monomial_wedge(m, Monomial(0, rest))
    return r, s


@lru_cache(maxsize=None)
def _del_hol(model: LieModel, hol: int) -> Form:
    return _derivation_on_mask(hol, model.d_hol, model.n)


@lru_cache(maxsize=None)
def _dbar_images(model: LieModel) -> Dict[int, Form]:
    return {k: model.dbar_of(k) for k in model.d_hol}


@lru_cache(maxsize=None)
def _delbar_anti(model: LieModel, anti: int) -> Form:
    return _derivation_on_mask(anti, _dbar_images(model), model.n)


def _attach_anti(f: Form, anti: int, out: Dict[Monomial, GaussianRational], coeff: GaussianRational):
    """Accumulate ``coeff * f ^ w^{anti bar}`` for a purely holomorphic f."""
    for m, v in f.terms.items():
        if m.anti:
            raise ConsistencyError("expected a purely holomorphic form")
        key = Monomial(m.hol, anti)
        nv = out.get(key, ZERO) + v * coeff
        if nv:
            out[key] = nv
        else:
            out.pop(key, None)


def _attach_hol(hol: int, f: Form, out: Dict[Monomial, GaussianRational], coeff: GaussianRational):
    """Accumulate ``coeff * w^hol ^ f`` for a purely antiholomorphic f."""
    for m, v in f.terms.items():
        key = Monomial(hol, m.anti)
        nv = out.get(key, ZERO) + v * coeff
        if nv:
            out[key] = nv
        else:
            out.pop(key, None)


def del_(model: LieModel, a: Form) -> Form:
    """Holomorphic differential; kills barred generators."""
    _same_n(model, a)
    out: Dict[Monomial, GaussianRational] = {}
    for m, v in a.terms.items():
        if m.hol:
            _attach_anti(_del_hol(model, m.hol), m.anti, out, v)
    return Form._raw(model.n, out)


def delbar(model: LieModel, a: Form) -> Form:
    """Antiholomorphic differential: ``delbar(w^I ^ w^Jb) = (-1)^|I| w^I ^ delbar w^Jb``."""
    _same_n(model, a)
    out: Dict[Monomial, GaussianRational] = {}
    for m, v in a.terms.items():
        if m.anti:
            c = -v if popcount(m.hol) & 1 else v
            _attach_hol(m.hol, _delbar_anti(model, m.anti), out, c)
    return Form._raw(model.n, out)


def d_full(model: LieModel, a: Form) -> Form:
    return del_(model, a) + delbar(model, a)


def _same_n(model: LieModel, a: Form):
    if a.n != model.n:
        raise ModelError(f"form over n={a.n} used with a model of dimension {model.n}")


@lru_cache(maxsize=None)
def _d_pi_hol(model: LieModel, pi: Polyvector, hol: int) -> Form:
    w = Form.basis(model.n, Monomial(hol, 0))
    return contract(pi, _del_hol(model, hol)) - del_(model, contract(pi, w))


def d_pi(model: LieModel, pi: Polyvector, a: Form) -> Form:
    """Koszul-Brylinski operator ``[iota(pi), del]``, bidegree ``(-1, 0)``."""
    _same_n(model, a)
    if pi.n != model.n:
        raise ModelError(f"bivector over n={pi.n} used with a model of dimension {model.n}")
    if pi.pure_degree() not in (None, 2):
        raise ModelError("d_pi needs a bivector")
    out: Dict[Monomial, GaussianRational] = {}
    for m, v in a.terms.items():
        _attach_anti(_d_pi_hol(model, pi, m.hol), m.anti, out, v)
    return Form._raw(model.n, out)


def all_monomials(n: int):
    for h in range(1 << n):
        for a in range(1 << n):
            yield Monomial(h, a)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    model: str
    ok: bool
    failures: Dict[int, Form] = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def validate(model: LieModel) -> ValidationReport:
    """Check ``del^2 w^k = 0`` for every generator (the Jacobi identity)."""
    failures = {}
    for k in range(1, model.n + 1):
        dd = del_(model, model.d_of(k))
        if dd:
            failures[k] = dd
    return ValidationReport(model.name, not failures, failures)


def require_valid(model: LieModel) -> None:
    rep = validate(model)
    if not rep.ok:
        k, f = next(iter(rep.failures.items()))
        raise ModelError(f"model {model.name} is not integrable: d(d w{k}) = {f}")


# ---------------------------------------------------------------------------
# Lie and Schouten brackets


@lru_cache(maxsize=None)
def structure_constants(model: LieModel) -> Dict[Tuple[int, int], Dict[int, GaussianRational]]:
    """``{(i, j): {k: c^k_ij}}`` for ``i < j`` with nonzero brackets."""
    out: Dict[Tuple[int, int], Dict[int, GaussianRational]] = {}
    for k, f in model.d_hol.items():
        for m, v in f.terms.items():
            i, j = mask_indices(m.hol)
            out.setdefault((i, j), {})[k] = -v
    return out


def lie_bracket(model: LieModel, i: int, j: int) -> Polyvector:
    """``[X_i, X_j]`` as a degree-1 polyvector."""
    n = model.n
    if i == j:
        return Polyvector.zero(n)
    sign = 1
    if i > j:
        i, j, sign = j, i, -1
    consts = structure_constants(model).get((i, j), {})
    return Polyvector(n, {1 << (k - 1): c * sign for k, c in consts.items()})


def _schouten_masks(model: LieModel, ma: int, mb: int) -> Polyvector:
    n = model.n
    out = Polyvector.zero(n)
    ia, ib = mask_indices(ma), mask_indices(mb)
    for s, i in enumerate(ia):
        rest_a = Polyvector(n, {ma ^ (1 << (i - 1)): ONE})
        for t, j in enumerate(ib):
            br = lie_bracket(model, i, j)
            if not br:
                continue
            rest_b = Polyvector(n, {mb ^ (1 << (j - 1)): ONE})
            term = pv_wedge(pv_wedge(br, rest_a), rest_b)
            out = out + (term if (s + t) % 2 == 0 else -term)
    return out


def schouten(a: Polyvector, b: Polyvector, model: LieModel) -> Polyvector:
    """Schouten bracket of constant-coefficient polyvectors.

    On decomposables ``[X_1..X_a, Y_1..Y_b] = sum (-1)^(i+j) [X_i, Y_j] ^
    X_1..^X_i..X_a ^ Y_1..^Y_j..Y_b``; constants are central.
    """
    if a.n != model.n or b.n != model.n:
        raise ModelError("polyvector dimension does not match the model")
    out = Polyvector.zero(model.n)
    for ma, va in a.terms.items():
        for mb, vb in b.terms.items():
            br = _schouten_masks(model, ma, mb)
            if br:
                out = out + br.scale(va * vb)
    return out


def b_pi(model: LieModel, pi: Polyvector, q: Polyvector) -> Polyvector:
    """Lichnerowicz-Poisson differential ``[pi, -]``."""
    return schouten(pi, q, model)


# ---------------------------------------------------------------------------
# Lie derivative and the bracket on 1-forms


def vector_contract(v: Polyvector, a: Form) -> Form:
    if v.pure_degree() not in (None, 1):
        raise ModelError("expected a vector field")
    return contract(v, a)


def lie_derivative(model: LieModel, v: Polyvector, a: Form) -> Form:
    """``L_v = iota(v) o del + del o iota(v)`` on holomorphic forms."""
    return vector_contract(v, del_(model, a)) + del_(model, vector_contract(v, a))


def form_bracket(model: LieModel, pi: Polyvector, alpha: Form, beta: Form) -> Form:
    """``[alpha, beta]_pi = L_{pi#alpha} beta - L_{pi#beta} alpha - del(pi(alpha, beta))``."""
    for f in (alpha, beta):
        for m in f.terms:
            if m.bidegree != (1, 0):
                raise ModelError(f"form_bracket needs (1,0)-forms, got bidegree {m.bidegree}")
    pa = anchor(pi, alpha)
    pb = anchor(pi, beta)
    scalar = Form(model.n, {Monomial(0, 0): pairing(pi, alpha, beta)})
    return lie_derivative(model, pa, beta) - lie_derivative(model, pb, alpha) - del_(model, scalar)


def generator(n: int, k: int) -> Form:
    return Form.monomial(n, hol=(k,))


def anchor_defect(model: LieModel, pi: Polyvector) -> Dict[Tuple[int, int], Polyvector]:
    """Nonzero values of ``[pi#a, pi#b] - pi#[a, b]_pi`` over generator pairs.

    For invariant data this vanishes for all pairs exactly when ``[pi, pi] = 0``,
    which gives an operator-level route to the Poisson condition that does
    not go through the Schouten formula.
    """
    n = model.n
    out = {}
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            wa, wb = generator(n, a), generator(n, b)
            lhs = schouten(anchor(pi, wa), anchor(pi, wb), model)
            rhs = anchor(pi, form_bracket(model, pi, wa, wb))
            diff = lhs - rhs
            if diff:
                out[(a, b)] = diff
    return out


# ---------------------------------------------------------------------------
# Poisson condition


class PoissonCheck(NamedTuple):
    is_poisson: bool
    witness: Polyvector
    d_pi_squared_zero: bool


def _d_pi_squared_zero(model: LieModel, pi: Polyvector) -> bool:
    n = model.n
    for h in range(1 << n):
        once = _d_pi_hol(model, pi, h)
        if d_pi(model, pi, once):
            return False
    return True


def check_poisson(model: LieModel, pi: Polyvector) -> PoissonCheck:
    """Decide ``[pi, pi]_S = 0``.

    The Schouten test is authoritative.  Two operator-level routes are
    cross-checked: the anchor-morphism defect must vanish exactly when the
    Schouten square does, and a Poisson ``pi`` must give ``d_pi^2 = 0``.
    The converse of the last one fails on invariant forms (the 3-vector
    ``[pi, pi]`` can act trivially there), so ``d_pi_squared_zero`` is
    reported but never overrides the verdict.
    """
    if pi.n != model.n:
        raise ModelError("bivector dimension does not match the model")
    if pi.pure_degree() not in (None, 2):
        raise ModelError("check_poisson needs a bivector")
    witness = schouten(pi, pi, model)
    ok = not witness
    sq_zero = _d_pi_squared_zero(model, pi)
    if ok and not sq_zero:
        raise ConsistencyError("[pi, pi] = 0 but d_pi o d_pi != 0 on invariant forms")
    defect = anchor_defect(model, pi)
    if ok == bool(defect):
        raise ConsistencyError(
            f"Schouten test says poisson={ok} but anchor-morphism defect is {defect or 0}"
        )
    return PoissonCheck(ok, witness, sq_zero)


def require_poisson(model: LieModel, pi: Polyvector) -> None:
    res = check_poisson(model, pi)
    if not res.is_poisson:
        raise NotPoissonError(res.witness)


# ---------------------------------------------------------------------------
# structural properties


def is_nilpotent(model: LieModel) -> bool:
    """True when the lower central series of the dual Lie algebra reaches 0."""
    n = model.n
    current = [{i: ONE} for i in range(1, n + 1)]
    while current:
        images = []
        for x in range(1, n + 1):
            for v in current:
                acc: Dict[int, GaussianRational] = {}
                for j, c in v.items():
                    for bit, cc in lie_bracket(model, x, j).terms.items():
                        (k,) = mask_indices(bit)
                        acc[k] = acc.get(k, ZERO) + c * cc
                acc = {k: c for k, c in acc.items() if c}
                if acc:
                    images.append(acc)
        nxt = _basis_rows(images)
        if len(nxt) == len(current):
            return False
        current = nxt
    return True


def _basis_rows(vectors: List[Dict[int, GaussianRational]]) -> List[Dict[int, GaussianRational]]:
    ech = Echelon()
    for v in vectors:
        ech.add(dict(v))
    return [{j: GaussianRational.coerce(c) for j, c in row.items()} for row in ech.pivots.values()]
