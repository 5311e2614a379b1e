import itertools
from math import comb

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from kbhomology.exterior import Form, Monomial, Polyvector, masks_of_size, popcount
from kbhomology.homology import (
    DoubleComplex,
    check_e1_degeneracy,
    check_unimodular,
    dolbeault_dims,
    e1_sums,
    e_infinity,
    hodge_euler,
    kb_complex,
    kb_dims,
    lp_complex,
    lp_dims,
    spectral_pages,
    stable_page_index,
)
from kbhomology.lie_model import (
    ConsistencyError,
    NotPoissonError,
    all_monomials,
    b_pi,
    check_poisson,
    d_pi,
    delbar,
)
from kbhomology.linalg import ONE
from kbhomology.modelfile import builtin, parse_model
from kbhomology.tables import HodgeDiamond, check_duality, convolve, euler_characteristic

I3 = builtin("iwasawa3")
NIL6 = builtin("nil6")
FIL4 = parse_model("model fil4; dim 4; d w3 = - w1^w2; d w4 = - w1^w3")[0]


def X(n, *idx, c=1):
    return Polyvector.from_indices(n, idx, c)


def biv(n, d):
    return Polyvector.bivector(n, d)


# -- Dolbeault ------------------------------------------------------------------


def test_iwasawa_diamond():
    h = dolbeault_dims(I3)
    assert h.as_lists() == [[1, 2, 2, 1], [3, 6, 6, 3], [3, 6, 6, 3], [1, 2, 2, 1]]
    assert h.pyramid_rows() == [[1], [3, 2], [3, 6, 2], [1, 6, 6, 1], [2, 6, 3], [2, 3], [1]]


def test_nil6_diamond():
    h = dolbeault_dims(NIL6)
    assert [h[0, q] for q in range(7)] == [1, 3, 5, 6, 5, 3, 1]
    for p, q in itertools.product(range(7), repeat=2):
        assert h[p, q] == comb(6, p) * h[0, q]
    assert h[5, 0] == 6 and h[6, 1] == 3 and h[3, 3] == 120


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_torus_diamond(n):
    assert dolbeault_dims(builtin(f"torus{n}")) == HodgeDiamond.torus(n)


def test_diamond_against_sympy_ranks():
    # independent rank computation for one model
    n = FIL4.n
    h = dolbeault_dims(FIL4)
    for q in range(n + 1):
        src = [Monomial(0, a) for a in masks_of_size(n, q)]

        def mat(q_):
            cols = [Monomial(0, a) for a in masks_of_size(n, q_)]
            rows = [Monomial(0, a) for a in masks_of_size(n, q_ + 1)]
            M = sympy.zeros(len(rows), len(cols))
            for j, m in enumerate(cols):
                for mm, v in delbar(FIL4, Form.basis(n, m)).terms.items():
                    M[rows.index(mm), j] = sympy.Rational(v.re.numerator, v.re.denominator)
            return M

        r_out = mat(q).rank() if q < n else 0
        r_in = mat(q - 1).rank() if q > 0 else 0
        assert h[0, q] == len(src) - r_out - r_in


# -- Koszul-Brylinski -------------------------------------------------------------


@pytest.mark.parametrize("c1,c3", [(1, 0), (0, 1), (1, 1), (2, -1)])
def test_iwasawa_kb(c1, c3):
    pi = biv(3, {(1, 2): c1, (2, 3): c3})
    assert kb_dims(I3, pi).dims == (1, 5, 11, 14, 11, 5, 1)


NIL6_TABLES = {
    "pi1": (X(6, 2, 3), (1, 9, 38, 101, 191, 274, 308)),
    "pi2": (X(6, 1, 6), (1, 6, 19, 42, 71, 96, 106)),
    "pi3": (X(6, 1, 3), (1, 8, 31, 78, 143, 202, 226)),
}


@pytest.mark.parametrize("name", NIL6_TABLES)
def test_nil6_kb(name):
    pi, low = NIL6_TABLES[name]
    kb = kb_dims(NIL6, pi)
    assert kb.dims[:7] == low
    assert check_duality(kb)


def test_nil6_degeneracy_verdicts():
    assert check_e1_degeneracy(NIL6, X(6, 2, 3)).degenerate
    d2 = check_e1_degeneracy(NIL6, X(6, 1, 6))
    assert not d2.degenerate and d2.defects[1] == 3
    assert not check_e1_degeneracy(NIL6, X(6, 1, 3)).degenerate
    for pi, _ in NIL6_TABLES.values():
        assert check_unimodular(NIL6, pi)


def test_zero_bivector_gives_hodge_sums():
    for model in (I3, NIL6, FIL4, builtin("torus3")):
        assert list(kb_dims(model, Polyvector.zero(model.n)).dims) == e1_sums(dolbeault_dims(model))


def test_non_poisson_is_refused():
    with pytest.raises(NotPoissonError):
        kb_dims(I3, X(3, 1, 3))
    with pytest.raises(NotPoissonError):
        lp_dims(I3, X(3, 1, 3))


# -- independent oracles ------------------------------------------------------------


def to_sym(v):
    return sympy.Rational(v.re.numerator, v.re.denominator) + sympy.I * sympy.Rational(v.im.numerator, v.im.denominator)


def sym_rank(rows, cols, image):
    M = sympy.zeros(len(rows), len(cols))
    idx = {r: i for i, r in enumerate(rows)}
    for j, c in enumerate(cols):
        for tgt, v in image(c).items():
            M[idx[tgt], j] = to_sym(v)
    return M.rank()


def holomorphic_d_pi_homology(model, pi):
    """dims of H(Lambda^{p,0}, d_pi) listed by j = n - p."""
    n = model.n
    basis = {p: [Monomial(h, 0) for h in masks_of_size(n, p)] for p in range(n + 1)}
    image = lambda m: d_pi(model, pi, Form.basis(n, m)).terms
    ranks = {p: sym_rank(basis[p - 1], basis[p], image) if p > 0 else 0 for p in range(n + 1)}
    out = []
    for j in range(n + 1):
        p = n - j
        out.append(len(basis[p]) - ranks[p] - (ranks[p + 1] if p < n else 0))
    return out


def polyvector_b_pi_cohomology(model, pi):
    n = model.n
    basis = {p: masks_of_size(n, p) for p in range(n + 1)}
    image = lambda m: b_pi(model, pi, Polyvector(n, {m: ONE})).terms
    ranks = {p: sym_rank(basis[p + 1], basis[p], image) if p < n else 0 for p in range(n + 1)}
    return [len(basis[p]) - ranks[p] - (ranks[p - 1] if p > 0 else 0) for p in range(n + 1)]


RUNS = [
    (I3, biv(3, {(1, 2): 1, (2, 3): 1})),
    (I3, biv(3, {(1, 2): 1})),
    (I3, Polyvector.zero(3)),
    (FIL4, X(4, 1, 4)),
    (FIL4, X(4, 3, 4)),
    (FIL4, biv(4, {(2, 3): 1, (2, 4): -2})),
    (NIL6, X(6, 2, 3)),
    (NIL6, X(6, 1, 6)),
    (NIL6, X(6, 1, 3)),
]
RUN_IDS = [f"{m.name}-{i}" for i, (m, _) in enumerate(RUNS)]


@pytest.mark.parametrize("model,pi", RUNS, ids=RUN_IDS)
def test_kb_is_convolution_of_holomorphic_homology_with_h0q(model, pi):
    # the total complex is a tensor product of (Lambda^{*,0}, d_pi) and (Lambda^{0,*}, delbar)
    h0 = [dolbeault_dims(model)[0, q] for q in range(model.n + 1)]
    assert list(kb_dims(model, pi).dims) == convolve(holomorphic_d_pi_homology(model, pi), h0)


@pytest.mark.parametrize("model,pi", RUNS, ids=RUN_IDS)
def test_lp_is_convolution(model, pi):
    h0 = [dolbeault_dims(model)[0, q] for q in range(model.n + 1)]
    assert list(lp_dims(model, pi).dims) == convolve(polyvector_b_pi_cohomology(model, pi), h0)


@pytest.mark.parametrize("model,pi", RUNS, ids=RUN_IDS)
def test_invariants_on_every_run(model, pi):
    kb = kb_dims(model, pi)
    hd = dolbeault_dims(model)
    e1 = e1_sums(hd)
    assert all(kb[k] <= e1[k] for k in range(2 * model.n + 1))
    assert e_infinity(model, pi).totals() == list(kb.dims)
    assert euler_characteristic(kb) == hodge_euler(hd)
    if check_unimodular(model, pi):
        lp = lp_dims(model, pi)
        assert all(lp[2 * model.n - k] == kb[k] for k in range(2 * model.n + 1))
        assert check_duality(kb)


@pytest.mark.parametrize("model,pi", RUNS, ids=RUN_IDS)
def test_square_zero_on_every_basis_element(model, pi):
    kb_complex(model, pi).assert_square_zero()
    lp_complex(model, pi).assert_square_zero()
    for m in all_monomials(model.n):
        f = Form.basis(model.n, m)
        assert not d_pi(model, pi, delbar(model, f)) + delbar(model, d_pi(model, pi, f))
        assert not d_pi(model, pi, d_pi(model, pi, f))


# -- spectral sequence against a subspace-level oracle ---------------------------------


class SubspaceOracle:
    """E_r^{s} = Z_r^s / (Z_{r-1}^{s+1} + B_{r-1}^s) computed from explicit subspaces."""

    def __init__(self, model, pi):
        n = self.n = model.n
        self.s_of = lambda m: n - popcount(m.hol)
        mons = sorted(all_monomials(n), key=lambda m: self.s_of(m))
        self.basis = {k: [m for m in mons if n - popcount(m.hol) + popcount(m.anti) == k] for k in range(2 * n + 1)}
        self.D = {}
        for k in range(2 * n):
            rows, cols = self.basis[k + 1], self.basis[k]
            idx = {r: i for i, r in enumerate(rows)}
            M = sympy.zeros(len(rows), len(cols))
            for j, m in enumerate(cols):
                f = Form.basis(n, m)
                for tgt, v in (d_pi(model, pi, f) + delbar(model, f)).terms.items():
                    M[idx[tgt], j] = to_sym(v)
            self.D[k] = M

    def _dmat(self, k):
        if k in self.D:
            return self.D[k]
        return sympy.zeros(len(self.basis.get(k + 1, [])), len(self.basis.get(k, [])))

    def _cols(self, k, s):
        return [i for i, m in enumerate(self.basis.get(k, [])) if self.s_of(m) >= s]

    def Z(self, r, s, k):
        size = len(self.basis[k])
        cols = self._cols(k, s)
        if not cols:
            return []
        D = self._dmat(k)
        low = [i for i, m in enumerate(self.basis.get(k + 1, [])) if self.s_of(m) < s + r]
        sub = D.extract(low, cols) if low else sympy.zeros(0, len(cols))
        out = []
        for v in sub.nullspace() if low else [sympy.eye(len(cols))[:, i] for i in range(len(cols))]:
            full = sympy.zeros(size, 1)
            for a, c in enumerate(cols):
                full[c] = v[a]
            out.append(full)
        return out

    def B(self, r, s, k):
        if k == 0:
            return []
        src = self._cols(k - 1, s - r)
        if not src:
            return []
        D = self._dmat(k - 1)
        low = [i for i, m in enumerate(self.basis[k]) if self.s_of(m) < s]
        if low:
            pre = D.extract(low, src).nullspace()
        else:
            pre = [sympy.eye(len(src))[:, i] for i in range(len(src))]
        out = []
        for v in pre:
            full = sympy.zeros(len(self.basis[k - 1]), 1)
            for a, c in enumerate(src):
                full[c] = v[a]
            out.append(D * full)
        return out

    @staticmethod
    def rank(vectors):
        if not vectors:
            return 0
        return sympy.Matrix.hstack(*vectors).rank()

    def entry(self, r, s, k):
        z = self.Z(r, s, k)
        return len(z) - self.rank(self.Z(r - 1, s + 1, k) + self.B(r - 1, s, k))


ORACLE_RUNS = [
    (I3, biv(3, {(1, 2): 1, (2, 3): 1})),
    (FIL4, X(4, 1, 4)),
    (FIL4, biv(4, {(2, 3): 1, (3, 4): 1})),
]


@pytest.mark.parametrize("model,pi", ORACLE_RUNS, ids=lambda x: str(x))
def test_pages_match_subspace_oracle(model, pi):
    oracle = SubspaceOracle(model, pi)
    pages = spectral_pages(model, pi, 3)
    n = model.n
    for pg in pages:
        for s in range(n + 1):
            for t in range(n + 1):
                assert pg.e[(s, t)] == oracle.entry(pg.r, s, s + t), (pg.r, s, t)


def zigzag():
    # a in (0,1), b in (1,1), c in (1,0), e in (2,0); a -> b and c -> e horizontally, c -> b vertically
    blocks = {(0, 1): ["a"], (1, 1): ["b"], (1, 0): ["c"], (2, 0): ["e"]}
    vert = {"c": {"b": ONE}}
    horiz = {"a": {"b": ONE}, "c": {"e": ONE}}
    return DoubleComplex(blocks, lambda x: vert.get(x, {}), lambda x: horiz.get(x, {}), max_degree=2)


def test_zigzag_has_a_second_page_differential():
    cx = zigzag()
    cx.assert_square_zero()
    assert cx.cohomology() == [0, 0, 0]
    e1, e2, e3 = (cx.page(r, 2) for r in (1, 2, 3))
    assert {st for st, v in e1.e.items() if v} == {(0, 1), (2, 0)}
    assert not e1.nonzero_differentials()
    assert e2.d_ranks[(0, 1)] == 1
    assert not any(e3.e.values())


def test_double_complex_rejects_bad_maps():
    with pytest.raises(ConsistencyError):
        DoubleComplex({(0, 0): ["a"], (0, 1): ["b"]}, lambda x: {}, lambda x: {"b": ONE} if x == "a" else {}, 1)
    bad = DoubleComplex(
        {(0, 0): ["a"], (0, 1): ["b"], (1, 0): ["c"], (1, 1): ["d"]},
        lambda x: {"b": ONE} if x == "a" else ({"d": ONE} if x == "c" else {}),
        lambda x: {"c": ONE} if x == "a" else ({"d": ONE} if x == "b" else {}),
        2,
    )
    with pytest.raises(ConsistencyError):
        bad.assert_square_zero()


def test_first_page_is_dolbeault():
    for model, pi in [(NIL6, X(6, 1, 6)), (I3, biv(3, {(1, 2): 1}))]:
        h = dolbeault_dims(model)
        e1 = spectral_pages(model, pi, 1)[0]
        n = model.n
        for s, t in itertools.product(range(n + 1), repeat=2):
            assert e1.e[(s, t)] == h[n - s, t]


def test_nil6_pi2_has_differential_at_total_degree_one():
    pages = spectral_pages(NIL6, X(6, 1, 6), stable_page_index(NIL6))
    hits = [
        (pg.r, s, t)
        for pg in pages
        for (s, t) in pg.nonzero_differentials()
        if s + t in (0, 1)  # leaves degree 1, or lands in it from degree 0
    ]
    assert any(s + t == 1 for _, s, t in hits)
    assert pages[-1].totals() == list(kb_dims(NIL6, X(6, 1, 6)).dims)


def test_pages_stabilise():
    pages = spectral_pages(NIL6, X(6, 1, 3), stable_page_index(NIL6) + 1)
    assert pages[-1].e == pages[-2].e


# -- randomized Poisson bivectors -------------------------------------------------------

pairs6 = list(itertools.combinations(range(1, 7), 2))


@settings(max_examples=12)
@given(st.dictionaries(st.sampled_from(pairs6), st.integers(-1, 1), min_size=1, max_size=3))
def test_e1_bound_on_random_poisson_bivectors(coeffs):
    pi = biv(6, coeffs)
    if not check_poisson(NIL6, pi).is_poisson:
        return
    kb = kb_dims(NIL6, pi)
    e1 = e1_sums(dolbeault_dims(NIL6))
    assert all(kb[k] <= e1[k] for k in range(13))
    assert e_infinity(NIL6, pi).totals() == list(kb.dims)
    assert euler_characteristic(kb) == hodge_euler(dolbeault_dims(NIL6))
