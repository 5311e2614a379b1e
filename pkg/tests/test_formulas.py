import pytest
from hypothesis import given
from hypothesis import strategies as st

from kbhomology.formulas import (
    BlowupSpec,
    FormulaError,
    blowup_dims,
    blowup_points,
    degeneracy_transfer,
    pbundle_dims,
    product_pn_dims,
    projective_space_dims,
    trivial_poisson_dims,
)
from kbhomology.homology import dolbeault_dims
from kbhomology.modelfile import builtin
from kbhomology.tables import DimVector, HodgeDiamond, check_duality, euler_characteristic

POINT = DimVector(0, (1,))
NIL6_PI3 = DimVector.of([1, 8, 31, 78, 143, 202, 226, 202, 143, 78, 31, 8, 1])
TORUS3 = DimVector.of([1, 6, 15, 20, 15, 6, 1])


def test_nil6_blowup_along_torus():
    out = blowup_dims(BlowupSpec(NIL6_PI3, TORUS3, 3, z_ddbar=True))
    assert out.dims == (1, 8, 31, 80, 155, 232, 266, 232, 155, 80, 31, 8, 1)


def test_blowup_refuses_without_ddbar():
    with pytest.raises(FormulaError, match="quotient"):
        blowup_dims(BlowupSpec(NIL6_PI3, TORUS3, 3))


def test_blowup_argument_checks():
    with pytest.raises(FormulaError):
        blowup_dims(BlowupSpec(NIL6_PI3, DimVector.zero(5), 1, z_ddbar=True))
    with pytest.raises(FormulaError):
        blowup_dims(BlowupSpec(NIL6_PI3, TORUS3, 2, z_ddbar=True))


def test_empty_center_changes_nothing():
    assert blowup_dims(BlowupSpec(NIL6_PI3, DimVector.zero(3), 3, z_ddbar=True)) == NIL6_PI3


@pytest.mark.parametrize("r", range(1, 9))
def test_del_pezzo(r):
    p2 = trivial_poisson_dims(HodgeDiamond.projective_space(2))
    assert p2.dims == (0, 0, 3, 0, 0)
    out = blowup_points(p2, r)
    assert out.dims == (0, 0, 3 + r, 0, 0)


@pytest.mark.parametrize("n", range(1, 7))
def test_projective_space(n):
    dims = projective_space_dims(n)
    assert dims.dims == tuple(n + 1 if k == n else 0 for k in range(2 * n + 1))
    assert trivial_poisson_dims(HodgeDiamond.projective_space(n)) == dims
    assert product_pn_dims(POINT, n) == dims


def test_p1_times_p1():
    p1 = trivial_poisson_dims(HodgeDiamond.projective_space(1))
    assert p1.dims == (0, 2, 0)
    assert pbundle_dims(p1, 2).dims == (0, 0, 4, 0, 0)
    assert product_pn_dims(p1, 1).dims == (0, 0, 4, 0, 0)


def test_zero_inputs():
    assert pbundle_dims(DimVector.zero(2), 3) == DimVector.zero(4)
    assert product_pn_dims(DimVector.zero(2), 2) == DimVector.zero(4)


def test_rank_checks():
    with pytest.raises(FormulaError):
        pbundle_dims(POINT, 1)
    with pytest.raises(FormulaError):
        product_pn_dims(POINT, 0)


def test_trivial_poisson_examples():
    assert trivial_poisson_dims(HodgeDiamond.torus(3)) == TORUS3
    nil6 = trivial_poisson_dims(dolbeault_dims(builtin("nil6")))
    assert nil6.dims[:7] == (1, 9, 38, 101, 191, 274, 308)


def test_degeneracy_transfer():
    zero6, zero3 = DimVector.zero(6).dims, DimVector.zero(3).dims
    assert degeneracy_transfer(zero6, zero3, 3).degenerate
    x = (0, 1, 4, 7, 8, 7, 4, 1, 0, 0, 0, 0, 0)
    res = degeneracy_transfer(x, zero3, 3)
    assert not res.degenerate and res.defects == x
    z = (0, 1, 0, 0, 0, 0, 0)
    res = degeneracy_transfer(zero6, z, 3)
    assert not res.degenerate and res.defects[4] == 2


palindromes = st.integers(0, 4).flatmap(
    lambda n: st.lists(st.integers(0, 50), min_size=n + 1, max_size=n + 1).map(
        lambda half: DimVector(n, tuple(half + half[-2::-1]))
    )
)


@given(palindromes, st.integers(2, 4), st.data())
def test_blowup_preserves_duality_and_stabilises(z, c, data):
    x = data.draw(
        st.lists(st.integers(0, 50), min_size=z.n + c + 1, max_size=z.n + c + 1).map(
            lambda half: DimVector(z.n + c, tuple(half + half[-2::-1]))
        )
    )
    out = blowup_dims(BlowupSpec(x, z, c, z_ddbar=True))
    assert check_duality(out)
    n = x.n
    for k in list(range(c)) + list(range(2 * n - c + 1, 2 * n + 1)):
        assert out[k] == x[k]


@given(st.integers(0, 4).flatmap(lambda n: st.lists(st.integers(0, 30), min_size=2 * n + 1, max_size=2 * n + 1)), st.integers(2, 5))
def test_pbundle_euler_scaling(values, c):
    z = DimVector.of(values)
    out = pbundle_dims(z, c)
    assert out.n == z.n + c - 1
    assert euler_characteristic(out) == (-1) ** (c - 1) * c * euler_characteristic(z)
