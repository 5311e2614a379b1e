"""Dimension-vector combinators for blow-ups, projective bundles and products.

These work on plain :class:`DimVector` data, so spaces without an invariant
model (projective spaces, del Pezzo surfaces) enter through
:func:`trivial_poisson_dims` applied to a Hodge diamond.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

from .tables import DimVector, HodgeDiamond


class FormulaError(ValueError):
    """Inputs outside the hypotheses of a combinator."""


@dataclass(frozen=True)
class BlowupSpec:
    """Ambient table ``x`` (dim n), center table ``z`` (dim n - c), codimension ``c``.

    ``z_ddbar`` is the caller's assertion that the center satisfies the
    ddbar-lemma; only that branch has a dimension formula.
    """

    x: DimVector
    z: DimVector
    c: int
    z_ddbar: bool = False


def blowup_dims(spec: BlowupSpec) -> DimVector:
    """``out[k] = x[k] + (c - 1) * z[k - c]``."""
    x, z, c = spec.x, spec.z, spec.c
    if c < 2:
        raise FormulaError(f"codimension must be at least 2, got {c}")
    if z.n != x.n - c:
        raise FormulaError(f"center has dimension {z.n}, expected n - c = {x.n - c}")
    if not spec.z_ddbar:
        raise FormulaError(
            "the center is not asserted to satisfy the ddbar-lemma; without it the exceptional "
            "contribution is a quotient H_{k-1}(E)/rho^*H_{k-c}(Z) that dimension data cannot determine"
        )
    n = x.n
    out = tuple(x[k] + (c - 1) * z[k - c] for k in range(2 * n + 1))
    for k in list(range(0, c)) + list(range(2 * n - c + 1, 2 * n + 1)):
        if out[k] != x[k]:
            raise AssertionError(f"blow-up changed degree {k} outside the exceptional range")
    return DimVector(n, out)


def blowup_points(x: DimVector, count: int) -> DimVector:
    """Blow up ``count`` points of a surface-or-higher, one at a time."""
    point = DimVector(0, (1,))
    out = x
    for _ in range(count):
        out = blowup_dims(BlowupSpec(out, point, out.n, z_ddbar=True))
    return out


def pbundle_dims(z: DimVector, c: int) -> DimVector:
    """Projectivised rank-``c`` bundle over Z: ``out[k] = c * z[k + 1 - c]``."""
    if c < 2:
        raise FormulaError(f"bundle rank must be at least 2, got {c}")
    m = z.n + c - 1
    return DimVector(m, tuple(c * z[k + 1 - c] for k in range(2 * m + 1)))


def product_pn_dims(x: DimVector, n: int) -> DimVector:
    """``X x P^n`` with the product structure: ``out[k] = (n + 1) * x[k - n]``."""
    if n < 1:
        raise FormulaError(f"projective factor needs n >= 1, got {n}")
    m = x.n + n
    return DimVector(m, tuple((n + 1) * x[k - n] for k in range(2 * m + 1)))


def projective_space_dims(n: int) -> DimVector:
    return pbundle_dims(DimVector(0, (1,)), n + 1)


def trivial_poisson_dims(h: HodgeDiamond) -> DimVector:
    """``out[k] = sum_{p - q = n - k} h^{p,q}``."""
    n = h.n
    offs = h.row_sums_by_offset()
    return DimVector(n, tuple(offs.get(n - k, 0) for k in range(2 * n + 1)))


class DefectTransfer(NamedTuple):
    degenerate: bool
    defects: Tuple[int, ...]


def degeneracy_transfer(x_defects: Sequence[int], z_defects: Sequence[int], c: int) -> DefectTransfer:
    """E_1 defects of the blow-up: ``dX[k] + (c - 1) * dZ[k - c]``."""
    if c < 2:
        raise FormulaError(f"codimension must be at least 2, got {c}")
    x = DimVector.of(list(x_defects))
    z = DimVector.of(list(z_defects))
    if z.n != x.n - c:
        raise FormulaError(f"center defects cover dimension {z.n}, expected {x.n - c}")
    out = tuple(x[k] + (c - 1) * z[k - c] for k in range(2 * x.n + 1))
    return DefectTransfer(not any(out), out)
