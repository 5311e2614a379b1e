"""Exact Koszul-Brylinski, Dolbeault and Lichnerowicz-Poisson computations on nilmanifold models."""

from .exterior import Form, Monomial, Polyvector, anchor, contract, render_form, render_polyvector, wedge
from .formulas import (
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
from .homology import (
    check_e1_degeneracy,
    check_unimodular,
    dolbeault_dims,
    e_infinity,
    kb_dims,
    lp_dims,
    spectral_pages,
)
from .lie_model import (
    ConsistencyError,
    LieModel,
    ModelError,
    NotPoissonError,
    check_poisson,
    d_pi,
    del_,
    delbar,
    is_nilpotent,
    schouten,
    validate,
)
from .linalg import GaussianRational, SparseMatrix, kernel_basis, rank
from .modelfile import ParseError, builtin, parse_model, render_model
from .tables import DimVector, HodgeDiamond, PageTable, check_duality, euler_characteristic

__version__ = "0.1.0"
