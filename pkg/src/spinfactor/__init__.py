"""Numerics for finite-dimensional spin factors.

Triple products, Bergman operators and quasi-inverses; tripotent
classification and rank-2 spectral frames; Mobius transvections and full
ball automorphisms; constructive boundary fixed points; and the bidisc
target geometry of fixed-point-free iteration.
"""

__version__ = "0.1.0"

from .core import (
    QuadraticRep,
    SpinSpace,
    as_element,
    bergman_apply,
    bergman_operator,
    box_operator,
    conj_j,
    element_from_floats,
    element_to_floats,
    hilbert_norm,
    inner,
    j_pairing,
    quadratic_rep,
    quasi_inverse,
    r_invariant,
    spin_norm,
    triple_product,
)
from .tripotents import (
    SpectralFrame,
    TripotentClass,
    TripotentKind,
    TripotentRank,
    are_triple_orthogonal,
    classify,
    is_tripotent,
    peirce_projections,
    rank,
    spectral_decompose,
)
from .automorphisms import (
    Automorphism,
    Transvection,
    TripleIsometry,
    automorphism_apply,
    bergman_sqrt,
    fixed_point_residual,
    isometry_apply,
    maximal_parameter_reduction,
    transvection_apply,
    transvection_apply_bergman,
    transvection_maximal,
    transvection_minimal,
)
from .fixedpoints import (
    SliverCoefficients,
    SliverData,
    WeakFixedPointReport,
    density_witness,
    earle_hamilton_fixed_point,
    geometric_schedule,
    orthogonal_construction,
    sliver_coefficients,
    sliver_construction,
    weak_fixed_point,
)
from .dynamics import (
    BidiscFrame,
    HolomorphicMap,
    bidisc_residuals,
    iterate_orbit,
    target_bidisc,
    wolff_point,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
