"""Exact arithmetic in skew power and Laurent series rings over finite
coefficient rings: twisted commutation, canonical Ore localisation,
semisimple structure transport, and the non-archimedean norm calculus.
"""

from .rings import (
    CoefficientRing,
    Filtration,
    FiltrationError,
    RingError,
    TwistData,
    TwistError,
    build_ring,
    build_twist,
    check_assumptions,
    jac_adic_filtration,
    quotient_by_radical,
    standard_filtration,
)
from .series import (
    KIND_DPSP,
    KIND_DS,
    GradedPiece,
    PrecisionMismatch,
    SeriesError,
    SeriesRing,
    SkewSeries,
    TowerElement,
    ZeroSeriesError,
    commute,
    convert_form,
    equal_on_overlap,
    graded_component,
    invert_unit_series,
    monomial_apply,
    mul,
    order_leading,
    ore_witness,
    project,
    tower_element,
)
from .structure import (
    CyclicDecomposition,
    InnerFactorisation,
    StructureError,
    decompose_cyclic,
    factor_matrix_automorphism,
    transport_inner,
    weierstrass,
)
from .ore import (
    LocalisedElement,
    NonMembership,
    NotCertifiedError,
    OreError,
    RegularityWitness,
    expand,
    invert_in_Bk,
    invert_in_level,
    localise,
    ore_pair,
    product_membership,
    regularity_test,
    s_closure_checks,
)
from .norms import (
    NormError,
    RingNorm,
    build_norm,
    check_submultiplicative,
    equivalence_bounds,
    laurent_norm,
)
from .iwasawa import (
    GroupDatum,
    GroupError,
    PermGroup,
    alternate_generator_demo,
    build_iwasawa,
    powerful_checks,
)
from .specfile import load_context, load_group_datum

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
