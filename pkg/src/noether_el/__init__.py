"""Exact ideal calculus and character data for elementary matrix groups.

The layers build upward: integer polynomials and strong Groebner bases,
ideal arithmetic in Z[x1..xk] and its finitely presented quotients,
finite-index structure of R/I, finite models of congruence quotients of
SL_d, dual groups with their invariant measures, and finally induced trace
data validated against positivity and level recovery.
"""

__version__ = "0.1.0"

from .caps import Caps, default_caps
from .errors import (
    CapExceeded,
    FactorizationLimit,
    InexactDivision,
    NoetherELError,
    NotInvertible,
    ParseError,
    ValidationError,
)
from .poly import GREVLEX, LEX, Polynomial, TermOrder, block_order, divexact
from .groebner import is_strong_groebner, normal_form, strong_groebner
from .ideals import (
    Ideal,
    Ring,
    dump_ideal,
    ideal_equal,
    ideal_from_dict,
    ideal_intersect,
    ideal_product,
    ideal_quotient,
    ideal_saturate,
    ideal_sum,
    ideal_to_dict,
    load_ideal,
)
from .finiteness import (
    IndexVerdict,
    cardinality_and_structure,
    commensurable,
    compute_depth,
    depth_membership,
    finite_index_test,
    quotient_structure,
)

__all__ = [
    "Caps",
    "default_caps",
    "CapExceeded",
    "FactorizationLimit",
    "InexactDivision",
    "NoetherELError",
    "NotInvertible",
    "ParseError",
    "ValidationError",
    "GREVLEX",
    "LEX",
    "Polynomial",
    "TermOrder",
    "block_order",
    "divexact",
    "is_strong_groebner",
    "normal_form",
    "strong_groebner",
    "Ideal",
    "Ring",
    "dump_ideal",
    "ideal_equal",
    "ideal_from_dict",
    "ideal_intersect",
    "ideal_product",
    "ideal_quotient",
    "ideal_saturate",
    "ideal_sum",
    "ideal_to_dict",
    "load_ideal",
    "IndexVerdict",
    "cardinality_and_structure",
    "commensurable",
    "compute_depth",
    "depth_membership",
    "finite_index_test",
    "quotient_structure",
]
