"""Twisting classes of multiplicative cohomology operations on Thom spaces.

The class ``rho`` of an operation ``alpha`` and an oriented bundle is
defined by ``alpha(u) = rho * u``.  This package computes it exactly on
finite models of projective-space cohomology and K-theory, and checks
the identities it satisfies by exhaustive enumeration.
"""

from .errors import (
    InvalidSpec,
    MathError,
    ModelError,
    NotCommuting,
    NotDivisible,
    ParseError,
    RelationViolation,
    ThomRhoError,
)
from .poly_kernel import (
    F2,
    Z,
    Element,
    Generator,
    Ring,
    RingMap,
    degree_part,
    ext,
    external_product_ring,
    make_ring,
    poly,
)
from .spaces import CP, KTHEORY, MOD2, RP, BundleDescriptor, SpaceModel, line
from .theories import Operation, OpKind, adams, make_formal_operation, total_sq, total_sw
from .thom_calculus import (
    ThomData,
    build_thom_model,
    divide_by_thom_class,
    external_thom_product,
    rho,
    rho_line_closed_form,
    rho_via_division,
    rho_via_splitting,
)

__version__ = "0.1.0"
