"""Finite-dimensional JB*-triples realized as matrix spaces.

Triple products, Peirce decompositions, odd functional calculus, inner ideals
and their Jordan algebra structure, and spatial numerical radius estimates.
"""
from .calculus import (
    complete_tripotent, cubic_root, is_positive_in_peirce2, iterated_cubic_root, odd_calculus,
    range_tripotent, triple_spectrum,
)
from .core import (
    Antisymmetric, Diagonal, DirectSum, Element, L_op, PeirceSystem, Q3, Q_op,
    RealLinearOperator, Rectangular, Subspace, Symmetric, TripleSpace, build_space,
    commutativity_defect, is_associative_jb_algebra, is_commutative, is_orthogonal,
    is_tripotent, jordan_multiplication, jordan_product, left_multiplication, peirce,
    right_multiplication, triple_product,
)
from .exceptions import *  # noqa: F401,F403
from .ideals import (
    check_Laa_in_Ea, commutativity_report, build_T_operator, find_2nilpotent, inner_ideal,
    nilpotent_L_operator,
)
from .numrange import (
    dir_derivative, numerical_index_estimate, numerical_radius, numerical_range_sample,
    operator_norm, space_norm,
)

__version__ = "0.1.0"
