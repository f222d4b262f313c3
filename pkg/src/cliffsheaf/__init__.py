"""Commutative Clifford-type algebras over the tangent bundle and their trace norms."""

from .algebra import (
    AlgebraElement,
    EvalContext,
    F,
    Ft,
    M,
    Mt,
    add,
    evaluate,
    grade_decompose,
    grade_part,
    make_generator,
    multiply,
    scale,
)
from .audit import audit_identities, audit_passed
from .diracop import FlatOperator, Lattice, PlaneWave, convergence_study, symbol_matrix
from .dsl import eval_expr, load_context, parse, print_canonical
from .finsler import (
    ORACLE_PAIRING,
    RandersData,
    angular_lagrangian,
    fundamental_tensor,
    null_limit_check,
    randers_norm,
    second_order_lagrangian,
)
from .gamma import GammaRep, build_representation, slash
from .metric import Metric4, OneForm, Tangent, causal_character, orthonormal_frame
from .trace import numeric_trace, symbolic_trace, trace_of_element

__version__ = "0.1.0"
