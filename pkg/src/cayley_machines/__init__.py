"""Automata groups generated by Cayley machines of finite groups."""
from .groups import (
    GroupError,
    GroupTable,
    HypothesisError,
    build_group,
    center,
    central_squares_subgroup,
    cyclic,
    dihedral8,
    direct_product,
    modular,
    nilpotency_class,
    quaternion,
    structural_report,
)
from .laurent import LaurentMatrix, LaurentPoly, commutator_entry, mat_mul, unitriangular_inverse
from .mealy import MealyMachine, act_word, cayley_machine, export_dot, invert, reset_automaton
from .normal_form import NormalForm, canonical_split, nf, nf_mul, reduce, torsion_order
from .representation import alpha_modular, alpha_q8, rep_of_nf, verify_representation
from .tree_action import (
    EXCEEDS_BOUND,
    GroupElem,
    State,
    XPow,
    depth,
    equal_at_depth,
    evaluate,
    parse_word,
    verify_presentation,
    wreath_coordinates,
)

__all__ = [name for name in dir() if not name.startswith("_")]
