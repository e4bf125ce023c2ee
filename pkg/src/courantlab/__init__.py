"""Exact and numerical calculus for quadratic Lie algebras, Lagrangian
relations, and the bivectors induced by Lagrangian splittings of
anchored algebroids over matrix groups."""

from .exactlin import BilinearForm, ExactSubspace, frac, span
from .quadlie import (
    CourantTensor3,
    ManinTriple,
    QuadraticLieAlgebra,
    build_double,
    cartan_trivector,
    courant_tensor,
    validate_algebra,
    validate_manin_triple,
)
from .lagrel import (
    Bivector,
    LinearRelation,
    SplitSpace,
    backward_image,
    pair_groupoid_relation,
    related_lagrangian,
    related_splitting,
    reduce_bivector,
    reduced_iso,
    splitting_bivector,
)
from .anchored import (
    AnchoredPoint,
    SectionJet,
    bivector_at,
    check_coisotropic_stabilizer,
    courant_bracket_jets,
    diagonal_backward,
    drinfeld_lagrangian,
    leaf_condition,
    pullback_point,
    rank_formula,
)
from .diffnum import ChartBivectorField, Trivector, schouten_fd, verify_main_identity

__version__ = "0.1.0"
