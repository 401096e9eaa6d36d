"""Finite ultrametric spaces, representing trees, balleans and quasisymmetric maps.

All distances are exact :class:`fractions.Fraction` values; no verdict in this
package depends on floating point.
"""

from ultraqs.ballean import (
    Ball,
    Ballean,
    IsoWitness,
    ball_preserving_iff_iso_check,
    enumerate_ballean,
    is_ball,
    is_ball_preserving,
    rooted_tree_isomorphic,
)
from ultraqs.errors import UltraQSError
from ultraqs.modulus import Modulus, inverse_modulus, parse_modulus
from ultraqs.quasisymmetry import (
    ConstraintEnvelope,
    PointMap,
    bilipschitz_constant,
    check_modulus,
    envelope,
    image_ultrametric_check,
    is_one_qs,
    pointwise_bounds,
    remark_equivalences_check,
    verify_diameter_bounds,
)
from ultraqs.space import (
    MetricSpace,
    UltrametricSpace,
    diameter,
    diametrical_graph,
    multipartite_parts,
    validate_metric,
    validate_space,
)
from ultraqs.tree import RepresentingTree, build_tree, leaf_set, space_from_tree, tree_distance

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "Ballean",
    "ConstraintEnvelope",
    "IsoWitness",
    "MetricSpace",
    "Modulus",
    "PointMap",
    "RepresentingTree",
    "UltraQSError",
    "UltrametricSpace",
    "ball_preserving_iff_iso_check",
    "bilipschitz_constant",
    "build_tree",
    "check_modulus",
    "diameter",
    "diametrical_graph",
    "enumerate_ballean",
    "envelope",
    "image_ultrametric_check",
    "inverse_modulus",
    "is_ball",
    "is_ball_preserving",
    "is_one_qs",
    "leaf_set",
    "multipartite_parts",
    "parse_modulus",
    "pointwise_bounds",
    "remark_equivalences_check",
    "rooted_tree_isomorphic",
    "space_from_tree",
    "tree_distance",
    "validate_metric",
    "validate_space",
    "verify_diameter_bounds",
]
