"""Invariant metrics and automorphisms for the Lie ball, its
squared-first-coordinate image and the tetrablock, with numerical
verification that the Caratheodory distance and the Lempert function agree.
"""

from .domains import (
    DimensionError,
    DomainError,
    Moduli,
    as_point,
    embed_q,
    gauge_p,
    hermitian_inner,
    in_lhat,
    in_lhat_margin,
    in_lie_ball,
    in_tetrablock,
    lambda_lift,
    lambda_map,
    lhat_gauge,
    moduli,
    point_from_json,
    point_to_json,
    project_pi,
    symmetric_square,
    tetra_gauge,
)
from .rotations import Frame, apply_frame, normal_frame, partial_normal_frame
from .automorphisms import (
    GroupElement,
    LhatAutomorphism,
    NormalizationError,
    SingularityError,
    TetraMobius,
    apply_mobius,
    descend,
    extend_lhat,
    kappa_end,
    kappa_lift,
    lie_ball_to_origin,
    normalize_pair,
    normalize_point_lhat,
    normalize_tetra_point,
    tetra_from_lhat3,
    tetra_mobius_apply,
    tetra_mobius_inverse,
    tetra_to_lhat3,
    w_vector,
)

__version__ = "0.1.0"
