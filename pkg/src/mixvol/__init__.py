"""Mixed volumes of polytopes and Monte Carlo checks of projection averages."""

from .bodies import (
    BallBracket,
    BodySpec,
    ConvexBody,
    ball_bracket,
    cross_polytope,
    cube,
    make_body,
    minkowski_sum,
    project,
    scale,
    segment,
    simplex,
)
from .constants import ball_volume, projection_constant, r_constant, sphere_area, theorem_constant
from .hull import KernelError, convex_hull, volume
from .mixed import mixed_volume, quermass_bracket
from .sampling import RandomStream, grassmann_frame, haar_orthogonal, uniform_sphere
from .verify import (
    ExperimentReport,
    strictness_probe,
    verify_identity,
    verify_lemma_sharpness,
    verify_needle_average,
    verify_theorem,
)

__version__ = "0.1.0"
