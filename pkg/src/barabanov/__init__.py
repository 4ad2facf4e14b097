"""Barabanov norms of pairs of 2x2 matrices and the symbolic dynamics of their extremal trajectories."""

from .angular import (
    AngularProfile,
    NotConvergedError,
    NotInvariantError,
    SwitchingSets,
    angular_function,
    rotation_number_estimate,
    switching_lines,
    switching_sets,
)
from .linalg import (
    AffinePair,
    ConstraintWarning,
    MatrixPair,
    RotationPair,
    SingularMatrixError,
    make_affine_pair,
    make_rotation_pair,
    spectral_radius,
    word_product,
)
from .norm import (
    BarabanovResult,
    IterationConfig,
    NonConvergenceError,
    Scheme,
    barabanov_operator,
    barabanov_residual,
    brute_force_bounds,
    compute_barabanov,
    ratio_bounds,
)
from .polygon import (
    DegenerateBallError,
    SymmetricPolygon,
    gauge,
    intersect,
    linear_image,
    linear_preimage,
    load_polygon,
    new_polygon,
    normalize,
    prune,
    regular_polygon,
    save_polygon,
    validate,
)
from .symbolic import (
    SequenceStats,
    Verdict,
    analyze,
    compare,
    complexity,
    gen_double_rotation,
    gen_mismatched_coding,
    gen_rotation_coding,
    gen_sturmian,
)
from .trajectory import TieRule, Trajectory, angular_run, run, step

__version__ = "0.1.0"
