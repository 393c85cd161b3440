"""Submodular Hamming metrics and their optimization problems.

d_f(A, B) = f(A xor B) is a metric for every positive polymatroid f. This
package provides the function zoo, the SH-min / SH-max objectives
F(A) = sum_i f_i(A xor B_i), four approximation solvers with brute-force
certification, and two applications (set-based k-means clustering and
diverse k-best selection).
"""

from .checks import (
    CurvatureReport,
    MetricReport,
    PropertyReport,
    check_polymatroid,
    curvature,
    curvature_bound_factor,
    metric_axiom_check,
    restricted_curvature,
)
from .clustering import (
    ClusteringResult,
    Corpus,
    accuracy,
    kmeans_score,
    sh_centroid,
    sh_kmeans,
    synth_corpus,
)
from .errors import (
    ConvergenceError,
    GroundSetMismatchError,
    GroundSetTooLargeError,
    InfeasibleConstraintError,
    InstanceParseError,
    PolymatroidValidationError,
    UnsupportedConstraintError,
)
from .functions import (
    ClusteredConcave,
    ConcaveCardinality,
    FacilityLocation,
    Modular,
    OracleFunction,
    PolymatroidFunction,
    SaturatedCoverage,
    Scaled,
    SetCover,
    SetFunction,
    ShiftedOracle,
    SumFunction,
    function_from_record,
    metric_distance,
)
from .instance import (
    Constraint,
    SHObjective,
    ShInstance,
    UNCONSTRAINED,
    UnionSplitSurrogate,
    modular_representation,
    sh_objective,
    union_split_surrogate,
)
from .kbest import KBestResult, diverse_kbest, synth_kbest_collection
from .maximize import (
    MaxResult,
    bidirectional_greedy,
    brute_force_max,
    greedy_max_card,
    random_subset,
    randomized_greedy_card,
)
from .minimize import (
    LovaszPoint,
    MinResult,
    brute_force_min,
    lovasz_eval,
    modular_min,
    submodular_min_unconstrained,
)
from .sets import ElementSet, all_subsets, sym_diff
from .solvers import (
    Certificate,
    ModularBound,
    Solution,
    best_b,
    build_modular_bound,
    certify,
    major_min,
    major_min_bound_factor,
    rand_set_max,
    union_split_max,
    union_split_min,
)

__version__ = "0.1.0"
