"""Certified Morse theory on point-cloud offsets.

Certify that an offset of a finite point cloud is taken at a regular value of
the distance function, enumerate the critical points of a restricted test
function together with their predicted cell dimensions, integrate a discrete
approximate inverse flow on composite sublevel functions, and verify the
constancy / handle-attachment / Euler predictions independently with cubical
Betti numbers.
"""

from .arrangement import (
    Arc,
    CreaseVertex,
    CriticalPointRecord,
    MorseReport,
    check_morse,
    enumerate_strata,
    find_critical_points,
    normal_cone,
    restricted_hessian,
)
from .clarke import (
    ClarkeGradientApprox,
    MuReachEstimate,
    RegularValueCertificate,
    Verdict,
    certify_regular_value,
    clarke_gradient_distance,
    mu_reach_estimate,
    shell_sample,
)
from .composite import (
    CompositeLevelFunction,
    SmoothFunction,
    delta_phi,
    phi_clarke_generators,
    phi_value,
)
from .convex import (
    ConeMembership,
    GeneratorSet,
    MinNormResult,
    cone_membership,
    delta,
    min_norm_point,
    polar_test,
)
from .flow import FlowParams, Termination, Trajectory, descend, retract_samples
from .geometry import (
    MembershipLabel,
    OffsetSet,
    PointCloud,
    Region,
    classify,
    distance,
    hausdorff_distance,
    load_points_text,
    nearest_set,
)
from .homology import (
    BettiProfile,
    BettiRow,
    BitGrid,
    GridSpec,
    betti_2d,
    rasterize_sublevel,
    stable_betti,
)
from .scenario import Scenario, load_scenario, parse_scenario
from .verify import (
    VerificationReport,
    check_constancy,
    check_euler_total,
    check_handle_attachment,
    run_scenario,
)

__version__ = "0.1.0"
