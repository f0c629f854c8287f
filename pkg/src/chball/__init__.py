"""Complex hyperbolic ball geometry and explicit embedded-ball bounds."""

__version__ = "0.1.0"

from chball.approx import ApproxMode, FiniteOrderApprox, RationalApprox, dirichlet_approx, finite_order_approx
from chball.bounds import (
    BoundConstants,
    MargulisResult,
    max_delta,
    omega_constant,
    proof_chain,
    tau_constant,
    theorem_bound,
    verify_paper_constant,
)
from chball.hermitian_core import (
    BallPoint,
    HermitianVector,
    PointClass,
    SignatureForm,
    bergman_distance,
    herm_product,
    point_class,
    project_to_ball,
    standard_lift,
)
from chball.isometry import (
    BoostParams,
    ComplexIsometry,
    IsometryClass,
    apply,
    boost,
    classify,
    dump_matrix,
    load_matrix,
    random_isometry,
    random_unitary,
    rotation_to_axis,
    verify_su,
)
from chball.norms import (
    UnitaryDistanceCertificate,
    dist_to_unitary,
    jorgensen_quantity,
    operator_norm,
    power_difference_bound_check,
    spectral_radius,
)
from chball.volume import VolumeResult, ball_volume, manifold_volume_bound, sphere_volume
