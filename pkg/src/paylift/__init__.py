"""Multi-quadrotor cable-suspended payload transport stack."""

from .allocation import (
    Allocator,
    CableForceSet,
    DesiredWrench,
    FormationPreference,
    Halfspace,
    PreferenceSource,
    allocate_baseline,
    allocate_qp,
    build_allocation_map,
    qp_fd,
    qp_svm_pointmass,
    qp_svm_rigid,
    tilt_angles,
    tilt_hyperplanes_pointmass,
    tilt_hyperplanes_rigid,
)
from .control import (
    ControlOutput,
    ControllerGains,
    ReferenceSetpoint,
    attitude_loop,
    cable_control,
    control_step,
    desired_directions,
    payload_wrench,
)
from .dynamics import step
from .params import PayloadKind, PayloadParams, QuadrotorParams, SimConfig
from .qp import ProblemFamily, QpProblem, QpSolution, QpStatus, solve
from .scenario import Scenario, load_scenario
from .state import (
    FullSystemState,
    hover_state,
    mechanical_energy,
    min_pairwise_distance,
    quad_position,
    quad_velocity,
)

__version__ = "0.1.0"
