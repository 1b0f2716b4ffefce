"""Deterministic haptic-teleoperation workbench built on a fractal impedance controller."""

__version__ = "0.1.0"

from .fic import (  # noqa: E402,F401
    FicParams,
    FicState,
    Phase,
    MASTER_DEFAULTS,
    REPLICA_DEFAULTS,
    fic_force,
    force_profile,
    stored_energy,
    update_phase,
)
from .planner import Planner, PlannerParams  # noqa: E402,F401
from .controllers import (  # noqa: E402,F401
    AxisFic,
    SetpointTracker,
    compose_setpoint,
    haptic_gain,
    master_force,
    replica_torque,
    teleop_setpoint,
)
from .plant import (  # noqa: E402,F401
    BondState,
    Obstacle,
    PlantDiverged,
    PlantState,
    PointMass,
    TwoLink,
    bond_force,
    contact_forces,
    dynamics_terms,
    forward_kinematics,
    jacobian,
    step_dynamics,
)
from .channel import DelayChannel, Envelope, LinkConfig  # noqa: E402,F401
from .logio import COLUMNS, RunLog, export_log, read_log  # noqa: E402,F401
from .metrics import Metrics, compute_metrics, contact_intervals  # noqa: E402,F401
from .scenario import (  # noqa: E402,F401
    ScenarioAborted,
    ScenarioConfig,
    ScenarioError,
    SimulationCore,
    circle_reference,
    run_scenario,
)
