"""Bernstein states: k-wise independent spin statistics, fragile entanglement,
local-phase orbit geometry and generalized Mermin relations."""

from .constructions import (
    PhaseAssignment,
    TermPhaseVector,
    general_bernstein,
    ghz,
    inhomogeneous_bernstein3,
    local_phase_transform,
    special_bernstein,
)
from .mermin import find_contradictions, mermin_observables, observable_eigenvalue, verify_relation_table
from .phase_torus import (
    dimension_gap,
    is_period,
    orbit_membership,
    period_lattice,
    phase_shift_system,
    stabilizer_lattice,
)
from .qstate import (
    Axis,
    DensityMatrix,
    SpinLabel,
    StateVector,
    apply_local_unitary,
    basis_change_z_to_x,
    basis_index,
    inner_product,
    make_state,
    overlap,
    read_state,
    state_to_density,
    write_state,
)
from .separability import (
    BipartiteSplit,
    fragility_report,
    ghz_orbit_separable_decomposition,
    partial_trace,
    partial_transpose,
    ppt_min_eigenvalue,
)
from .stats import (
    OutcomeQuery,
    bernstein_certificate,
    correlation_check,
    joint_probability,
    kwise_independence_report,
    marginal_table,
    outcome_distribution,
)

__version__ = "0.1.0"
