"""steerlp: two-qubit steering detection and quantification.

Decides whether a two-qubit state is steerable under a finite set of
projective measurements by minimizing the total mass of a geometric
hidden-state model over a discretized Bloch sphere (a sparse LP), and
constructs unsteerable states by mixing and scaling known models.
"""

from .analytic import EllipseAxes, bell_diag_mix_s, ellipse_half_circumference, mixture_threshold
from .assemblage import (
    Assemblage,
    MeasurementSet,
    SteeringFigure,
    build_assemblage,
    coordinate_axes,
    fibonacci_directions,
    parse_measurement_spec,
    steering_figure,
)
from .factory import (
    decompose_abt,
    maximally_mixed,
    random_state,
    singlet,
    t_state,
    unsteerable_mixture,
    werner,
)
from .gmodel import (
    ExtremeGModel,
    HiddenGrid,
    InteriorGModel,
    LhsModel,
    check_gmodel,
    complete_to_lhs,
    equator_directions,
    equatorial_t_model,
    gmodel_from_json_dict,
    gmodel_to_json_dict,
    lhs_joint_probability,
    lhs_joint_table,
    mix_gmodels,
    reconstruct_assemblage,
    s_quantity,
    scale_gmodel,
    to_extreme,
    trine_povm_counterexample,
    werner_singlet_model,
)
from .lp import (
    LPSolution,
    SteerabilityReport,
    SteeringLP,
    Witness,
    build_steering_lp,
    export_triplets,
    min_s,
    model_from_solution,
    solve_lp,
    witness_from_dual,
)
from .qubit import (
    DensityMatrix,
    ProjectiveMeasurement,
    TwoQubitState,
    ValidationError,
    conditioned_state,
    density_from_state,
    is_entangled_ppt,
    joint_probability,
    load_state,
    save_state,
    state_from_density,
)

__version__ = "0.1.0"
