"""Finite-dimensional checks of entropy bounds for measurements near a black hole.

Tensor factors are ordered ``B (x) A (x) detector`` everywhere (B inside the
horizon, A outside). Entropies are in nats.
"""

from .channel import (
    Dilation,
    DropOutcome,
    DropPlan,
    KrausSet,
    MeasurementOutcome,
    apply_povm,
    diagonal_kraus,
    dilate,
    drop_state,
    joint_post_state,
    matter_entropy_closed_form,
    random_kraus,
    validate_kraus,
)
from .info import (
    Ensemble,
    OptimizerSettings,
    ProjectiveMeasurement,
    holevo,
    mutual_info,
    optimize_accessible_info,
    qubit_oracle_accessible_info,
    relative_entropy,
    shannon,
    von_neumann,
)
from .ledger import (
    BlackHoleParams,
    ExperimentLedger,
    WorkIntegralSpec,
    bh_entropy,
    blueshift_factor,
    free_energy_change,
    hawking_temperature,
    ledger,
    work_integral,
)
from .linalg import haar_unitary, hermitian_fn, partial_trace, tensor, validate_density
from .thermal import HartleHawkingState, ThermalSpec, gibbs_weights, hh_state, mode_hamiltonian, reduce_to_A

__version__ = "0.1.0"

__all__ = [
    "Dilation",
    "DropOutcome",
    "DropPlan",
    "KrausSet",
    "MeasurementOutcome",
    "apply_povm",
    "diagonal_kraus",
    "dilate",
    "drop_state",
    "joint_post_state",
    "matter_entropy_closed_form",
    "random_kraus",
    "validate_kraus",
    "Ensemble",
    "OptimizerSettings",
    "ProjectiveMeasurement",
    "holevo",
    "mutual_info",
    "optimize_accessible_info",
    "qubit_oracle_accessible_info",
    "relative_entropy",
    "shannon",
    "von_neumann",
    "BlackHoleParams",
    "ExperimentLedger",
    "WorkIntegralSpec",
    "bh_entropy",
    "blueshift_factor",
    "free_energy_change",
    "hawking_temperature",
    "ledger",
    "work_integral",
    "haar_unitary",
    "hermitian_fn",
    "partial_trace",
    "tensor",
    "validate_density",
    "HartleHawkingState",
    "ThermalSpec",
    "gibbs_weights",
    "hh_state",
    "mode_hamiltonian",
    "reduce_to_A",
]
