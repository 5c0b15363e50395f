"""Mean-spin entanglement measurement on a small state-vector simulator."""

__version__ = "0.1.0"

from ._accel import USE_NUMBA, backend_name
from .circuits import build_bell_circuit, build_cat_circuit, build_werner_circuit
from .protocols import (
    EntanglementEstimate,
    MixedEnsemble,
    analytic_cat,
    analytic_mixed_bell,
    analytic_werner,
    entanglement_from_mean_spin,
    estimate_mean_spin,
    estimate_rank2_entanglement,
    measure_pure_entanglement,
    oracle_entanglement_pure,
)
from .sampler import Counts, NoiseModel, SeedSpec, sample_circuit, sample_counts
from .simcore import Circuit, GateKind, GateOp, StateVector, init_zero_state, run_circuit

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "build_bell_circuit",
    "build_cat_circuit",
    "build_werner_circuit",
    "EntanglementEstimate",
    "MixedEnsemble",
    "analytic_cat",
    "analytic_mixed_bell",
    "analytic_werner",
    "entanglement_from_mean_spin",
    "estimate_mean_spin",
    "estimate_rank2_entanglement",
    "measure_pure_entanglement",
    "oracle_entanglement_pure",
    "Counts",
    "NoiseModel",
    "SeedSpec",
    "sample_circuit",
    "sample_counts",
    "Circuit",
    "GateKind",
    "GateOp",
    "StateVector",
    "init_zero_state",
    "run_circuit",
]
