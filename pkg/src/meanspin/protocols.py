"""Entanglement of one qubit with the rest of the register.

Pure states: ``E = (1 - |<sigma>|) / 2`` from the three mean-spin components,
each measured in the computational basis after a pi/2 pre-rotation.

Rank-2 mixtures of states in span{|0...0>, |1...1>}: ``E = (1 - sqrt(1 - <SX>^2 - <SY>^2)) / 2``
where ``SX = sigma^x ... sigma^x`` and ``SY`` carries ``sigma^y`` on the target
qubit; both are read off as parities of the full register.

Pre-rotation convention (``R_A(a) = exp(-i a sigma_A / 2)``):

* x component: ``exp(+i pi/4 sigma^y) = RY(-pi/2)``
* y component: ``exp(-i pi/4 sigma^x) = RX(+pi/2)``
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, NumericalFailure, ProtocolDomainError, StructuralError
from .sampler import (
    NoiseModel,
    SeedSpec,
    binomial_std_error,
    mean_from_counts,
    parity_expectation,
    sample_circuit,
)
from .simcore import (
    Circuit,
    GateOp,
    StateVector,
    apply_gate,
    probability_vector,
    reduced_density_matrix,
    run_circuit,
    rx,
    ry,
)

log = logging.getLogger(__name__)

AXES = ("x", "y", "z")
DEFAULT_SHOTS_PER_AXIS = 1024
DEFAULT_MIXED_TOTAL_SHOTS = 8192
SPIN_SLACK = 0.05
SUPPORT_TOL = 1e-9
# radicands below this are indistinguishable from 0 given ~1e-16 error in the correlators
RADICAND_FLOOR = 1e-14
HALF_PI = math.pi / 2


@dataclass(frozen=True)
class ComponentEstimate:
    """Estimated expectation values with their 1/sqrt(shots)-scale standard errors."""

    values: tuple[float, ...]
    std_errors: tuple[float, ...]
    shots: int = 0

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class EntanglementEstimate:
    components: tuple[float, ...]
    E_measured: float
    E_theory: float | None = None
    shots_used: int = 0
    std_error: float = 0.0
    clamped: bool = False
    delta: float | None = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(float(c) for c in self.components))
        delta = None if self.E_theory is None else abs(self.E_measured - self.E_theory)
        object.__setattr__(self, "delta", delta)


@dataclass(frozen=True)
class MixedEnsemble:
    """Weighted pure-state preparations standing for ``sum_a w_a |psi_a><psi_a|``."""

    members: tuple[tuple[Circuit, float], ...]
    total_shots: int = DEFAULT_MIXED_TOTAL_SHOTS

    def __post_init__(self):
        members = tuple((c, float(w)) for c, w in self.members)
        if not members:
            raise ConfigError("ensemble has no members")
        if any(not 0.0 <= w <= 1.0 for _, w in members):
            raise ConfigError("ensemble weights must lie in [0, 1]")
        if abs(sum(w for _, w in members) - 1.0) > 1e-12:
            raise ConfigError(f"ensemble weights sum to {sum(w for _, w in members)!r}")
        if len({c.n_qubits for c, _ in members}) != 1:
            raise StructuralError("ensemble members have different widths")
        if self.total_shots < 1:
            raise ConfigError("total_shots must be >= 1")
        object.__setattr__(self, "members", members)

    @property
    def n_qubits(self) -> int:
        return self.members[0][0].n_qubits

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.members)


# ---------------------------------------------------------------------------
# analytic references
# ---------------------------------------------------------------------------


def _fold(x: float, top: float) -> float:
    """Map ``x`` in [0, top] to the same point of [0, top/2] as ``top - x`` does.

    Above ``top/2`` the subtraction ``top - x`` is exact in binary floating
    point; below it, ``top - x`` rounds, so fold through that rounded value.
    Either way ``_fold(x) == _fold(top - x)`` holds bit for bit.
    """
    if not 0.0 <= x <= top:
        return x
    if x >= 0.5 * top:
        return top - x
    return top - (top - x)


def analytic_cat(theta: float) -> float:
    return 0.5 * (1.0 - abs(math.cos(_fold(theta, math.pi))))


def analytic_werner(theta: float, qubit_role: str) -> float:
    """``qubit_role`` is ``"first_or_second"`` or ``"third"``."""
    if qubit_role == "first_or_second":
        return 0.5 * math.cos(theta / 2) ** 2
    if qubit_role == "third":
        return analytic_cat(theta)
    raise ConfigError(f"unknown Werner qubit role {qubit_role!r}")


def analytic_mixed_bell(omega: float) -> float:
    w = _fold(omega, 1.0)
    return 0.5 * (1.0 - 2.0 * math.sqrt(w * (1.0 - w)))


# ---------------------------------------------------------------------------
# pure states: mean spin
# ---------------------------------------------------------------------------


def prerotation_ops(qubit: int, axis: str, direction: int = 1) -> list[GateOp]:
    """Gates that turn a sigma^axis measurement into a computational-basis one.

    ``direction=-1`` rotates the other way; it flips the sign of the measured
    component and nothing else.
    """
    if axis == "z":
        return []
    if axis == "x":
        return [ry(qubit, -direction * HALF_PI)]
    if axis == "y":
        return [rx(qubit, direction * HALF_PI)]
    raise ConfigError(f"axis must be x, y or z, got {axis!r}")


def _z_mean_exact(state: StateVector, qubit: int) -> float:
    p = probability_vector(state, (qubit,))
    return float(p[0] - p[1])


def estimate_mean_spin(
    circuit: Circuit,
    qubit: int,
    shots_per_axis: int = DEFAULT_SHOTS_PER_AXIS,
    seed: SeedSpec | int = 0,
    noise: NoiseModel | None = None,
    mode: str = "exact",
    direction: int = 1,
) -> ComponentEstimate:
    """Mean-spin triple ``(<sx>, <sy>, <sz>)`` of ``qubit`` in the state ``circuit`` prepares."""
    if not 0 <= qubit < circuit.n_qubits:
        raise StructuralError(f"qubit {qubit} out of range for {circuit.n_qubits} qubits")
    base = run_circuit(circuit)
    if mode == "exact":
        values = []
        for axis in AXES:
            state = base
            for op in prerotation_ops(qubit, axis, direction):
                state = apply_gate(state, op)
            values.append(_z_mean_exact(state, qubit))
        return ComponentEstimate(tuple(values), (0.0, 0.0, 0.0), 0)
    if mode != "sampled":
        raise ConfigError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    if shots_per_axis < 1:
        raise ConfigError("shots_per_axis must be >= 1")
    seed = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    values, errors = [], []
    for a, axis in enumerate(AXES):
        rot = prerotation_ops(qubit, axis, direction)
        rotated = base
        for op in rot:
            rotated = apply_gate(rotated, op)
        counts = sample_circuit(
            circuit.then(rot), (qubit,), shots_per_axis, seed.derive(a), noise, state=rotated
        )
        m = mean_from_counts(counts, 0)
        values.append(m)
        errors.append(binomial_std_error(m, shots_per_axis))
    return ComponentEstimate(tuple(values), tuple(errors), 3 * shots_per_axis)


def entanglement_from_mean_spin(triple: Sequence[float], slack: float = SPIN_SLACK) -> float:
    comps = [float(c) for c in triple]
    if len(comps) != 3:
        raise StructuralError("mean-spin triple needs three components")
    bad = [c for c in comps if not abs(c) <= 1.0 + slack]
    if bad:
        raise NumericalFailure(f"mean-spin component(s) {bad} outside [-1, 1] beyond slack {slack}")
    r = math.sqrt(sum(c * c for c in comps))
    return max(0.0, 0.5 * (1.0 - min(1.0, r)))


def _spin_std_error(comp: ComponentEstimate) -> float:
    r = math.sqrt(sum(c * c for c in comp.values))
    if r < 1e-15:
        return 0.5 * math.sqrt(sum(e * e for e in comp.std_errors) / 3.0)
    return 0.5 * math.sqrt(sum((c / r * e) ** 2 for c, e in zip(comp.values, comp.std_errors)))


def measure_pure_entanglement(
    circuit: Circuit,
    qubit: int,
    shots_per_axis: int = DEFAULT_SHOTS_PER_AXIS,
    seed: SeedSpec | int = 0,
    noise: NoiseModel | None = None,
    mode: str = "exact",
    theory: float | None = None,
) -> EntanglementEstimate:
    comp = estimate_mean_spin(circuit, qubit, shots_per_axis, seed, noise, mode)
    r = math.sqrt(sum(c * c for c in comp.values))
    if r > 1.0 + 1e-12:
        log.debug("mean-spin modulus %.6f clamped to 1 for qubit %d", r, qubit)
    return EntanglementEstimate(
        components=comp.values,
        E_measured=entanglement_from_mean_spin(comp.values),
        E_theory=theory,
        shots_used=comp.shots,
        std_error=_spin_std_error(comp),
        clamped=r > 1.0,
    )


def oracle_entanglement_pure(state: StateVector, qubit: int) -> float:
    """Same measure from the purity of the one-qubit reduced density matrix.

    ``2 tr(rho^2) - 1`` is evaluated as ``(rho00 - rho11)^2 + 4|rho01|^2``; the
    two agree for unit trace, and the second avoids cancellation near purity 1/2.
    """
    rho = reduced_density_matrix(state, qubit)
    bloch_sq = float(np.real(rho[0, 0] - rho[1, 1]) ** 2 + 4.0 * abs(rho[0, 1]) ** 2)
    return 0.5 * (1.0 - math.sqrt(max(0.0, bloch_sq)))


def purity(state: StateVector, qubit: int) -> float:
    rho = reduced_density_matrix(state, qubit)
    return float(np.real(np.trace(rho @ rho)))


# ---------------------------------------------------------------------------
# rank-2 mixtures: correlators
# ---------------------------------------------------------------------------


def allocate_shots(weights: Sequence[float], total: int) -> list[int]:
    """Split ``total`` shots proportionally to ``weights`` (largest remainder, ties by index)."""
    weights = [float(w) for w in weights]
    if abs(sum(weights) - 1.0) > 1e-12:
        raise ConfigError(f"weights sum to {sum(weights)!r}, expected 1")
    if total < 0:
        raise ConfigError("total shots must be nonnegative")
    exact = [total * w for w in weights]
    alloc = [int(math.floor(e)) for e in exact]
    leftover = total - sum(alloc)
    order = sorted(range(len(weights)), key=lambda k: (-(exact[k] - alloc[k]), k))
    for k in order[:leftover]:
        alloc[k] += 1
    return alloc


def _correlator_axis(axis: str) -> str:
    key = axis.upper().replace("Σ", "S").replace("SIGMA", "S")
    if key in ("SX", "X"):
        return "SX"
    if key in ("SY", "Y"):
        return "SY"
    raise ConfigError(f"correlator axis must be SX or SY, got {axis!r}")


def correlator_prerotations(axis: str, target: int, partner: int, direction: int = 1) -> list[GateOp]:
    """Pre-rotations for ``<s^x s^x>`` (SX) or ``<s^y_target s^x_partner>`` (SY)."""
    kind = _correlator_axis(axis)
    first = prerotation_ops(target, "x" if kind == "SX" else "y", direction)
    return first + prerotation_ops(partner, "x", direction)


def sigma_prerotations(axis: str, target: int, n_qubits: int, direction: int = 1) -> list[GateOp]:
    """Pre-rotations for the full-register string: every partner qubit is measured along x."""
    kind = _correlator_axis(axis)
    ops = prerotation_ops(target, "x" if kind == "SX" else "y", direction)
    for q in range(n_qubits):
        if q != target:
            ops += prerotation_ops(q, "x", direction)
    return ops


def _parity_exact(state: StateVector) -> float:
    probs = np.abs(state.amplitudes) ** 2
    idx = np.arange(len(probs))
    odd = np.zeros(len(probs), dtype=bool)
    while idx.any():
        odd ^= (idx & 1).astype(bool)
        idx >>= 1
    return float(probs[~odd].sum() - probs[odd].sum())


def check_cat_support(state: StateVector, tol: float = SUPPORT_TOL) -> None:
    amps = state.amplitudes
    off = np.abs(amps[1:-1])
    if off.size and off.max() > tol:
        raise ProtocolDomainError(
            f"state has amplitude {off.max():.3g} outside span{{|0...0>, |1...1>}}"
        )


_SEEN_EXPERIMENTAL = set()


def estimate_rank2_entanglement(
    ensemble: MixedEnsemble,
    target: int,
    seed: SeedSpec | int = 0,
    noise: NoiseModel | None = None,
    mode: str = "exact",
    theory: float | None = None,
) -> EntanglementEstimate:
    """Correlator estimate of E for a rank-2 mixture on span{|0...0>, |1...1>}.

    Sampled mode first splits ``ensemble.total_shots`` across members by weight,
    then splits each member's share evenly between the SX and SY settings
    (the odd shot goes to SX). Members left with no shots are skipped.
    """
    n = ensemble.n_qubits
    if n < 2:
        raise StructuralError("correlator protocol needs at least two qubits")
    if not 0 <= target < n:
        raise StructuralError(f"target {target} out of range for {n} qubits")
    if n > 2 and n not in _SEEN_EXPERIMENTAL:
        _SEEN_EXPERIMENTAL.add(n)
        log.warning("correlator protocol on %d qubits is experimental", n)
    states = [run_circuit(c) for c, _ in ensemble.members]
    for s in states:
        check_cat_support(s)
    rotations = {kind: sigma_prerotations(kind, target, n) for kind in ("SX", "SY")}

    if mode == "exact":
        values = []
        for kind in ("SX", "SY"):
            total = 0.0
            for state, (_, w) in zip(states, ensemble.members):
                rotated = state
                for op in rotations[kind]:
                    rotated = apply_gate(rotated, op)
                total += w * _parity_exact(rotated)
            values.append(total)
        return _rank2_estimate(values, (0.0, 0.0), 0, theory)
    if mode != "sampled":
        raise ConfigError(f"mode must be 'exact' or 'sampled', got {mode!r}")

    seed = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    alloc = allocate_shots(ensemble.weights, ensemble.total_shots)
    values, errors = [], []
    for a, kind in enumerate(("SX", "SY")):
        terms = []
        for m, ((circ, w), state, n_m) in enumerate(zip(ensemble.members, states, alloc)):
            shots = (n_m + 1) // 2 if kind == "SX" else n_m // 2
            if shots == 0 or w == 0.0:
                continue
            rotated = state
            for op in rotations[kind]:
                rotated = apply_gate(rotated, op)
            counts = sample_circuit(
                circ.then(rotations[kind]), tuple(range(n)), shots, seed.derive(m, a), noise, state=rotated
            )
            terms.append((w, parity_expectation(counts), shots))
        if not terms:
            raise ConfigError("no ensemble member received shots")
        norm = sum(w for w, _, _ in terms)
        values.append(sum(w * p for w, p, _ in terms) / norm)
        errors.append(
            math.sqrt(sum((w / norm) ** 2 * max(0.0, 1 - p * p) / s for w, p, s in terms))
        )
    return _rank2_estimate(values, tuple(errors), sum(alloc), theory)


def _rank2_estimate(values, errors, shots, theory):
    sx, sy = values
    radicand = 1.0 - sx * sx - sy * sy
    clamped = not 0.0 <= radicand <= 1.0
    if clamped and radicand < -1e-12:
        log.info("correlator radicand %.3g clamped to [0, 1]", radicand)
    radicand = 0.0 if radicand < RADICAND_FLOOR else min(1.0, radicand)
    root = math.sqrt(radicand)
    E = max(0.0, min(0.5, 0.5 * (1.0 - root)))
    if root > 0:
        se = min(0.5, math.hypot(sx * errors[0], sy * errors[1]) / (2.0 * root))
    else:
        se = 0.5 * math.hypot(*errors)
    return EntanglementEstimate(
        components=(sx, sy),
        E_measured=E,
        E_theory=theory,
        shots_used=shots,
        std_error=se,
        clamped=clamped,
    )
