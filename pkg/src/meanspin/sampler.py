"""Finite-shot measurement with seeded substreams and a simple device noise model.

Readout error is a symmetric per-qubit bit flip applied to each reported bit.
Gate error is a stochastic unraveling of depolarizing noise: after every gate,
with the configured probability, a uniformly random Pauli string (identity
included) hits the qubits the gate touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .devices import load_device
from .errors import ConfigError, StructuralError
from .simcore import (
    PAULI,
    Circuit,
    GateOp,
    StateVector,
    _check_subset,
    apply_gate,
    apply_matrix,
    bitstring,
    init_zero_state,
    probability_vector,
    run_circuit,
)

_MASK64 = (1 << 64) - 1
_PAULI_ORDER = ("i", "x", "y", "z")


def _check_prob(name, p):
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ConfigError(f"{name} must lie in [0, 1], got {p!r}")
    return p


@dataclass(frozen=True)
class NoiseModel:
    readout_flip: Mapping[int, float] = field(default_factory=dict)
    gate_depolarizing_1q: Mapping[int, float] = field(default_factory=dict)
    gate_depolarizing_2q: float = 0.0
    enabled: bool = True

    def __post_init__(self):
        ro = {int(q): _check_prob(f"readout_flip[{q}]", p) for q, p in dict(self.readout_flip).items()}
        d1 = {
            int(q): _check_prob(f"gate_depolarizing_1q[{q}]", p)
            for q, p in dict(self.gate_depolarizing_1q).items()
        }
        object.__setattr__(self, "readout_flip", ro)
        object.__setattr__(self, "gate_depolarizing_1q", d1)
        object.__setattr__(self, "gate_depolarizing_2q", _check_prob("gate_depolarizing_2q", self.gate_depolarizing_2q))
        object.__setattr__(self, "enabled", bool(self.enabled))

    @classmethod
    def disabled(cls) -> "NoiseModel":
        return cls(enabled=False)

    @classmethod
    def ourense(cls) -> "NoiseModel":
        """Single-qubit gate and readout errors of ibmq-ourense qubits 0 and 1 (bundled device file)."""
        return cls.from_dict(load_device()["noise"])

    @classmethod
    def from_dict(cls, data: Mapping) -> "NoiseModel":
        allowed = {"readout_flip", "gate_depolarizing_1q", "gate_depolarizing_2q", "enabled"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown noise keys: {sorted(unknown)}")
        try:
            return cls(
                readout_flip={int(k): v for k, v in dict(data.get("readout_flip", {})).items()},
                gate_depolarizing_1q={int(k): v for k, v in dict(data.get("gate_depolarizing_1q", {})).items()},
                gate_depolarizing_2q=data.get("gate_depolarizing_2q", 0.0),
                enabled=data.get("enabled", True),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed noise model: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "readout_flip": {str(k): v for k, v in sorted(self.readout_flip.items())},
            "gate_depolarizing_1q": {str(k): v for k, v in sorted(self.gate_depolarizing_1q.items())},
            "gate_depolarizing_2q": self.gate_depolarizing_2q,
            "enabled": self.enabled,
        }

    def gate_error(self, op: GateOp) -> float:
        if not self.enabled:
            return 0.0
        if len(op.qubits) == 1:
            return self.gate_depolarizing_1q.get(op.qubits[0], 0.0)
        return self.gate_depolarizing_2q

    def has_gate_noise(self) -> bool:
        return self.enabled and (self.gate_depolarizing_2q > 0 or any(self.gate_depolarizing_1q.values()))

    def flip_probs(self, qubits: Sequence[int]) -> np.ndarray | None:
        if not self.enabled:
            return None
        probs = np.array([self.readout_flip.get(q, 0.0) for q in qubits], dtype=np.float64)
        return probs if probs.any() else None


@dataclass(frozen=True)
class SeedSpec:
    """Addresses one reproducible random substream.

    ``(master_seed, stream_index, *path)`` is hashed by numpy's SeedSequence into
    an independent generator state, so substreams do not depend on the order in
    which they are consumed.
    """

    master_seed: int
    stream_index: int = 0
    path: tuple[int, ...] = ()

    def derive(self, *keys: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_index, self.path + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=int(self.master_seed) & _MASK64,
            spawn_key=(int(self.stream_index), *self.path),
        )
        return np.random.Generator(np.random.PCG64(seq))


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.generator()
    return SeedSpec(int(seed)).generator()


@dataclass(frozen=True)
class Counts:
    shots: int
    table: Mapping[str, int]

    def __post_init__(self):
        table = {str(k): int(v) for k, v in dict(self.table).items()}
        if self.shots < 1:
            raise StructuralError(f"shots must be >= 1, got {self.shots}")
        if any(v < 0 for v in table.values()):
            raise StructuralError("negative count")
        if sum(table.values()) != self.shots:
            raise StructuralError(f"counts sum to {sum(table.values())}, expected {self.shots}")
        if len({len(k) for k in table}) > 1:
            raise StructuralError("bitstring keys of unequal length")
        object.__setattr__(self, "table", dict(sorted(table.items())))

    @property
    def width(self) -> int:
        return len(next(iter(self.table))) if self.table else 0

    def __getitem__(self, key):
        return self.table.get(key, 0)

    def merged(self, other: "Counts") -> "Counts":
        table = dict(self.table)
        for k, v in other.table.items():
            table[k] = table.get(k, 0) + v
        return Counts(self.shots + other.shots, table)


def _draw_outcomes(probs, shots, rng, flip_probs):
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    outcomes = kernels.inverse_cdf(cdf, rng.random(shots))
    if flip_probs is not None:
        outcomes = kernels.readout_flips(outcomes, flip_probs, rng.random((shots, len(flip_probs))))
    return outcomes


def _tabulate(outcomes, m):
    hist = np.bincount(outcomes, minlength=1 << m)
    return {bitstring(i, m): int(c) for i, c in enumerate(hist) if c}


def sample_counts(
    state: StateVector,
    measured_qubits: Sequence[int],
    shots: int,
    seed,
    noise: NoiseModel | None = None,
) -> Counts:
    """Draw ``shots`` computational-basis outcomes of ``measured_qubits``.

    One uniform per shot selects the outcome by inverse CDF; with readout
    noise enabled, one further uniform per (shot, bit) decides each flip.
    """
    qubits = _check_subset(state.n_qubits, measured_qubits)
    if shots < 1:
        raise ConfigError(f"shots must be >= 1, got {shots}")
    rng = _as_generator(seed)
    flip = noise.flip_probs(qubits) if noise is not None else None
    outcomes = _draw_outcomes(probability_vector(state, qubits), shots, rng, flip)
    return Counts(shots, _tabulate(outcomes, len(qubits)))


def _pauli_string(code, k):
    labels = []
    for j in range(k - 1, -1, -1):
        labels.append(_PAULI_ORDER[(code >> (2 * j)) & 3])
    mat = np.ones((1, 1), dtype=complex)
    for lab in labels:
        mat = np.kron(mat, PAULI[lab])
    return mat


def _draw_error_patterns(circuit: Circuit, noise: NoiseModel, rng, shots):
    """Per-shot Pauli codes, one column per gate; code 0 is the identity."""
    pattern = np.zeros((shots, len(circuit.ops)), dtype=np.int64)
    for g, op in enumerate(circuit.ops):
        p = noise.gate_error(op)
        if p <= 0.0:
            continue
        hit = rng.random(shots) < p
        which = rng.integers(0, 4 ** len(op.qubits), size=shots)
        pattern[:, g] = np.where(hit, which, 0)
    return pattern


def run_trajectory(circuit: Circuit, pauli_codes: Sequence[int], initial: StateVector | None = None) -> StateVector:
    """Run ``circuit`` inserting the Pauli string ``pauli_codes[g]`` after gate ``g``."""
    state = init_zero_state(circuit.n_qubits) if initial is None else initial
    for op, code in zip(circuit.ops, pauli_codes):
        state = apply_gate(state, op)
        if code:
            state = apply_matrix(state, _pauli_string(int(code), len(op.qubits)), op.qubits)
    return state


def run_noisy_circuit(circuit: Circuit, noise: NoiseModel, seed) -> StateVector:
    """One stochastic trajectory of ``circuit`` under ``noise``."""
    rng = _as_generator(seed)
    pattern = _draw_error_patterns(circuit, noise, rng, 1)[0]
    return run_trajectory(circuit, pattern)


def sample_circuit(
    circuit: Circuit,
    measured_qubits: Sequence[int],
    shots: int,
    seed,
    noise: NoiseModel | None = None,
    state: StateVector | None = None,
) -> Counts:
    """Sample ``circuit`` shot by shot, each shot on its own noise trajectory.

    Shots that drew the same error pattern share one simulated trajectory,
    which is exact in distribution and keeps the common error-free case cheap.
    ``state`` may pass in the precomputed noiseless output.
    """
    if noise is None or not noise.has_gate_noise():
        final = run_circuit(circuit) if state is None else state
        return sample_counts(final, measured_qubits, shots, seed, noise)
    qubits = _check_subset(circuit.n_qubits, measured_qubits)
    if shots < 1:
        raise ConfigError(f"shots must be >= 1, got {shots}")
    rng = _as_generator(seed)
    patterns = _draw_error_patterns(circuit, noise, rng, shots)
    uniq, group_sizes = np.unique(patterns, axis=0, return_counts=True)
    flip = noise.flip_probs(qubits)
    parts = []
    for codes, size in zip(uniq, group_sizes):
        traj = run_trajectory(circuit, codes)
        parts.append(_draw_outcomes(probability_vector(traj, qubits), int(size), rng, flip))
    return Counts(shots, _tabulate(np.concatenate(parts), len(qubits)))


def mean_from_counts(counts: Counts, bit_position: int) -> float:
    """``(N0 - N1) / shots`` for one character position of the keys."""
    if not 0 <= bit_position < counts.width:
        raise StructuralError(f"bit position {bit_position} outside key width {counts.width}")
    n1 = sum(v for k, v in counts.table.items() if k[bit_position] == "1")
    return (counts.shots - 2 * n1) / counts.shots


def parity_expectation(counts: Counts) -> float:
    """Mean of ``(-1)**(number of ones)`` over all shots, any key width."""
    odd = sum(v for k, v in counts.table.items() if k.count("1") % 2)
    return (counts.shots - 2 * odd) / counts.shots


def parity_from_counts(counts: Counts) -> float:
    """``(N00 - N01 - N10 + N11) / shots`` for two-bit keys."""
    if counts.width != 2:
        raise StructuralError(f"parity needs 2-bit keys, got width {counts.width}")
    return parity_expectation(counts)


def binomial_std_error(mean: float, shots: int) -> float:
    """Standard error of a +/-1 sample mean."""
    return math.sqrt(max(0.0, 1.0 - mean * mean) / shots)
