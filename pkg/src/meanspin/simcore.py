"""Dense state-vector simulation of small qubit registers.

Ordering: the ket ``|q0 q1 ... q_{n-1}>`` is read left to right and qubit 0 is
the most significant bit of the amplitude index, so ``|001>`` has index 1.

Rotations follow ``R_A(a) = exp(-i a sigma_A / 2)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import ConfigError, StructuralError

MAX_QUBITS = 24
NORM_TOL = 1e-12

_SQ2 = 1.0 / math.sqrt(2.0)

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class GateKind(str, enum.Enum):
    U3 = "u3"
    H = "h"
    X = "x"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CNOT = "cx"
    CH = "ch"
    CCX = "ccx"
    SWAP = "swap"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def n_params(self) -> int:
        return _N_PARAMS.get(self, 0)


_ARITY = {
    GateKind.U3: 1, GateKind.H: 1, GateKind.X: 1, GateKind.RX: 1, GateKind.RY: 1,
    GateKind.RZ: 1, GateKind.CNOT: 2, GateKind.CH: 2, GateKind.SWAP: 2, GateKind.CCX: 3,
}
_N_PARAMS = {
    GateKind.U3: 3, GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1,
}


@dataclass(frozen=True)
class GateOp:
    """One gate on specific qubits. For controlled kinds the controls come first."""

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.qubits) != kind.arity:
            raise StructuralError(f"{kind.value} acts on {kind.arity} qubit(s), got {len(self.qubits)}")
        if len(self.params) != kind.n_params:
            raise StructuralError(f"{kind.value} takes {kind.n_params} angle(s), got {len(self.params)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise StructuralError(f"{kind.value} qubits must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise StructuralError(f"negative qubit index in {self.qubits}")


def u3(q, theta, phi, lam):
    return GateOp(GateKind.U3, (q,), (theta, phi, lam))


def h(q):
    return GateOp(GateKind.H, (q,))


def x(q):
    return GateOp(GateKind.X, (q,))


def rx(q, angle):
    return GateOp(GateKind.RX, (q,), (angle,))


def ry(q, angle):
    return GateOp(GateKind.RY, (q,), (angle,))


def rz(q, angle):
    return GateOp(GateKind.RZ, (q,), (angle,))


def cx(control, target):
    return GateOp(GateKind.CNOT, (control, target))


def ch(control, target):
    return GateOp(GateKind.CH, (control, target))


def ccx(c1, c2, target):
    return GateOp(GateKind.CCX, (c1, c2, target))


def swap(a, b):
    return GateOp(GateKind.SWAP, (a, b))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[GateOp, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        _check_n_qubits(self.n_qubits)
        for op in self.ops:
            if max(op.qubits) >= self.n_qubits:
                raise StructuralError(
                    f"{op.kind.value} on {op.qubits} exceeds circuit width {self.n_qubits}"
                )

    def then(self, ops: Iterable[GateOp]) -> "Circuit":
        """Return a new circuit with ``ops`` appended."""
        return Circuit(self.n_qubits, self.ops + tuple(ops))

    def __len__(self):
        return len(self.ops)


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = int(round(math.log2(len(amps)))) if len(amps) else 0
        if len(amps) < 2 or 1 << n != len(amps):
            raise StructuralError(f"amplitude count {len(amps)} is not 2**n with n >= 1")
        _check_n_qubits(n)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(amps)
        if normalize:
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise StructuralError(f"state norm {norm!r} differs from 1")
        return cls(amps)

    @property
    def n_qubits(self) -> int:
        return len(self.amplitudes).bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self):
        return len(self.amplitudes)


def _check_n_qubits(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ConfigError(f"n_qubits must be an integer in [1, {MAX_QUBITS}], got {n!r}")


def init_zero_state(n_qubits: int) -> StateVector:
    _check_n_qubits(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps)


def _u3_matrix(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (lam + phi)) * c],
        ],
        dtype=complex,
    )


def _controlled(u):
    k = u.shape[0]
    out = np.eye(2 * k, dtype=complex)
    out[k:, k:] = u
    return out


_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2
_FIXED = {
    GateKind.H: _H,
    GateKind.X: PAULI["x"],
    GateKind.CNOT: _controlled(PAULI["x"]),
    GateKind.CH: _controlled(_H),
    GateKind.CCX: _controlled(_controlled(PAULI["x"])),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}
for _m in _FIXED.values():
    _m.setflags(write=False)


def gate_matrix(op: GateOp) -> np.ndarray:
    """Matrix of ``op`` in its local basis, ``op.qubits[0]`` most significant."""
    kind = op.kind
    if kind in _FIXED:
        return _FIXED[kind].copy()
    if kind is GateKind.U3:
        return _u3_matrix(*op.params)
    a = op.params[0] / 2
    c, s = math.cos(a), math.sin(a)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array([[np.exp(-1j * a), 0], [0, np.exp(1j * a)]], dtype=complex)
    raise StructuralError(f"no matrix for {kind!r}")  # pragma: no cover


def apply_matrix(state: StateVector, mat: np.ndarray, qubits: Sequence[int]) -> StateVector:
    """Apply an arbitrary ``2**k x 2**k`` matrix to ``qubits`` of ``state``."""
    n = state.n_qubits
    if max(qubits) >= n or min(qubits) < 0:
        raise StructuralError(f"qubits {tuple(qubits)} out of range for {n}-qubit state")
    if mat.shape != (1 << len(qubits),) * 2:
        raise StructuralError(f"matrix shape {mat.shape} does not match {len(qubits)} qubit(s)")
    return StateVector(kernels.apply_unitary(state.amplitudes, mat, tuple(qubits), n))


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    return apply_matrix(state, gate_matrix(op), op.qubits)


def run_circuit(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    state = init_zero_state(circuit.n_qubits) if initial is None else initial
    if state.n_qubits != circuit.n_qubits:
        raise StructuralError(
            f"initial state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}"
        )
    for op in circuit.ops:
        state = apply_gate(state, op)
    return state


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full ``2**n x 2**n`` unitary, built column by column."""
    dim = 1 << circuit.n_qubits
    cols = []
    for j in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[j] = 1.0
        cols.append(run_circuit(circuit, StateVector(basis)).amplitudes)
    return np.stack(cols, axis=1)


def _check_subset(n, qubits):
    qubits = tuple(int(q) for q in qubits)
    if not qubits:
        raise ConfigError("measured qubit subset is empty")
    if len(set(qubits)) != len(qubits) or min(qubits) < 0 or max(qubits) >= n:
        raise StructuralError(f"invalid qubit subset {qubits} for {n} qubits")
    return qubits


def probability_vector(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Marginal outcome probabilities for ``qubits``, first listed qubit most significant."""
    qubits = _check_subset(state.n_qubits, qubits)
    probs = np.abs(state.amplitudes) ** 2
    return kernels.marginal_probabilities(probs, qubits, state.n_qubits)


def bitstring(index: int, width: int) -> str:
    return format(index, f"0{width}b")


def exact_probabilities(
    state: StateVector, measured_qubits: Sequence[int], tol: float = 1e-14
) -> dict[str, float]:
    """Outcome probabilities keyed by bitstring; outcomes below ``tol`` are dropped."""
    vec = probability_vector(state, measured_qubits)
    m = len(measured_qubits)
    return {bitstring(i, m): float(p) for i, p in enumerate(vec) if p > tol}


def reduced_density_matrix(state: StateVector, qubit: int) -> np.ndarray:
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise StructuralError(f"qubit {qubit} out of range for {n} qubits")
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), qubit, 0).reshape(2, -1)
    return psi @ psi.conj().T


def pauli_expectation(state: StateVector, paulis: Mapping[int, str]) -> float:
    """``<psi| P |psi>`` for a tensor product of Paulis given as ``{qubit: 'x'|'y'|'z'}``."""
    phi = state
    for q, label in paulis.items():
        phi = apply_matrix(phi, PAULI[label.lower()], (q,))
    return float(np.real(np.vdot(state.amplitudes, phi.amplitudes)))


def overlap(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|``; 1 means equal up to global phase."""
    if a.n_qubits != b.n_qubits:
        raise StructuralError("states have different widths")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def equal_up_to_phase(a: StateVector, b: StateVector, tol: float = 1e-12) -> bool:
    phase_free = a.amplitudes * np.exp(-1j * np.angle(np.vdot(b.amplitudes, a.amplitudes)))
    return bool(np.max(np.abs(phase_free - b.amplitudes)) < tol)


def unitaries_equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-12) -> bool:
    inner = np.vdot(v, u)
    if abs(inner) < 1e-300:
        return False
    return bool(np.max(np.abs(u * np.exp(-1j * np.angle(inner)) - v)) < tol)
