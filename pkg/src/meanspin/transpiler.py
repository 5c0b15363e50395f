"""Circuit text format, basis decomposition and SWAP routing.

Text format, one statement per line::

    qubits <n>
    <gate> <qubit indices...> [angles in radians...]

Gates: ``u3 q t p l``, ``h q``, ``x q``, ``rx q a``, ``ry q a``, ``rz q a``,
``cx c t``, ``ch c t``, ``ccx c1 c2 t``, ``swap a b``. ``#`` starts a
comment, blank lines are ignored, angles are decimal literals.
"""

from __future__ import annotations

import logging
import math
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .devices import load_device
from .errors import (
    AngleLiteralError,
    ArityError,
    ConfigError,
    HeaderError,
    QubitRangeError,
    RoutingError,
    StructuralError,
    UnknownGateError,
)
from .simcore import (
    Circuit,
    GateKind,
    GateOp,
    StateVector,
    cx,
    h,
    run_circuit,
    ry,
    rz,
)

log = logging.getLogger(__name__)

# Counts the device's own transpiler produced for the Werner preparation; logged, not enforced.
DEVICE_REFERENCE_WERNER_COUNTS = {"cnot": 18, "single_qubit": 13}

_TOKEN = re.compile(r"\S+")
_ANGLE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")
_INDEX = re.compile(r"\d+\Z")


# ---------------------------------------------------------------------------
# parsing / printing
# ---------------------------------------------------------------------------


def parse_circuit_text(source: str) -> Circuit:
    n_qubits = None
    ops: list[GateOp] = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        word, col = tokens[0]
        if n_qubits is None:
            if word != "qubits" or len(tokens) != 2 or not _INDEX.match(tokens[1][0]):
                raise HeaderError("first statement must be 'qubits <n>'", lineno, col)
            n_qubits = int(tokens[1][0])
            if not 1 <= n_qubits <= 24:
                raise HeaderError(f"qubit count {n_qubits} outside [1, 24]", lineno, tokens[1][1])
            continue
        if word == "qubits":
            raise HeaderError("repeated 'qubits' header", lineno, col)
        try:
            kind = GateKind(word)
        except ValueError:
            raise UnknownGateError(f"unknown gate {word!r}", lineno, col) from None
        args = tokens[1:]
        expected = kind.arity + kind.n_params
        if len(args) != expected:
            raise ArityError(
                f"{word} takes {kind.arity} qubit(s) and {kind.n_params} angle(s), got {len(args)} argument(s)",
                lineno,
                args[expected][1] if len(args) > expected else col,
            )
        qubits = []
        for tok, tcol in args[: kind.arity]:
            if not _INDEX.match(tok):
                raise QubitRangeError(f"qubit index {tok!r} is not a nonnegative integer", lineno, tcol)
            q = int(tok)
            if q >= n_qubits:
                raise QubitRangeError(f"qubit {q} out of range for {n_qubits} qubits", lineno, tcol)
            if q in qubits:
                raise QubitRangeError(f"qubit {q} repeated", lineno, tcol)
            qubits.append(q)
        params = []
        for tok, tcol in args[kind.arity :]:
            if not _ANGLE.match(tok):
                raise AngleLiteralError(f"bad angle literal {tok!r}", lineno, tcol)
            params.append(float(tok))
        ops.append(GateOp(kind, tuple(qubits), tuple(params)))
    if n_qubits is None:
        raise HeaderError("missing 'qubits <n>' header", 1, 1)
    return Circuit(n_qubits, ops)


def format_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_qubits}"]
    for op in circuit.ops:
        parts = [op.kind.value, *map(str, op.qubits), *(repr(p) for p in op.params)]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_circuit(path: str | Path) -> Circuit:
    return parse_circuit_text(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

_QUARTER = math.pi / 4


def decompose_ch(op: GateOp) -> list[GateOp]:
    """CH as ``RY(pi/4) . CX . RY(-pi/4)`` on the target, exact (no phase)."""
    if op.kind is not GateKind.CH:
        raise StructuralError(f"expected ch, got {op.kind.value}")
    c, t = op.qubits
    return [ry(t, _QUARTER), cx(c, t), ry(t, -_QUARTER)]


def decompose_toffoli(op: GateOp) -> list[GateOp]:
    """Six-CNOT Toffoli with T gates written as RZ(pi/4), equal up to global phase."""
    if op.kind is not GateKind.CCX:
        raise StructuralError(f"expected ccx, got {op.kind.value}")
    a, b, c = op.qubits
    t = lambda q: rz(q, _QUARTER)  # noqa: E731
    tdg = lambda q: rz(q, -_QUARTER)  # noqa: E731
    return [
        h(c), cx(b, c), tdg(c), cx(a, c), t(c), cx(b, c), tdg(c), cx(a, c),
        t(b), t(c), h(c), cx(a, b), t(a), tdg(b), cx(a, b),
    ]


def decompose_swap(op: GateOp) -> list[GateOp]:
    a, b = op.qubits
    return [cx(a, b), cx(b, a), cx(a, b)]


_RULES = {
    GateKind.CH: decompose_ch,
    GateKind.CCX: decompose_toffoli,
    GateKind.SWAP: decompose_swap,
}


def decompose(circuit: Circuit) -> Circuit:
    """Rewrite into single-qubit gates plus CNOT."""
    out: list[GateOp] = []
    for op in circuit.ops:
        rule = _RULES.get(op.kind)
        out.extend(rule(op) if rule else [op])
    return Circuit(circuit.n_qubits, out)


# ---------------------------------------------------------------------------
# coupling maps and routing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CouplingMap:
    n_physical: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b or not (0 <= a < self.n_physical and 0 <= b < self.n_physical):
                raise ConfigError(f"bad coupling edge ({a}, {b}) for {self.n_physical} qubits")
            edges.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(edges))

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbors(self, q: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == q} | {a for a, b in self.edges if b == q})

    def shortest_path(self, src: int, dst: int) -> list[int] | None:
        """BFS path; neighbours are expanded in ascending index order."""
        prev = {src: None}
        queue = deque([src])
        while queue:
            q = queue.popleft()
            if q == dst:
                path = [q]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            for nb in self.neighbors(q):
                if nb not in prev:
                    prev[nb] = q
                    queue.append(nb)
        return None

    def is_connected(self) -> bool:
        return all(self.shortest_path(0, q) is not None for q in range(self.n_physical))

    @classmethod
    def from_dict(cls, data) -> "CouplingMap":
        try:
            return cls(int(data["n_physical"]), frozenset(tuple(e) for e in data["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed coupling map: {exc}") from exc


def ourense_map(path: str | Path | None = None) -> CouplingMap:
    """Coupling graph of the 5-qubit device, read from the bundled device file by default."""
    return CouplingMap.from_dict(load_device(path))


@dataclass(frozen=True)
class LayoutMap:
    """``physical[l]`` is the physical qubit holding logical qubit ``l``."""

    physical: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "physical", tuple(int(p) for p in self.physical))
        if len(set(self.physical)) != len(self.physical):
            raise ConfigError(f"layout {self.physical} is not injective")

    @classmethod
    def trivial(cls, n: int) -> "LayoutMap":
        return cls(tuple(range(n)))

    def __getitem__(self, logical):
        return self.physical[logical]

    def __len__(self):
        return len(self.physical)


@dataclass(frozen=True)
class GateCountReport:
    cnot_count: int
    single_qubit_count: int
    swap_count: int
    depth: int
    initial_layout: LayoutMap | None = None
    final_layout: LayoutMap | None = None

    def as_dict(self) -> dict:
        out = {
            "cnot_count": self.cnot_count,
            "single_qubit_count": self.single_qubit_count,
            "swap_count": self.swap_count,
            "depth": self.depth,
        }
        if self.initial_layout is not None:
            out["initial_layout"] = list(self.initial_layout.physical)
        if self.final_layout is not None:
            out["final_layout"] = list(self.final_layout.physical)
        return out


def circuit_depth(circuit: Circuit) -> int:
    level = [0] * circuit.n_qubits
    for op in circuit.ops:
        d = max(level[q] for q in op.qubits) + 1
        for q in op.qubits:
            level[q] = d
    return max(level, default=0)


def count_gates(circuit: Circuit, swap_count: int = 0, initial=None, final=None) -> GateCountReport:
    two = sum(1 for op in circuit.ops if op.kind is GateKind.CNOT)
    one = sum(1 for op in circuit.ops if len(op.qubits) == 1)
    return GateCountReport(two, one, swap_count, circuit_depth(circuit), initial, final)


def route(
    circuit: Circuit, cmap: CouplingMap, layout: LayoutMap | None = None
) -> tuple[Circuit, GateCountReport]:
    """Place ``circuit`` on ``cmap`` inserting SWAPs (as 3 CNOTs) along shortest paths.

    For a non-adjacent CNOT the control is walked toward the target until the
    two are neighbours. The report's ``final_layout`` gives where each logical
    qubit ends up.
    """
    layout = LayoutMap.trivial(circuit.n_qubits) if layout is None else layout
    if len(layout) != circuit.n_qubits:
        raise ConfigError(f"layout has {len(layout)} entries for {circuit.n_qubits} logical qubits")
    if any(not 0 <= p < cmap.n_physical for p in layout.physical):
        raise ConfigError(f"layout {layout.physical} exceeds {cmap.n_physical} physical qubits")
    l2p = list(layout.physical)
    p2l = {p: l for l, p in enumerate(l2p)}
    out: list[GateOp] = []
    swaps = 0
    for op in circuit.ops:
        if len(op.qubits) == 1:
            out.append(GateOp(op.kind, (l2p[op.qubits[0]],), op.params))
            continue
        if op.kind is not GateKind.CNOT:
            raise StructuralError(f"route expects a decomposed circuit, found {op.kind.value}")
        lc, lt = op.qubits
        pc, pt = l2p[lc], l2p[lt]
        if not cmap.adjacent(pc, pt):
            path = cmap.shortest_path(pc, pt)
            if path is None:
                raise RoutingError(f"no path between physical qubits {pc} and {pt}")
            for a, b in zip(path[:-2], path[1:-1]):
                out.extend([cx(a, b), cx(b, a), cx(a, b)])
                swaps += 1
                la, lb = p2l.pop(a, None), p2l.pop(b, None)
                if la is not None:
                    l2p[la], p2l[b] = b, la
                if lb is not None:
                    l2p[lb], p2l[a] = a, lb
            pc = l2p[lc]
        out.append(cx(pc, pt))
    routed = Circuit(cmap.n_physical, out)
    return routed, count_gates(routed, swaps, layout, LayoutMap(tuple(l2p)))


def transpile(
    circuit: Circuit, cmap: CouplingMap, layout: LayoutMap | None = None
) -> tuple[Circuit, GateCountReport]:
    return route(decompose(circuit), cmap, layout)


def off_edge_gates(circuit: Circuit, cmap: CouplingMap) -> list[GateOp]:
    return [
        op for op in circuit.ops
        if len(op.qubits) > 2 or (len(op.qubits) == 2 and not cmap.adjacent(*op.qubits))
    ]


def embed_state(amplitudes, layout: LayoutMap, n_physical: int) -> np.ndarray:
    """Place a logical state on physical qubits; qubits outside the layout are |0>."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    n_log = len(layout)
    idx = np.arange(1 << n_log)
    phys = np.zeros_like(idx)
    for l, p in enumerate(layout.physical):
        phys |= ((idx >> (n_log - 1 - l)) & 1) << (n_physical - 1 - p)
    out = np.zeros(1 << n_physical, dtype=complex)
    out[phys] = amplitudes
    return out


def routing_deviation(original: Circuit, routed: Circuit, report: GateCountReport) -> float:
    """Max entry deviation between the routed action and the original, after removing one global phase.

    Compares, for every logical basis input, the routed output against the
    original output re-embedded under the final layout.
    """
    n_log, n_phys = original.n_qubits, routed.n_qubits
    got, want = [], []
    for j in range(1 << n_log):
        basis = np.zeros(1 << n_log, dtype=complex)
        basis[j] = 1.0
        start = StateVector(embed_state(basis, report.initial_layout, n_phys))
        got.append(run_circuit(routed, start).amplitudes)
        ideal = run_circuit(original, StateVector(basis)).amplitudes
        want.append(embed_state(ideal, report.final_layout, n_phys))
    got, want = np.stack(got, axis=1), np.stack(want, axis=1)
    inner = np.vdot(want, got)
    return float(np.max(np.abs(got * np.exp(-1j * np.angle(inner)) - want)))


def werner_transpile_report(
    circuit: Circuit, cmap: CouplingMap | None = None, layout: Sequence[int] = (1, 3, 4)
) -> GateCountReport:
    """Decompose and route a 3-qubit preparation, logging the device's reference counts."""
    cmap = ourense_map() if cmap is None else cmap
    _, report = transpile(circuit, cmap, LayoutMap(tuple(layout)))
    log.info(
        "routed Werner preparation: %d CNOT, %d single-qubit (device reference %d / %d)",
        report.cnot_count,
        report.single_qubit_count,
        DEVICE_REFERENCE_WERNER_COUNTS["cnot"],
        DEVICE_REFERENCE_WERNER_COUNTS["single_qubit"],
    )
    return report
