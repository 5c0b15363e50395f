import math

import numpy as np
import pytest

from meanspin.simcore import Circuit, GateKind, GateOp

_ACCEPTANCE = []

_ONE_Q = [GateKind.U3, GateKind.H, GateKind.X, GateKind.RX, GateKind.RY, GateKind.RZ]
_MULTI_Q = [GateKind.CNOT, GateKind.CH, GateKind.SWAP, GateKind.CCX]


def random_op(rng, n, kinds=None):
    pool = kinds or (_ONE_Q + [k for k in _MULTI_Q if k.arity <= n])
    kind = pool[rng.integers(len(pool))]
    qubits = tuple(int(q) for q in rng.choice(n, size=kind.arity, replace=False))
    params = []
    if kind is GateKind.U3:
        params = [rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)]
    elif kind.n_params:
        params = [rng.uniform(-2 * math.pi, 2 * math.pi)]
    return GateOp(kind, qubits, tuple(params))


def random_circuit(rng, n, n_gates, kinds=None):
    return Circuit(n, [random_op(rng, n, kinds) for _ in range(n_gates)])


@pytest.fixture
def rng():
    return np.random.default_rng(20200415)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(criterion, passed, detail=""):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
