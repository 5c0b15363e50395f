"""Preparation circuits for the cat, Werner-like and Bell states."""

from __future__ import annotations

import math

from .errors import ConfigError
from .simcore import Circuit, ccx, ch, cx, h, rx, u3, x


def build_cat_circuit(n: int, theta: float, phi: float = 0.0) -> Circuit:
    """``cos(theta/2)|0...0> + e^{i phi} sin(theta/2)|1...1>``: U3 on qubit 0, then a CNOT chain."""
    ops = [u3(0, theta, phi, 0.0)]
    ops += [cx(q, q + 1) for q in range(n - 1)]
    return Circuit(n, ops)


def build_werner_circuit(theta: float, not_gate: str = "x") -> Circuit:
    """``sin(theta/2)|001> + cos(theta/2)(|010> + |100>)/sqrt(2)``.

    U3(pi - theta) on qubit 0 splits the weight between the |001> branch and
    the W branch, CH and a CNOT spread the W branch over qubits 0 and 1, and a
    Toffoli conjugated by NOTs flips qubit 2 on |00>. ``not_gate="rx"`` writes
    every NOT as RX(pi), which differs only by a global phase.
    """
    if not_gate == "x":
        flip = x
    elif not_gate == "rx":
        flip = lambda q: rx(q, math.pi)  # noqa: E731
    else:
        raise ConfigError(f"not_gate must be 'x' or 'rx', got {not_gate!r}")
    ops = [
        u3(0, math.pi - theta, 0.0, 0.0),
        ch(0, 1),
        cx(1, 0),
        flip(0),
        flip(1),
        ccx(0, 1, 2),
        flip(0),
        flip(1),
    ]
    return Circuit(3, ops)


def build_bell_circuit(sign: str = "plus") -> Circuit:
    if sign == "plus":
        return Circuit(2, [h(0), cx(0, 1)])
    if sign == "minus":
        return Circuit(2, [x(0), h(0), cx(0, 1)])
    raise ConfigError(f"sign must be 'plus' or 'minus', got {sign!r}")
