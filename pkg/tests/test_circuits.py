import cmath
import math

import numpy as np
import pytest

from meanspin.circuits import build_bell_circuit, build_cat_circuit, build_werner_circuit
from meanspin.errors import ConfigError
from meanspin.simcore import GateKind, StateVector, equal_up_to_phase, overlap, run_circuit

S2 = 1 / math.sqrt(2)


def werner_target(theta):
    v = np.zeros(8, dtype=complex)
    v[0b001] = math.sin(theta / 2)
    v[0b010] = v[0b100] = math.cos(theta / 2) * S2
    return StateVector.from_amplitudes(v)


def cat_target(n, theta, phi):
    v = np.zeros(1 << n, dtype=complex)
    v[0] = math.cos(theta / 2)
    v[-1] += cmath.exp(1j * phi) * math.sin(theta / 2)
    return v


class TestCat:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    @pytest.mark.parametrize("theta,phi", [(0.0, 0.0), (0.7, 1.9), (math.pi, 4.0), (2.2, 6.0)])
    def test_amplitudes(self, n, theta, phi):
        s = run_circuit(build_cat_circuit(n, theta, phi))
        np.testing.assert_allclose(s.amplitudes, cat_target(n, theta, phi), atol=1e-12)

    def test_structure(self):
        c = build_cat_circuit(4, 0.3, 0.1)
        assert c.ops[0].kind is GateKind.U3 and c.ops[0].params == (0.3, 0.1, 0.0)
        assert [op.qubits for op in c.ops[1:]] == [(0, 1), (1, 2), (2, 3)]

    def test_n3_pi(self):
        s = run_circuit(build_cat_circuit(3, math.pi, 0.8))
        assert abs(s.amplitudes[7]) == pytest.approx(1.0, abs=1e-12)
        assert cmath.phase(s.amplitudes[7]) == pytest.approx(0.8, abs=1e-12)

    def test_n4_bell_like(self):
        s = run_circuit(build_cat_circuit(4, math.pi / 2, 0.0))
        expected = np.zeros(16)
        expected[0] = expected[15] = S2
        np.testing.assert_allclose(s.amplitudes, expected, atol=1e-12)


class TestWerner:
    @pytest.mark.parametrize("theta", [k * math.pi / 16 for k in range(17)])
    @pytest.mark.parametrize("not_gate", ["x", "rx"])
    def test_state(self, theta, not_gate):
        s = run_circuit(build_werner_circuit(theta, not_gate))
        assert equal_up_to_phase(s, werner_target(theta))

    def test_x_variant_exact_amplitudes(self):
        s = run_circuit(build_werner_circuit(0.9))
        np.testing.assert_allclose(s.amplitudes, werner_target(0.9).amplitudes, atol=1e-12)

    def test_endpoints(self):
        assert abs(run_circuit(build_werner_circuit(math.pi)).amplitudes[0b001]) == pytest.approx(1, abs=1e-12)
        s = run_circuit(build_werner_circuit(0.0))
        np.testing.assert_allclose(np.abs(s.amplitudes[[0b010, 0b100]]), [S2, S2], atol=1e-12)

    def test_half_pi_amplitudes(self):
        a = run_circuit(build_werner_circuit(math.pi / 2)).amplitudes
        assert abs(a[0b001]) == pytest.approx(0.7071067811865476, abs=1e-12)
        assert abs(a[0b010]) == pytest.approx(0.5, abs=1e-12)
        assert abs(a[0b100]) == pytest.approx(0.5, abs=1e-12)

    def test_gate_set(self):
        kinds = {op.kind for op in build_werner_circuit(1.0).ops + build_werner_circuit(1.0, "rx").ops}
        assert kinds <= {GateKind.U3, GateKind.H, GateKind.X, GateKind.RX, GateKind.CH, GateKind.CCX, GateKind.CNOT}

    def test_bad_not(self):
        with pytest.raises(ConfigError):
            build_werner_circuit(1.0, "y")


class TestBell:
    def test_plus(self):
        np.testing.assert_allclose(run_circuit(build_bell_circuit("plus")).amplitudes, [S2, 0, 0, S2], atol=1e-12)

    def test_minus(self):
        np.testing.assert_allclose(run_circuit(build_bell_circuit("minus")).amplitudes, [S2, 0, 0, -S2], atol=1e-12)

    def test_orthogonal(self):
        assert overlap(run_circuit(build_bell_circuit("plus")), run_circuit(build_bell_circuit("minus"))) < 1e-15

    def test_bad_sign(self):
        with pytest.raises(ConfigError):
            build_bell_circuit("zero")
