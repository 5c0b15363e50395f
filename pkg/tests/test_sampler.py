import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_circuit
from meanspin.circuits import build_bell_circuit, build_cat_circuit
from meanspin.errors import ConfigError, StructuralError
from meanspin.sampler import (
    Counts,
    NoiseModel,
    SeedSpec,
    binomial_std_error,
    mean_from_counts,
    parity_expectation,
    parity_from_counts,
    run_noisy_circuit,
    run_trajectory,
    sample_circuit,
    sample_counts,
)
from meanspin.simcore import Circuit, init_zero_state, pauli_expectation, run_circuit, ry, u3

BELL = build_bell_circuit("plus")


class TestNoiseModel:
    def test_device_defaults(self):
        nm = NoiseModel.ourense()
        assert nm.enabled
        assert nm.gate_depolarizing_1q[0] == 4.18e-4
        assert nm.gate_depolarizing_1q[1] == 3.88e-4
        assert nm.readout_flip[0] == 1.90e-2
        assert nm.readout_flip[1] == 3.70e-2

    @pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
    def test_probability_range(self, bad):
        with pytest.raises(ConfigError):
            NoiseModel(readout_flip={0: bad})

    def test_dict_round_trip(self):
        nm = NoiseModel.ourense()
        assert NoiseModel.from_dict(nm.to_dict()) == nm

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            NoiseModel.from_dict({"t1": 5})

    def test_disabled_means_no_flips(self):
        assert NoiseModel.disabled().flip_probs([0, 1]) is None


class TestCounts:
    def test_sum_must_match(self):
        with pytest.raises(StructuralError):
            Counts(10, {"0": 4})

    def test_key_width(self):
        with pytest.raises(StructuralError):
            Counts(2, {"0": 1, "11": 1})

    def test_merge(self):
        c = Counts(3, {"0": 3}).merged(Counts(2, {"1": 2}))
        assert c.shots == 5 and c.table == {"0": 3, "1": 2}


class TestSampleCounts:
    def test_deterministic_zero(self):
        c = sample_counts(init_zero_state(1), [0], 1024, SeedSpec(1))
        assert c.table == {"0": 1024}

    def test_empty_subset(self):
        with pytest.raises(ConfigError):
            sample_counts(init_zero_state(1), [], 10, SeedSpec(1))

    def test_bad_shots(self):
        with pytest.raises(ConfigError):
            sample_counts(init_zero_state(1), [0], 0, SeedSpec(1))

    def test_bell_concentration(self):
        bound = 5 * math.sqrt(8192 * 0.25)
        c = sample_counts(run_circuit(BELL), [0, 1], 8192, SeedSpec(2020))
        assert set(c.table) == {"00", "11"}
        assert abs(c["00"] - 4096) < bound and abs(c["11"] - 4096) < bound

    def test_symmetric_readout_half(self):
        nm = NoiseModel(readout_flip={0: 0.5})
        shots = 65536
        c = sample_counts(init_zero_state(1), [0], shots, SeedSpec(3), nm)
        assert abs(c["1"] / shots - 0.5) < 5 * math.sqrt(0.25 / shots)

    def test_certain_flip(self):
        nm = NoiseModel(readout_flip={0: 1.0, 1: 0.0})
        c = sample_counts(init_zero_state(2), [0, 1], 100, SeedSpec(3), nm)
        assert c.table == {"10": 100}

    def test_flip_rate_matches(self):
        nm = NoiseModel(readout_flip={0: 0.1})
        shots = 65536
        c = sample_counts(init_zero_state(1), [0], shots, SeedSpec(4), nm)
        assert abs(c["1"] / shots - 0.1) < 5 * math.sqrt(0.09 / shots)

    def test_disabled_noise_ignores_flips(self):
        nm = NoiseModel(readout_flip={0: 1.0}, enabled=False)
        c = sample_counts(init_zero_state(1), [0], 10, SeedSpec(4), nm)
        assert c.table == {"0": 10}

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**63), shots=st.integers(1, 3000), noisy=st.booleans())
    def test_counts_sum_and_determinism(self, seed, shots, noisy):
        nm = NoiseModel(readout_flip={0: 0.2, 1: 0.05}, gate_depolarizing_1q={0: 0.1}, gate_depolarizing_2q=0.2) if noisy else None
        circ = build_cat_circuit(3, 1.0, 0.3)
        a = sample_circuit(circ, [0, 2], shots, SeedSpec(seed, 5), nm)
        b = sample_circuit(circ, [0, 2], shots, SeedSpec(seed, 5), nm)
        assert sum(a.table.values()) == shots
        assert a == b

    def test_streams_are_distinct(self):
        s = run_circuit(BELL)
        tables = {tuple(sample_counts(s, [0, 1], 1000, SeedSpec(9, k)).table.items()) for k in range(8)}
        assert len(tables) == 8

    def test_derived_paths_are_distinct(self):
        base = SeedSpec(9, 0)
        assert base.derive(1).generator().random() != base.derive(2).generator().random()
        assert base.derive(1, 0).generator().random() == SeedSpec(9, 0, (1, 0)).generator().random()

    @pytest.mark.parametrize("shots", [1024, 8192, 65536])
    def test_consistency(self, shots):
        t = 1.2
        circ = Circuit(1, [u3(0, t, 0, 0)])
        exact = math.cos(t)
        state = run_circuit(circ)
        for k in range(20):
            c = sample_counts(state, [0], shots, SeedSpec(77, k))
            assert abs(mean_from_counts(c, 0) - exact) < 5 / math.sqrt(shots)

    def test_error_scale(self):
        state = run_circuit(Circuit(1, [u3(0, math.pi / 2, 0, 0)]))
        means = [mean_from_counts(sample_counts(state, [0], 1024, SeedSpec(k)), 0) for k in range(200)]
        sd = float(np.std(means, ddof=1))
        assert 0.5 / 32 <= sd <= 2 / 32


class TestGateNoise:
    def test_zero_rate_is_noiseless(self, rng):
        circ = random_circuit(rng, 3, 25)
        nm = NoiseModel(gate_depolarizing_1q={0: 0.0, 1: 0.0, 2: 0.0}, gate_depolarizing_2q=0.0)
        np.testing.assert_array_equal(
            run_noisy_circuit(circ, nm, SeedSpec(3)).amplitudes, run_circuit(circ).amplitudes
        )
        assert sample_circuit(circ, [0, 1], 500, SeedSpec(3), nm) == sample_circuit(
            circ, [0, 1], 500, SeedSpec(3), None
        )

    def test_full_depolarizing_average(self):
        # one gate, p=1: the reported <Z> is the mean over the four Pauli conjugations
        t = 0.7
        circ = Circuit(1, [ry(0, t)])
        analytic = np.mean([pauli_expectation(run_trajectory(circ, [c]), {0: "z"}) for c in range(4)])
        assert analytic == pytest.approx(0.25 * (2 * math.cos(t) - 2 * math.cos(t)), abs=1e-15)
        nm = NoiseModel(gate_depolarizing_1q={0: 1.0})
        shots = 65536
        est = mean_from_counts(sample_circuit(circ, [0], shots, SeedSpec(10), nm), 0)
        assert abs(est - analytic) < 5 / math.sqrt(shots)

    def test_trajectory_codes(self):
        # code 1 is X: flips |0> to |1>
        s = run_trajectory(Circuit(1, [ry(0, 0.0)]), [1])
        assert abs(s.amplitudes[1]) == pytest.approx(1.0)

    def test_two_qubit_rate_used(self):
        nm = NoiseModel(gate_depolarizing_2q=1.0)
        c = sample_circuit(BELL, [0, 1], 4096, SeedSpec(1), nm)
        # uniformly random two-qubit Pauli after CNOT spreads weight onto odd parity
        assert c["01"] + c["10"] > 1000


class TestStatistics:
    def test_mean_all_zero(self):
        assert mean_from_counts(Counts(1024, {"0": 1024}), 0) == 1.0

    def test_mean_symmetric(self):
        assert mean_from_counts(Counts(1024, {"00": 512, "11": 512}), 0) == 0.0

    def test_mean_bit_one(self):
        c = Counts(1024, {"00": 600, "01": 200, "10": 100, "11": 124})
        assert mean_from_counts(c, 1) == (600 + 100 - 200 - 124) / 1024 == 0.3671875

    def test_mean_bad_position(self):
        with pytest.raises(StructuralError):
            mean_from_counts(Counts(1, {"0": 1}), 1)

    def test_parity_even(self):
        assert parity_from_counts(Counts(1024, {"00": 512, "11": 512})) == 1.0

    def test_parity_odd(self):
        assert parity_from_counts(Counts(1024, {"01": 512, "10": 512})) == -1.0

    def test_parity_cancel(self):
        assert parity_from_counts(Counts(1024, {"00": 300, "01": 300, "10": 212, "11": 212})) == 0.0

    def test_parity_width(self):
        with pytest.raises(StructuralError):
            parity_from_counts(Counts(2, {"000": 2}))

    def test_parity_general_width(self):
        assert parity_expectation(Counts(4, {"000": 1, "001": 2, "111": 1})) == -0.5

    def test_std_error_scale(self):
        assert binomial_std_error(0.0, 1024) == 1 / 32
