import json
import math

import pytest

from meanspin.errors import ConfigError
from meanspin.sweep import (
    CSV_HEADER,
    Grid,
    ResultRow,
    SweepConfig,
    build_config,
    format_rows,
    parse_config,
    parse_number,
    read_csv,
    run_sweep,
    write_csv,
)


def cfg(**kw):
    base = {"experiment": "cat", "mode": "exact"}
    base.update(kw)
    return build_config(base)


class TestGrid:
    def test_omega_nine_points(self):
        assert Grid(0, 1, 0.125).points() == [k * 0.125 for k in range(9)]

    def test_theta_includes_stop(self):
        pts = Grid(0, math.pi, math.pi / 16).points()
        assert len(pts) == 17
        assert pts[-1] == pytest.approx(math.pi)

    def test_zero_step(self):
        with pytest.raises(ConfigError):
            Grid(0, 1, 0)

    def test_negative_step(self):
        with pytest.raises(ConfigError):
            Grid(0, 1, -0.1)

    def test_single_point(self):
        assert Grid(0.5, 0.5, 1).points() == [0.5]

    def test_parse_forms(self):
        assert Grid.parse({"start": 0, "stop": "pi", "step": "pi/4"}).points()[-1] == pytest.approx(math.pi)
        assert Grid.parse([0, 1, 0.5]).points() == [0, 0.5, 1.0]

    def test_parse_missing(self):
        with pytest.raises(ConfigError, match="step"):
            Grid.parse({"start": 0, "stop": 1})


class TestParseNumber:
    @pytest.mark.parametrize("text,value", [("pi", math.pi), ("pi/16", math.pi / 16), ("2*pi/3", 2 * math.pi / 3), ("-0.5", -0.5), (3, 3.0)])
    def test_values(self, text, value):
        assert parse_number(text) == value

    @pytest.mark.parametrize("text", ["__import__('os')", "pi**2", "e", "1/0", ""])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_number(text)


class TestConfig:
    def test_flags_only(self):
        c = parse_config(None, {"experiment": "cat", "n_qubits": 2, "shots": 1024, "seed": 7})
        assert (c.experiment, c.n_qubits, c.shots, c.seed, c.mode) == ("cat", 2, 1024, 7, "sampled")

    def test_defaults(self):
        c = build_config({"experiment": "cat"})
        assert c.shots == 1024 and c.seed == 0 and c.mode == "sampled"
        assert c.target_qubits == (0, 1)
        assert not c.noise.enabled
        m = build_config({"experiment": "mixed-bell"})
        assert m.shots == 8192 and len(m.grid.points()) == 9
        assert build_config({"experiment": "werner"}).target_qubits == (0, 1, 2)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="shotz"):
            build_config({"experiment": "cat", "shotz": 3})

    def test_missing_experiment(self):
        with pytest.raises(ConfigError, match="experiment"):
            build_config({"n_qubits": 2})

    def test_step_zero(self):
        with pytest.raises(ConfigError):
            build_config({"experiment": "cat", "theta_grid": {"start": 0, "stop": 1, "step": 0}})

    def test_omega_out_of_range(self):
        with pytest.raises(ConfigError):
            build_config({"experiment": "mixed_bell", "omega_grid": {"start": 0, "stop": 1.5, "step": 0.5}})

    def test_werner_width(self):
        with pytest.raises(ConfigError):
            build_config({"experiment": "werner", "n_qubits": 4})

    def test_bad_target(self):
        with pytest.raises(ConfigError):
            build_config({"experiment": "cat", "target_qubits": [2]})

    def test_custom_needs_circuit(self):
        with pytest.raises(ConfigError, match="circuit_path"):
            build_config({"experiment": "custom"})

    def test_file_then_overrides(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"experiment": "cat", "n_qubits": 3, "seed": 1, "noise": "ourense"}))
        c = parse_config(p, {"seed": 9, "n_qubits": None})
        assert c.n_qubits == 3 and c.seed == 9 and c.noise.enabled

    def test_bad_json(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{nope")
        with pytest.raises(ConfigError):
            parse_config(p)

    def test_noise_mapping(self):
        c = build_config({"experiment": "cat", "noise": {"readout_flip": {"0": 0.1}}})
        assert c.noise.readout_flip == {0: 0.1}


class TestRunSweep:
    def test_cat_exact_identity(self):
        rows = run_sweep(cfg(n_qubits=2))
        assert len(rows) == 17 * 2
        assert max(r.abs_delta for r in rows) < 1e-12
        assert [r.param for r in rows[::2]] == Grid(0, math.pi, math.pi / 16).points()

    def test_mixed_exact_identity(self):
        rows = run_sweep(cfg(experiment="mixed_bell"))
        assert len(rows) == 9
        assert max(r.abs_delta for r in rows) < 1e-12

    def test_werner_exact_identity(self):
        rows = run_sweep(cfg(experiment="werner"))
        assert max(r.abs_delta for r in rows) < 1e-12

    def test_mixed_sampled_half(self):
        deltas = []
        for seed in range(20):
            rows = run_sweep(build_config({
                "experiment": "mixed_bell", "seed": seed,
                "omega_grid": {"start": 0.5, "stop": 0.5, "step": 0.125},
            }))
            deltas.append(rows[0].abs_delta)
        assert sum(deltas) / len(deltas) < 0.01

    def test_rows_in_grid_order_with_workers(self):
        c = build_config({"experiment": "cat", "seed": 5})
        assert run_sweep(c, workers=4) == run_sweep(c, workers=1)

    def test_numerical_failure_flagged(self, monkeypatch):
        from meanspin import sweep
        from meanspin.errors import NumericalFailure

        def boom(*a, **k):
            raise NumericalFailure("forced")

        monkeypatch.setattr(sweep, "measure_pure_entanglement", boom)
        rows = run_sweep(cfg(theta_grid=[0, 1, 1]))
        assert len(rows) == 4 and all(r.failed for r in rows)
        assert math.isnan(rows[0].E_measured)

    def test_custom(self, tmp_path):
        p = tmp_path / "bell.qc"
        p.write_text("qubits 2\nh 0\ncx 0 1\n")
        rows = run_sweep(build_config({"experiment": "custom", "circuit_path": str(p), "mode": "exact"}))
        assert [r.E_measured for r in rows] == [0.5, 0.5]
        assert all(r.abs_delta < 1e-12 for r in rows)


class TestCsv:
    def test_empty(self, tmp_path):
        p = tmp_path / "out.csv"
        write_csv([], p)
        assert p.read_bytes() == (",".join(CSV_HEADER) + "\n").encode()

    def test_cat_row_at_zero(self):
        rows = run_sweep(cfg(theta_grid=[0, 0, 1], target_qubits=[0]))
        fields = format_rows(rows).splitlines()[1].split(",")
        # param, target, E_theory, E_measured, abs_delta; exact mode spends no shots
        assert fields[:5] == ["0", "0", "0", "0", "0"]
        assert fields[7] == "1" and fields[-1] == "0"

    def test_round_trip(self, tmp_path):
        rows = run_sweep(build_config({"experiment": "werner", "seed": 3}))
        p = tmp_path / "w.csv"
        write_csv(rows, p)
        back = read_csv(p)
        assert len(back) == len(rows)
        for r, b in zip(rows, back):
            assert b["E_measured"] == pytest.approx(r.E_measured, rel=1e-9, abs=1e-300)
            assert b["param"] == pytest.approx(r.param, rel=1e-9)
            assert b["shots"] == r.shots
        assert format_rows(rows) == p.read_text()
        assert b"\r" not in p.read_bytes()

    def test_missing_components_blank(self):
        rows = run_sweep(cfg(experiment="mixed_bell", omega_grid=[0.25, 0.25, 1]))
        fields = format_rows(rows).splitlines()[1].split(",")
        assert fields[7] == ""
        assert len(fields) == len(CSV_HEADER)

    def test_ten_significant_digits(self):
        row = ResultRow(math.pi, 0, 1 / 3, 1 / 3, 0.0, (-0.0, 1e-20, None), 0.1, 1024)
        assert format_rows([row]).splitlines()[1] == "3.141592654,0,0.3333333333,0.3333333333,0,0,1e-20,,0.1,1024"

    def test_sweepconfig_requires_valid_mode(self):
        with pytest.raises(ConfigError):
            SweepConfig("cat", 2, Grid(0, 1, 1), 10, mode="fast")
