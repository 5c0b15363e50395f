"""Parameter sweeps over the built-in experiments and their CSV output."""

from __future__ import annotations

import ast
import csv
import json
import logging
import math
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

from .circuits import build_bell_circuit, build_cat_circuit, build_werner_circuit
from .devices import load_device
from .errors import ConfigError, MeanSpinError, NumericalFailure
from .protocols import (
    DEFAULT_MIXED_TOTAL_SHOTS,
    DEFAULT_SHOTS_PER_AXIS,
    MixedEnsemble,
    analytic_cat,
    analytic_mixed_bell,
    analytic_werner,
    estimate_rank2_entanglement,
    measure_pure_entanglement,
    oracle_entanglement_pure,
)
from .sampler import NoiseModel, SeedSpec
from .simcore import run_circuit

log = logging.getLogger(__name__)

EXPERIMENTS = ("cat", "werner", "mixed_bell", "custom")
CSV_HEADER = (
    "param", "target_qubit", "E_theory", "E_measured", "abs_delta",
    "comp_1", "comp_2", "comp_3", "std_err", "shots",
)
# grid points are counted with this much slack so that stop is included despite rounding
_GRID_SLACK = 1e-9


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(value) -> float:
    """Number or arithmetic string over numbers and ``pi`` (``"pi/16"``, ``"3*pi/4"``)."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a number, got {value!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(ast.dump(node))

    try:
        return float(ev(ast.parse(value.strip(), mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot read {value!r} as a number") from None


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError(f"grid step must be > 0, got {self.step!r}")
        if self.stop < self.start:
            raise ConfigError(f"grid stop {self.stop!r} is below start {self.start!r}")

    @classmethod
    def parse(cls, value) -> "Grid":
        if isinstance(value, Mapping):
            unknown = set(value) - {"start", "stop", "step"}
            missing = {"start", "stop", "step"} - set(value)
            if unknown:
                raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
            if missing:
                raise ConfigError(f"grid is missing required keys: {sorted(missing)}")
            return cls(parse_number(value["start"]), parse_number(value["stop"]), parse_number(value["step"]))
        if isinstance(value, (list, tuple)) and len(value) == 3:
            return cls(*(parse_number(v) for v in value))
        raise ConfigError(f"grid must be {{start, stop, step}}, got {value!r}")

    def points(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + _GRID_SLACK)) + 1
        return [self.start + k * self.step for k in range(n)]


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    n_qubits: int
    grid: Grid
    shots: int
    seed: int = 0
    mode: str = "sampled"
    noise: NoiseModel = field(default_factory=NoiseModel.disabled)
    target_qubits: tuple[int, ...] = (0,)
    output_path: str | None = None
    phi: float = 0.0
    workers: int = 1
    circuit_path: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.mode not in ("exact", "sampled"):
            raise ConfigError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if not isinstance(self.shots, int) or self.shots < 1:
            raise ConfigError(f"shots must be a positive integer, got {self.shots!r}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        if self.experiment == "werner" and self.n_qubits != 3:
            raise ConfigError("the Werner experiment is defined on 3 qubits")
        if self.experiment == "mixed_bell":
            if self.n_qubits != 2:
                raise ConfigError("the mixed Bell experiment is defined on 2 qubits")
            if self.grid.start < 0 or self.grid.points()[-1] > 1 + 1e-12:
                raise ConfigError("omega grid must lie within [0, 1]")
        if self.experiment == "custom" and not self.circuit_path:
            raise ConfigError("custom experiment is missing required key: circuit_path")
        if not 1 <= self.n_qubits <= 24:
            raise ConfigError(f"n_qubits must be in [1, 24], got {self.n_qubits}")
        targets = tuple(int(t) for t in self.target_qubits)
        if not targets or any(not 0 <= t < self.n_qubits for t in targets):
            raise ConfigError(f"target qubits {targets} invalid for {self.n_qubits} qubits")
        object.__setattr__(self, "target_qubits", targets)


_CONFIG_KEYS = {
    "experiment", "n_qubits", "theta_grid", "omega_grid", "shots", "seed", "mode",
    "noise", "target_qubits", "output_path", "phi", "workers", "circuit_path",
}


def _default_grid(experiment):
    if experiment == "mixed_bell":
        return Grid(0.0, 1.0, 0.125)
    return Grid(0.0, math.pi, math.pi / 16)


def _default_n(experiment):
    return {"werner": 3, "mixed_bell": 2}.get(experiment, 2)


def _default_targets(experiment, n):
    if experiment == "mixed_bell":
        return (0,)
    return tuple(range(n))


def parse_noise(value) -> NoiseModel:
    """``None``/``"none"``, ``"ourense"``, a noise mapping, or a path to a device/noise JSON file."""
    if value is None or value == "none":
        return NoiseModel.disabled()
    if isinstance(value, NoiseModel):
        return value
    if value == "ourense":
        return NoiseModel.ourense()
    if isinstance(value, Mapping):
        return NoiseModel.from_dict(value)
    if isinstance(value, str):
        try:
            data = load_device(value)
        except OSError as exc:
            raise ConfigError(f"cannot read noise file {value!r}: {exc}") from exc
        return NoiseModel.from_dict(data.get("noise", data) if isinstance(data, dict) else {})
    raise ConfigError(f"cannot interpret noise setting {value!r}")


def _normalize_experiment(name):
    return str(name).replace("-", "_")


def build_config(values: Mapping[str, Any]) -> SweepConfig:
    """Validate a flat mapping of config keys (file contents merged with CLI overrides)."""
    unknown = set(values) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" not in values or values["experiment"] is None:
        raise ConfigError("config is missing required key: experiment")
    experiment = _normalize_experiment(values["experiment"])
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {values['experiment']!r}")
    if "theta_grid" in values and "omega_grid" in values:
        raise ConfigError("give only one of theta_grid / omega_grid")
    raw_grid = values.get("omega_grid", values.get("theta_grid"))
    grid = _default_grid(experiment) if raw_grid is None else Grid.parse(raw_grid)
    n = values.get("n_qubits")
    n = _default_n(experiment) if n is None else n
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"n_qubits must be an integer, got {n!r}")
    shots = values.get("shots")
    if shots is None:
        shots = DEFAULT_MIXED_TOTAL_SHOTS if experiment == "mixed_bell" else DEFAULT_SHOTS_PER_AXIS
    targets = values.get("target_qubits")
    if targets is None:
        targets = _default_targets(experiment, n)
    elif isinstance(targets, int):
        targets = (targets,)
    return SweepConfig(
        experiment=experiment,
        n_qubits=n,
        grid=grid,
        shots=shots,
        seed=values.get("seed", 0) if values.get("seed") is not None else 0,
        mode=values.get("mode") or "sampled",
        noise=parse_noise(values.get("noise")),
        target_qubits=tuple(targets),
        output_path=values.get("output_path"),
        phi=parse_number(values.get("phi", 0.0) or 0.0),
        workers=values.get("workers") or 1,
        circuit_path=values.get("circuit_path"),
    )


def parse_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> SweepConfig:
    """Read a JSON config file (optional) and apply non-``None`` overrides on top."""
    values: dict[str, Any] = {}
    if path is not None:
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError("config file must hold a JSON object")
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    return build_config(values)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResultRow:
    param: float
    target_qubit: int
    E_theory: float | None
    E_measured: float
    abs_delta: float | None
    components: tuple[float | None, float | None, float | None]
    std_err: float
    shots: int
    failed: bool = False


def _theory(config: SweepConfig, value: float, target: int):
    if config.experiment == "cat":
        return analytic_cat(value)
    if config.experiment == "werner":
        return analytic_werner(value, "third" if target == 2 else "first_or_second")
    if config.experiment == "mixed_bell":
        return analytic_mixed_bell(value)
    return None


def _row_from_estimate(value, target, est):
    comps = tuple(est.components) + (None,) * (3 - len(est.components))
    return ResultRow(value, target, est.E_theory, est.E_measured, est.delta, comps, est.std_error, est.shots_used)


def _failed_row(value, target, theory):
    return ResultRow(value, target, theory, math.nan, None, (None, None, None), math.nan, 0, failed=True)


def _evaluate_point(config: SweepConfig, index: int, value: float, custom_circuit=None) -> list[ResultRow]:
    rows = []
    for target in config.target_qubits:
        seed = SeedSpec(config.seed, index).derive(target)
        theory = _theory(config, value, target)
        try:
            if config.experiment == "mixed_bell":
                ensemble = MixedEnsemble(
                    ((build_bell_circuit("plus"), value), (build_bell_circuit("minus"), 1.0 - value)),
                    total_shots=config.shots,
                )
                est = estimate_rank2_entanglement(ensemble, target, seed, config.noise, config.mode, theory)
            else:
                if config.experiment == "cat":
                    circuit = build_cat_circuit(config.n_qubits, value, config.phi)
                elif config.experiment == "werner":
                    circuit = build_werner_circuit(value)
                else:
                    circuit = custom_circuit
                    theory = oracle_entanglement_pure(run_circuit(circuit), target)
                est = measure_pure_entanglement(
                    circuit, target, config.shots, seed, config.noise, config.mode, theory
                )
        except NumericalFailure as exc:
            log.error("numerical failure at param=%r target=%d: %s", value, target, exc)
            rows.append(_failed_row(value, target, theory))
            continue
        rows.append(_row_from_estimate(value, target, est))
    return rows


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[ResultRow]:
    """Evaluate every grid point for every target qubit, rows in grid order.

    Each (point, target) draws from its own seed substream, so the output does
    not depend on ``workers``.
    """
    workers = config.workers if workers is None else workers
    custom = None
    if config.experiment == "custom":
        from .transpiler import load_circuit

        try:
            custom = load_circuit(config.circuit_path)
        except OSError as exc:
            raise ConfigError(f"cannot read circuit file {config.circuit_path!r}: {exc}") from exc
        if custom.n_qubits != config.n_qubits:
            config = replace(
                config,
                n_qubits=custom.n_qubits,
                target_qubits=tuple(t for t in config.target_qubits if t < custom.n_qubits) or (0,),
            )
        points = [0.0]
    else:
        points = config.grid.points()
    tasks = list(enumerate(points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda t: _evaluate_point(config, t[0], t[1], custom), tasks))
    else:
        chunks = [_evaluate_point(config, i, v, custom) for i, v in tasks]
    return [row for chunk in chunks for row in chunk]


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return format(float(value) + 0.0, ".10g")


def format_rows(rows: Sequence[ResultRow]) -> str:
    lines = [",".join(CSV_HEADER)]
    for r in rows:
        fields = (r.param, r.target_qubit, r.E_theory, r.E_measured, r.abs_delta, *r.components, r.std_err, r.shots)
        lines.append(",".join(_fmt(f) for f in fields))
    return "\n".join(lines) + "\n"


def write_csv(rows: Sequence[ResultRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_rows(rows))


def read_csv(path: str | Path) -> list[dict[str, float | int | None]]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ConfigError(f"unexpected CSV header {reader.fieldnames}")
        for rec in reader:
            row = {}
            for key, text in rec.items():
                if text == "":
                    row[key] = None
                elif key in ("target_qubit", "shots"):
                    row[key] = int(text)
                else:
                    row[key] = float(text)
            out.append(row)
    return out
