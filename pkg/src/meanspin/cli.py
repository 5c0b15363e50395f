"""Command-line entry point.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from ._accel import backend_name
from .errors import CircuitParseError, ConfigError, MeanSpinError, RoutingError
from .protocols import measure_pure_entanglement, oracle_entanglement_pure, purity
from .sampler import SeedSpec, sample_circuit
from .simcore import probability_vector, run_circuit, bitstring
from .sweep import format_rows, parse_config, parse_noise, run_sweep, write_csv
from .transpiler import (
    DEVICE_REFERENCE_WERNER_COUNTS,
    CouplingMap,
    LayoutMap,
    format_circuit,
    load_circuit,
    transpile,
)
from .devices import load_device

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("meanspin")


def _int_list(text):
    if text is None:
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read_circuit(path):
    try:
        return load_circuit(path)
    except OSError as exc:
        raise _IOFailure(f"cannot read circuit file {path}: {exc}") from exc


class _IOFailure(Exception):
    pass


def cmd_simulate(args) -> int:
    circuit = _read_circuit(args.circuit)
    state = run_circuit(circuit)
    measured = args.measure if args.measure is not None else list(range(circuit.n_qubits))
    out = {"n_qubits": circuit.n_qubits, "measured_qubits": measured}
    if args.shots:
        noise = parse_noise(args.noise)
        counts = sample_circuit(circuit, measured, args.shots, SeedSpec(args.seed), noise, state=state)
        out["shots"] = counts.shots
        out["counts"] = counts.table
    else:
        probs = probability_vector(state, measured)
        out["probabilities"] = {
            bitstring(i, len(measured)): float(p) for i, p in enumerate(probs) if p > 1e-14
        }
        if args.amplitudes:
            out["amplitudes"] = [[float(a.real), float(a.imag)] for a in state.amplitudes]
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_sweep(args) -> int:
    overrides = {
        "experiment": args.experiment,
        "n_qubits": args.n,
        "shots": args.shots,
        "seed": args.seed,
        "mode": args.mode,
        "noise": args.noise,
        "target_qubits": args.targets,
        "output_path": args.output,
        "phi": args.phi,
        "workers": args.workers,
        "circuit_path": args.circuit,
    }
    if any(v is not None for v in (args.start, args.stop, args.step)):
        key = "omega_grid" if (args.experiment or "").replace("-", "_") == "mixed_bell" else "theta_grid"
        base = {"start": 0, "stop": 1 if key == "omega_grid" else "pi", "step": 0.125 if key == "omega_grid" else "pi/16"}
        for name in ("start", "stop", "step"):
            if getattr(args, name) is not None:
                base[name] = getattr(args, name)
        overrides[key] = base
    config = parse_config(args.config, overrides)
    rows = run_sweep(config)
    if config.output_path:
        try:
            write_csv(rows, config.output_path)
        except OSError as exc:
            raise _IOFailure(f"cannot write {config.output_path}: {exc}") from exc
    else:
        sys.stdout.write(format_rows(rows))
    failed = sum(r.failed for r in rows)
    if failed:
        log.error("%d row(s) flagged as numerical failures", failed)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_transpile(args) -> int:
    circuit = _read_circuit(args.circuit)
    try:
        device = load_device(args.device)
    except OSError as exc:
        raise _IOFailure(f"cannot read device file {args.device}: {exc}") from exc
    cmap = CouplingMap.from_dict(device)
    layout = LayoutMap(tuple(args.layout)) if args.layout else None
    routed, report = transpile(circuit, cmap, layout)
    summary = report.as_dict()
    if circuit.n_qubits == 3:
        summary["device_reference_werner"] = DEVICE_REFERENCE_WERNER_COUNTS
    text = format_circuit(routed)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise _IOFailure(f"cannot write {args.output}: {exc}") from exc
    else:
        sys.stdout.write(text)
    print(json.dumps(summary), file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def cmd_oracle(args) -> int:
    circuit = _read_circuit(args.circuit)
    state = run_circuit(circuit)
    rows = []
    for q in range(circuit.n_qubits):
        est = measure_pure_entanglement(circuit, q, mode="exact")
        rows.append(
            {
                "qubit": q,
                "mean_spin": list(est.components),
                "E_protocol": est.E_measured,
                "E_oracle": oracle_entanglement_pure(state, q),
                "purity": purity(state, q),
            }
        )
    print(json.dumps(rows, indent=2))
    worst = max(abs(r["E_protocol"] - r["E_oracle"]) for r in rows)
    return EXIT_OK if worst < 1e-10 else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="meanspin", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({backend_name()})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a circuit file; print probabilities or sampled counts")
    s.add_argument("circuit")
    s.add_argument("--measure", type=_int_list)
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", default=None, help="none, ourense, or a JSON file")
    s.add_argument("--amplitudes", action="store_true")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="theta/omega sweep of a built-in experiment, CSV output")
    w.add_argument("experiment", nargs="?", choices=["cat", "werner", "mixed-bell", "mixed_bell", "custom"])
    w.add_argument("--config")
    w.add_argument("--n", type=int)
    w.add_argument("--shots", type=int)
    w.add_argument("--seed", type=int)
    w.add_argument("--mode", choices=["exact", "sampled"])
    w.add_argument("--noise")
    w.add_argument("--targets", type=_int_list)
    w.add_argument("--start")
    w.add_argument("--stop")
    w.add_argument("--step")
    w.add_argument("--phi")
    w.add_argument("--workers", type=int)
    w.add_argument("--circuit", help="circuit file for the custom experiment")
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_sweep)

    t = sub.add_parser("transpile", help="decompose and route a circuit file onto a device")
    t.add_argument("circuit")
    t.add_argument("--device", help="device JSON (default: bundled ibmq-ourense)")
    t.add_argument("--layout", type=_int_list, help="physical qubit per logical qubit, e.g. 1,3,4")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_transpile)

    o = sub.add_parser("oracle", help="protocol E vs reduced-density-matrix E for every qubit")
    o.add_argument("circuit")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, CircuitParseError, RoutingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MeanSpinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL if isinstance(exc, ArithmeticError) else EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
