"""Time the numba kernels against their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--qubits 4,8,12,16] [--repeat 5]

Both implementations are imported directly, so the numba flag in the
environment does not matter here. First calls (JIT compile) are excluded.
"""

import argparse
import math
import timeit

import numpy as np

from meanspin import kernels
from meanspin._accel import NUMBA_AVAILABLE
from meanspin.simcore import gate_matrix, u3, cx


def _best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_apply(n, repeat):
    rng = np.random.default_rng(n)
    state = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    state /= np.linalg.norm(state)
    one = gate_matrix(u3(0, 0.3, 0.2, 0.1))
    two = gate_matrix(cx(0, 1))
    q1, q2 = (n // 2,), (0, n - 1) if n > 1 else (0,)
    number = max(1, 2 ** max(0, 16 - n))
    rows = []
    for label, mat, qubits in (("1q gate", one, q1), ("2q gate", two, q2)):
        if len(qubits) != int(math.log2(mat.shape[0])):
            continue
        kernels.apply_unitary_numba(state, mat, qubits, n)
        t_numba = _best(lambda: kernels.apply_unitary_numba(state, mat, qubits, n), repeat, number)
        t_numpy = _best(lambda: kernels.apply_unitary_numpy(state, mat, qubits, n), repeat, number)
        rows.append((label, n, t_numpy, t_numba))
    return rows


def bench_sampling(n, repeat, shots=65536):
    rng = np.random.default_rng(n)
    probs = rng.random(1 << n)
    cdf = np.cumsum(probs) / probs.sum()
    u = rng.random(shots)
    flips = np.full(n, 0.02)
    uf = rng.random((shots, n))
    outcomes = kernels.inverse_cdf_numpy(cdf, u)
    kernels.inverse_cdf_numba(cdf, u)
    kernels.readout_flips_numba(outcomes, flips, uf)
    return [
        (
            f"inverse CDF ({shots} shots)", n,
            _best(lambda: kernels.inverse_cdf_numpy(cdf, u), repeat, 3),
            _best(lambda: kernels.inverse_cdf_numba(cdf, u), repeat, 3),
        ),
        (
            f"readout flips ({shots} shots)", n,
            _best(lambda: kernels.readout_flips_numpy(outcomes, flips, uf), repeat, 3),
            _best(lambda: kernels.readout_flips_numba(outcomes, flips, uf), repeat, 3),
        ),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", default="4,8,12,16,20")
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    sizes = [int(s) for s in args.qubits.split(",")]
    print(f"{'kernel':28s} {'n':>3s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speedup':>8s}")
    for n in sizes:
        for label, nq, t_np, t_nb in bench_apply(n, args.repeat) + bench_sampling(n, args.repeat):
            print(f"{label:28s} {nq:3d} {t_np * 1e6:12.1f} {t_nb * 1e6:12.1f} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
