"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Part 1 calls both variants of every kernel directly on the same inputs and
checks they agree.  Part 2 runs one end-to-end oracle verification in two
subprocesses, one with ``HUBOGAS_DISABLE_NUMBA=1``.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from hubogas import kernels
from hubogas._jit import NUMBA_AVAILABLE
from hubogas.problems import convergence_instance, gcp_formulation


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def eval_inputs(strategy):
    poly = gcp_formulation(convergence_instance(), strategy).polynomial
    pos = np.array([t.pos_mask for t in poly.terms], dtype=np.int64)
    neg = np.array([t.neg_mask for t in poly.terms], dtype=np.int64)
    coeffs = np.array([t.coefficient for t in poly.terms], dtype=np.int64)
    return poly.num_vars, pos, neg, coeffs, np.int64(poly.constant)


def bench_eval(repeat, sizes):
    print(f"{'kernel':<22}{'size':>10}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for strategy in sizes:
        args = eval_inputs(strategy)
        ref = kernels.eval_all_numpy(*args)
        kernels.eval_all_jit(*args)  # compile
        assert np.array_equal(ref, kernels.eval_all_jit(*args))
        t_np = best_of(lambda: kernels.eval_all_numpy(*args), repeat)
        t_jit = best_of(lambda: kernels.eval_all_jit(*args), repeat)
        print(f"{'eval_all':<22}{'2^' + str(args[0]):>10}{t_np:>12.4f}{t_jit:>12.4f}{t_np / t_jit:>10.1f}")


def bench_state(repeat, qubits):
    rng = np.random.default_rng(0)
    for total in qubits:
        n, m = total - 4, 4
        base = rng.normal(size=(1 << n, 1 << m)) + 1j * rng.normal(size=(1 << n, 1 << m))
        phases = np.exp(2j * np.pi * np.arange(1 << m) / (1 << m))
        cases = [
            ("hadamard_rows", lambda f, s: f(s, 1 << (n // 2))),
            ("hadamard_cols", lambda f, s: f(s, 2)),
            ("flip_rows", lambda f, s: f(s, 1)),
            ("flip_cols", lambda f, s: f(s, 1)),
            ("phase_rows", lambda f, s: f(s, np.int64(0b101), phases)),
        ]
        for name, call in cases:
            f_np = getattr(kernels, name + "_numpy")
            f_jit = getattr(kernels, name + "_jit")
            a, b = base.copy(), base.copy()
            call(f_np, a)
            call(f_jit, b)
            assert np.allclose(a, b, atol=1e-12)
            s = base.copy()
            t_np = best_of(lambda: call(f_np, s), repeat)
            t_jit = best_of(lambda: call(f_jit, s), repeat)
            print(f"{name:<22}{'2^' + str(total):>10}{t_np:>12.4f}{t_jit:>12.4f}{t_np / t_jit:>10.1f}")


END_TO_END = (
    "import time; from hubogas.problems import *; from hubogas.simulator import verify_oracle;"
    "from hubogas.boolpoly import value_register_width;"
    "f = gcp_formulation(convergence_instance(), 'or'); p = f.synthesis_polynomial;"
    "m = value_register_width(p); verify_oracle(p, 0, m); t = time.perf_counter();"
    "r = verify_oracle(p, 0, m); print(round(time.perf_counter() - t, 4), r.passed)"
)


def bench_end_to_end():
    print("\nend-to-end oracle check, even-parity code on the (5, 4) graph (15 + 4 qubits)")
    for flag in ("0", "1"):
        env = dict(os.environ, HUBOGAS_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        print(f"  {'numpy' if flag == '1' else 'numba'}: {out.stdout.strip()}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    if not NUMBA_AVAILABLE:
        sys.exit("numba is not available (or disabled); nothing to compare")
    bench_eval(args.repeat, ("pf", "or") if args.quick else ("pf", "or", "qubo"))
    bench_state(args.repeat, (14,) if args.quick else (14, 18, 22))
    bench_end_to_end()


if __name__ == "__main__":
    main()
