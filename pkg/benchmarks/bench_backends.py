"""Compare the compiled and plain-Python kernel backends.

Each workload runs in a child process with QPROP_BACKEND pinned, so both
backends are measured from a clean import.  Timings exclude import and
warmup (the first call pays numba's compile-or-load cost).

Usage: python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = """
import json, sys, time
import numpy as np
import qprop

def workload_olos_grid():
    for n in (2, 3, 5, 20, 100):
        for alpha in (1.1, 2.0, 3.0, 10.0, 100.0):
            for p in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
                qprop.olos_equilibrium(qprop.OlosInstance(n, alpha, p))

def workload_fixed_point():
    v = qprop.OlosInstance(20, 10.0, 2.0).valuations()
    qprop.solve_fixed_point(v, 2.0)

def workload_nash_scan():
    inst = qprop.OlosInstance(20, 10.0, 2.0)
    eq = qprop.olos_equilibrium(inst)
    bids = np.full(20, eq.b2); bids[0] = eq.b1
    qprop.verify_nash(bids, inst.valuations(), 2.0, grid_points=100_000)

def workload_best_response():
    for s in np.geomspace(1e-3, 1e3, 10_000):
        qprop.best_response(float(s), 10.0, 2.0)

WORKLOADS = {
    "olos_grid_150": workload_olos_grid,
    "fixed_point_n20": workload_fixed_point,
    "nash_scan_1e5_n20": workload_nash_scan,
    "best_response_10k": workload_best_response,
}

name, repeat = sys.argv[1], int(sys.argv[2])
fn = WORKLOADS[name]
fn()  # warmup: JIT compile/load on the numba backend
times = []
for _ in range(repeat):
    t0 = time.perf_counter()
    fn()
    times.append(time.perf_counter() - t0)
print(json.dumps({"backend": qprop.BACKEND, "seconds": min(times)}))
"""

WORKLOAD_NAMES = [
    "olos_grid_150",
    "fixed_point_n20",
    "nash_scan_1e5_n20",
    "best_response_10k",
]


def run_worker(backend: str, workload: str, repeat: int) -> float:
    env = dict(os.environ, QPROP_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, workload, str(repeat)],
        capture_output=True,
        text=True,
        env=env,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"{backend}/{workload} failed:\n{proc.stderr}")
    payload = json.loads(proc.stdout.strip().splitlines()[-1])
    assert payload["backend"] == backend
    return payload["seconds"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="best-of-N timing")
    args = parser.parse_args()

    print(f"{'workload':<22} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name in WORKLOAD_NAMES:
        with_jit = run_worker("numba", name, args.repeat)
        without = run_worker("numpy", name, args.repeat)
        print(
            f"{name:<22} {with_jit * 1e3:>10.2f}ms {without * 1e3:>10.2f}ms "
            f"{without / with_jit:>8.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
