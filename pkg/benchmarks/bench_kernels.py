"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter because FURNACESIM_DISABLE_JIT is
read at import time. Usage: ``python3 benchmarks/bench_kernels.py [--steps N]``.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from furnacesim import backend_name, build_config, run_simulation
from furnacesim.kernels import run_cycle, step_response_run
from furnacesim.plant import LoadParams
from furnacesim.spwm import switching_sequence

n, repeat = int(sys.argv[1]), int(sys.argv[2])
p = LoadParams()

def cycles():
    state, phase, energy = np.zeros(2), np.zeros(2), np.zeros(3)
    counter = np.zeros(1, dtype=np.int64)
    vb, ib, tr = np.empty(4100), np.empty(4100), np.empty(300)
    done = 0
    while done < n:
        k, *_ = run_cycle(state, phase, energy, counter, 250.0, 1000.0, 0.8, 400.0,
                          p.R0, p.L0, p.C, 1e-6, vb, ib, 20, tr, tr, tr)
        done += k

cfg = build_config({"sim.duration": n * 1e-6, "sim.trace_decimation": 20})
cases = {
    "switching_sequence": lambda: switching_sequence(0.0, 0.0, 250.0, 1000.0, 0.8, 1e-6, n),
    "rk4 step response": lambda: step_response_run(400.0, p.R0, p.L0, p.C, 1e-6, n),
    "run_cycle loop": cycles,
    "run_simulation (closed loop)": lambda: run_simulation(cfg, keep_trace=False),
}
out = {"backend": backend_name()}
for name, fn in cases.items():
    fn()  # warm-up, includes compilation for numba
    out[name] = min(timeit.repeat(fn, number=1, repeat=repeat)) / n
print(json.dumps(out))
"""


def run_backend(disable_jit: bool, steps: int, repeat: int) -> dict:
    env = dict(os.environ, FURNACESIM_DISABLE_JIT="1" if disable_jit else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(steps), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=100_000, help="time steps per case (dt = 1 us)")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    jit = run_backend(False, args.steps, args.repeat)
    py = run_backend(True, args.steps, args.repeat)
    print(f"{args.steps} steps per case, best of {args.repeat}; time per simulated step")
    print(f"{'case':30s} {jit['backend']:>12s} {py['backend']:>12s} {'speed-up':>9s}")
    for name in jit:
        if name == "backend":
            continue
        a, b = jit[name], py[name]
        print(f"{name:30s} {a * 1e9:10.1f}ns {b * 1e9:10.1f}ns {b / a:8.1f}x")


if __name__ == "__main__":
    main()
