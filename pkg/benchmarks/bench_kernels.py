"""Compare the accelerated and pure-numpy integrator backends.

Run directly:

    python3 benchmarks/bench_kernels.py          # both backends, then speedup
    python3 benchmarks/bench_kernels.py --single # current backend only

Backend selection happens at import time via the EETSIM_NO_NUMBA
environment variable, so the two-backend comparison re-invokes this script
in subprocesses with the flag toggled.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload() -> dict:
    from eetsim import _kernels
    from eetsim.circuit import preset_params
    from eetsim.lindblad import SimulationConfig, evolve

    p = preset_params("moderate-clustered")

    # warm-up triggers JIT compilation so it is excluded from the timings
    evolve(None, SimulationConfig(frame="interaction", t_final=0.01e-9), p)
    evolve(None, SimulationConfig(frame="reduced", t_final=0.1e-9), p)

    t0 = time.perf_counter()
    evolve(None, SimulationConfig(frame="interaction", t_final=1e-9), p)
    t_full = time.perf_counter() - t0

    t0 = time.perf_counter()
    evolve(None, SimulationConfig(frame="reduced", t_final=400e-9), p)
    t_reduced = time.perf_counter() - t0

    return {"backend": _kernels.BACKEND, "full_1ns_s": t_full, "reduced_400ns_s": t_reduced}


def run_child(no_numba: bool) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["EETSIM_NO_NUMBA"] = "1"
    else:
        env.pop("EETSIM_NO_NUMBA", None)
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--single", "--json"],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--single", action="store_true", help="time the current backend only")
    ap.add_argument("--json", action="store_true", help="emit machine-readable output")
    args = ap.parse_args()

    if args.single:
        r = workload()
        if args.json:
            print(json.dumps(r))
        else:
            print(f"backend = {r['backend']}")
            print(f"  full engine, 1 ns (dim 144):     {r['full_1ns_s']:8.3f} s")
            print(f"  reduced engine, 400 ns (dim 7):  {r['reduced_400ns_s']:8.3f} s")
        return

    fast = run_child(no_numba=False)
    slow = run_child(no_numba=True)
    for r in (fast, slow):
        print(f"backend = {r['backend']}")
        print(f"  full engine, 1 ns (dim 144):     {r['full_1ns_s']:8.3f} s")
        print(f"  reduced engine, 400 ns (dim 7):  {r['reduced_400ns_s']:8.3f} s")
    print(
        f"speedup ({fast['backend']} over {slow['backend']}): "
        f"full {slow['full_1ns_s'] / fast['full_1ns_s']:.1f}x, "
        f"reduced {slow['reduced_400ns_s'] / fast['reduced_400ns_s']:.1f}x"
    )


if __name__ == "__main__":
    main()
