"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the switch is read at
import time. Usage: ``python benchmarks/bench_backends.py [--repeat 3]``.
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import numpy as np
from csci._accel import backend
from csci.data_model import CurrentStatusSample
from csci.npmle import npmle_fit
from csci.valid_ci import valid_curve
from csci.abf_ci import AbfConfig, abf_curve
from csci.length_planner import PlannerInput, length_curve

rng = np.random.default_rng(0)
n = 400
c = np.sort(rng.exponential(size=n))
s = CurrentStatusSample(c, (rng.exponential(size=n) <= c).astype(np.int64))
F = npmle_fit(s)
tasks = {
    "npmle": lambda: npmle_fit(s),
    "valid_curve": lambda: valid_curve(s),
    "abf_curve_midp": lambda: abf_curve(s, cfg=AbfConfig(variant="mid_p"), F_step=F),
    "planner_curve": lambda: length_curve(PlannerInput(200, 0.5, 1.0), 60),
}
out = {"backend": backend()}
for name, task in tasks.items():
    task()  # warm-up (compilation for numba)
    best = float("inf")
    for _ in range(REPEAT):
        t0 = time.perf_counter()
        task()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(disable, repeat):
    env = dict(os.environ, CSCI_DISABLE_NUMBA="1" if disable else "0")
    code = WORKLOAD.replace("REPEAT", str(repeat))
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    print(f"{'task':<16}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:<16}{fast[key]:>12.4f}{slow[key]:>12.4f}{slow[key] / fast[key]:>10.1f}")


if __name__ == "__main__":
    main()
