"""Time the hot kernels under the numba and the pure-numpy backends.

Each backend runs in its own subprocess because the backend is fixed at
import time by ``SUMPRODLAB_NO_NUMBA``.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from sumprodlab import kernels, _accel, spectral
from sumprodlab.zqgeom import ZqPlane

repeat, quick = int(sys.argv[1]), sys.argv[2] == "1"
rng = np.random.default_rng(0)
plane = ZqPlane(3)
census = plane.reflection_census()
G = spectral.build_bisector_graph(plane, 1, census)
table = G.table()
p = 101
sets = [np.sort(rng.choice(np.arange(1, p), 12 if quick else 24, replace=False)) for _ in range(3)]
rows = np.arange(0, G.n, 500 if quick else 100)
v = rng.standard_normal(G.n)
xs, ys = rng.integers(0, G.n, 200), rng.integers(0, G.n, 200)

cases = {
    "t_counts (F_101)": lambda: kernels.t_counts(*sets, p),
    "reflection_pushforward": lambda: kernels.reflection_pushforward(census.table, ((0, 0), (1, 0)), plane.q),
    f"a2_row_stats ({len(rows)} rows)": lambda: kernels.a2_row_stats(table, rows, 0, 486),
    "a2_entries (200 pairs)": lambda: kernels.a2_entries(table, xs, ys),
    "gather_sum (mat-vec)": lambda: kernels.gather_sum(table, v),
}
out = {}
for name, f in cases.items():
    t = time.perf_counter(); first = f(); warm = time.perf_counter() - t
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter(); res = f(); best = min(best, time.perf_counter() - t)
    digest = float(np.asarray(res, dtype=np.float64).sum())
    out[name] = {"first": warm, "best": best, "digest": digest}
print(json.dumps({"backend": _accel.backend_name(), "results": out}))
"""


def run(backend: str, repeat: int, quick: bool) -> dict:
    env = dict(os.environ)
    env.pop("SUMPRODLAB_NO_NUMBA", None)
    if backend == "numpy":
        env["SUMPRODLAB_NO_NUMBA"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat), "1" if quick else "0"],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()
    t0 = time.perf_counter()
    res = {b: run(b, args.repeat, args.quick) for b in ("numba", "numpy")}
    nb, npy = res["numba"], res["numpy"]
    if nb["backend"] != "numba":
        print("numba is not installed; only the numpy backend was timed")
    print(f"{'kernel':32s} {'numba first':>12s} {'numba best':>11s} {'numpy best':>11s} {'speedup':>8s}  agree")
    for name, r in npy["results"].items():
        a = nb["results"][name]
        agree = abs(a["digest"] - r["digest"]) <= 1e-6 * max(1.0, abs(r["digest"]))
        print(f"{name:32s} {a['first']:12.4f} {a['best']:11.4f} {r['best']:11.4f} {r['best'] / a['best']:8.1f}x  {agree}")
    print(f"total {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
