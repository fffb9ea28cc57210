#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-Python placement kernels.

Builds random structures of growing size, then times the three kernel
entry points on each available backend over identical inputs. Run after
``python setup.py build_ext --inplace`` to have both backends present:

    python3 benchmarks/compare_backends.py [--sizes 5,20,60] [--repeats 20]
"""

import argparse
import time

import numpy as np

from brickassembly._backend import available_backends
from brickassembly.lattice import Combination, Primitive, enumerate_attachments


def build_structure(n_bricks: int, seed: int = 0) -> Combination:
    rng = np.random.default_rng(seed)
    combo = Combination.from_bricks([Primitive(0, 0, 0, 0)])
    while len(combo) < n_bricks:
        att = enumerate_attachments(combo, None)
        combo.add(att[int(rng.integers(len(att)))])
    return combo


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="5,20,60",
                        help="comma-separated structure sizes in bricks")
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repeats per case (best-of)")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = available_backends()
    if "cython" not in backends:
        print("note: compiled backend missing; run `python setup.py build_ext --inplace`")

    header = f"{'op':<22}{'bricks':>8}" + "".join(f"{name + ' (ms)':>16}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for n in sizes:
        combo = build_structure(n)
        arr = combo.as_array()
        candidates = backends["python"].enumerate_attachments(arr, 0, 0, 0, 0)
        extent = int(max(arr[:, 0].max(), arr[:, 1].max()) + 6)
        layers = int(arr[:, 2].max() + 2)
        target = np.ones((extent, extent, layers), dtype=np.uint8)
        occupied = np.zeros_like(target)
        bounded_cands = backends["python"].enumerate_attachments(
            arr + np.array([1, 1, 0, 0]), 1, extent, extent, layers
        )

        cases = [
            ("enumerate_attachments", lambda be: be.enumerate_attachments(arr, 0, 0, 0, 0)),
            ("occupiability_scores", lambda be: be.occupiability_scores(bounded_cands, target, occupied)),
            ("contact_cells", lambda be: be.contact_cells(candidates, arr)),
        ]
        for name, call in cases:
            times = {
                bname: time_call(call, backend, repeats=args.repeats)
                for bname, backend in backends.items()
            }
            row = f"{name:<22}{n:>8}"
            for bname in backends:
                row += f"{times[bname] * 1e3:>16.3f}"
            if len(times) == 2:
                row += f"{times['python'] / times['cython']:>9.1f}x"
            print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
