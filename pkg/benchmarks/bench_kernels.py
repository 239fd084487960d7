#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot paths (replacement-process stepping and pairwise shared
counting) and a full end-to-end simulation, on both backends, and verifies
along the way that they return identical results.

Usage: python3 benchmarks/bench_kernels.py [--slots N] [--repeats R]
"""

import argparse
import time

import numpy as np

from isolect._kernels import _pykernels

try:
    from isolect._kernels import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_evolve(slots, repeats):
    rng = np.random.default_rng(0)
    parent = rng.integers(0, slots, slots).astype(np.int64)
    uniforms = rng.random(slots)
    rows = []
    py_time, py_out = best_of(lambda: _pykernels.evolve_slots(parent, uniforms, 0.25, slots), repeats)
    rows.append(("python", py_time))
    if _ckernels is not None:
        cy_time, cy_out = best_of(lambda: _ckernels.evolve_slots(parent, uniforms, 0.25, slots), repeats)
        assert np.array_equal(py_out[0], cy_out[0]) and py_out[1] == cy_out[1]
        rows.append(("cython", cy_time))
    return rows


def bench_counts(slots, repeats):
    rng = np.random.default_rng(1)
    classes = rng.integers(0, 40, (8, slots)).astype(np.int64)
    rows = []
    py_time, py_out = best_of(lambda: _pykernels.pair_shared_counts(classes), repeats)
    rows.append(("python", py_time))
    if _ckernels is not None:
        cy_time, cy_out = best_of(lambda: _ckernels.pair_shared_counts(classes), repeats)
        assert np.array_equal(py_out, cy_out)
        rows.append(("cython", cy_time))
    return rows


def bench_simulation(slots, repeats):
    import isolect._kernels as kernels
    from isolect import SimulationConfig, simulate_cognacy
    from isolect.dendrogram import ChainNode, Dendrogram, Leaf, RootLink

    cherry1 = ChainNode(id="t1", width=6.0, left=Leaf("a"), right=Leaf("b"),
                        left_edge=10.0, right_edge=10.0, attach_side="right")
    cherry2 = ChainNode(id="t2", width=0.0, left=Leaf("c"), right=Leaf("d"),
                        left_edge=12.0, right_edge=12.0, attach_side="right")
    cfg = SimulationConfig(tree=Dendrogram(RootLink(30.0, cherry1, cherry2)),
                           slots=slots, seed=123)

    saved = (kernels.evolve_slots, kernels.pair_shared_counts)
    rows = []
    try:
        kernels.evolve_slots = _pykernels.evolve_slots
        kernels.pair_shared_counts = _pykernels.pair_shared_counts
        py_time, py_table = best_of(lambda: simulate_cognacy(cfg), repeats)
        rows.append(("python", py_time))
        if _ckernels is not None:
            kernels.evolve_slots = _ckernels.evolve_slots
            kernels.pair_shared_counts = _ckernels.pair_shared_counts
            cy_time, cy_table = best_of(lambda: simulate_cognacy(cfg), repeats)
            assert np.array_equal(py_table.class_ids, cy_table.class_ids)
            rows.append(("cython", cy_time))
    finally:
        kernels.evolve_slots, kernels.pair_shared_counts = saved
    return rows


def show(title, rows, slots):
    print(f"\n{title} ({slots:,} slots)")
    base = dict(rows).get("python")
    for backend, seconds in rows:
        speedup = f"  ({base / seconds:.2f}x vs python)" if backend != "python" else ""
        print(f"  {backend:<7} {seconds * 1e3:9.3f} ms{speedup}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--slots", type=int, default=1_000_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels unavailable; timing the numpy fallback only")

    show("evolve_slots", bench_evolve(args.slots, args.repeats), args.slots)
    show("pair_shared_counts", bench_counts(args.slots, args.repeats), args.slots)
    show("simulate_cognacy (4 leaves)", bench_simulation(args.slots, args.repeats), args.slots)


if __name__ == "__main__":
    main()
