"""Algorithm registry, cross-algorithm comparison and the runtime/flop benchmark."""

from __future__ import annotations

import csv
import io
import statistics
import time
from itertools import combinations

import numpy as np

from .baselines import cp_compute, se_compute, vwb_compute
from .fp import fp_compute
from .model import BanditInstance, IndexResult, random_instance

ALGORITHMS = {
    "fp0": lambda inst: fp_compute(inst),
    "fp1": lambda inst: fp_compute(inst, extended=True),
    "cp": cp_compute,
    "se": se_compute,
    "vwb": vwb_compute,
}

# (column name, numerator, denominator)
SPEEDUPS = [
    ("fp1_over_fp0", "fp1", "fp0"),
    ("cp_over_fp0", "cp", "fp0"),
    ("se_over_fp0", "se", "fp0"),
    ("fp1_over_cp", "fp1", "cp"),
]
BASE_COLUMNS = ["n", "algo", "seconds", "muldiv", "addsub", "flops_per_n3"]


def applicable(instance: BanditInstance) -> list[str]:
    """Algorithms defined for this instance (only FP(0) handles ``beta = 1``)."""
    return list(ALGORITHMS) if instance.beta < 1.0 else ["fp0"]


def relative_deviation(a, b) -> float:
    """Max of ``|a - b| / max(1, |a|, |b|)`` over components."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size == 0:
        return 0.0
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float((np.abs(a - b) / scale).max())


def orders_agree(index: np.ndarray, order_a, order_b, tol: float = 1e-8) -> bool:
    """Selection orders agree up to permutations inside groups of tied index values."""
    return relative_deviation(index[np.asarray(order_a)], index[np.asarray(order_b)]) <= tol


def compare_algorithms(instance: BanditInstance, algos=None, oracle: bool = False):
    """Run ``algos`` (default: all applicable) and collect pairwise deviations.

    Returns ``(results, max_dev, orders_ok)`` where ``results`` maps names to
    index vectors (``"oracle"`` included when requested) and ``orders_ok``
    compares every algorithm's order against the first one's.
    """
    from .oracle import gittins_bruteforce_all

    names = algos or applicable(instance)
    runs: dict[str, IndexResult] = {name: ALGORITHMS[name](instance) for name in names}
    vectors = {name: r.index for name, r in runs.items()}
    if oracle:
        vectors["oracle"] = gittins_bruteforce_all(instance)
    max_dev = max((relative_deviation(vectors[a], vectors[b])
                   for a, b in combinations(vectors, 2)), default=0.0)
    first = runs[names[0]]
    orders_ok = all(orders_agree(first.index, first.order, r.order) for r in runs.values())
    return vectors, max_dev, orders_ok


def run_bench(sizes, algos, seed: int = 0, reps: int = 1, density: float = 1.0,
              beta: float = 0.9, timer=time.perf_counter) -> list[dict]:
    """One row per ``(n, algo)``; times are the median over ``reps`` runs."""
    rows = []
    for n in sizes:
        inst = random_instance(n, density=density, beta=beta, seed=seed)
        times = {}
        block = []
        for algo in algos:
            samples = []
            result = None
            for _ in range(reps):
                t0 = timer()
                result = ALGORITHMS[algo](inst)
                samples.append(timer() - t0)
            times[algo] = statistics.median(samples)
            power = 4 if algo == "vwb" else 3
            block.append({
                "n": n,
                "algo": algo,
                "seconds": times[algo],
                "muldiv": result.flops.muldiv,
                "addsub": result.flops.addsub,
                "flops_per_n3": result.flops.total / n ** power,
            })
        for row in block:
            for col, num, den in SPEEDUPS:
                if num in times and den in times:
                    row[col] = times[num] / times[den] if times[den] > 0 else float("nan")
        rows.extend(block)
    return rows


def bench_columns(algos) -> list[str]:
    present = set(algos)
    return BASE_COLUMNS + [c for c, a, b in SPEEDUPS if a in present and b in present]


def bench_csv(rows: list[dict], algos) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=bench_columns(algos), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v
                         for k, v in row.items()})
    return buf.getvalue()
