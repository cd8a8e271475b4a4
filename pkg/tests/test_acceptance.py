"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import csv
import io
import time

import numpy as np
import pytest

from fastpivot import (
    BanditInstance,
    StoppingInstance,
    cp_compute,
    evaluate_stopping_rule,
    fp_compute,
    random_instance,
    random_stopping_instance,
    reduce_terminal_rewards,
    se_compute,
    solve_optimal_stopping,
    value_iteration,
    vwb_compute,
)
from fastpivot.bench import ALGORITHMS, SPEEDUPS, orders_agree, relative_deviation
from fastpivot.cli import main
from fastpivot.oracle import (
    gittins_bruteforce_all,
    kelly_monotonicity_check,
    marginal_measures_direct,
    measures_from_occupancy,
    occupancy_matrices,
    optimality_interval_check,
)
from fastpivot.stopping import continuation_values

ALL_FIVE = ["fp0", "fp1", "cp", "se", "vwb"]


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


def test_criterion_1_cross_algorithm_equivalence(report):
    t0 = time.perf_counter()
    worst_pair = worst_oracle = 0.0
    order_failures = 0
    count = 0
    for beta in (0.2, 0.5, 0.9, 0.99):
        for n in range(2, 13):
            for seed in range(200):
                density = 1.0 if seed % 2 == 0 else 0.4
                inst = random_instance(n, density, (-1.0, 1.0), beta, seed)
                runs = [ALGORITHMS[a](inst) for a in ALL_FIVE]
                ref = runs[0]
                for r in runs[1:]:
                    worst_pair = max(worst_pair, relative_deviation(ref.index, r.index))
                    order_failures += not orders_agree(ref.index, ref.order, r.order)
                if n <= 10:
                    bf = gittins_bruteforce_all(inst)
                    worst_oracle = max(worst_oracle,
                                       max(relative_deviation(bf, r.index) for r in runs))
                count += 1
    elapsed = time.perf_counter() - t0
    ok = worst_pair <= 1e-8 and worst_oracle <= 1e-8 and order_failures == 0 and elapsed < 60
    assert report(1, ok, f"{count} instances, pairwise {worst_pair:.1e}, "
                         f"oracle {worst_oracle:.1e}, order mismatches {order_failures}, "
                         f"{elapsed:.1f}s")


def test_criterion_2_micro_instance(report):
    inst = BanditInstance([[0.5, 0.5], [0.5, 0.5]], [1.0, 0.0], 0.5)
    worst = max(np.abs(ALGORITHMS[a](inst).index - [1.0, 0.25]).max() for a in ALL_FIVE)
    worst = max(worst, np.abs(gittins_bruteforce_all(inst) - [1.0, 0.25]).max())
    trace = []
    se_compute(inst, trace=trace)
    step = trace[0]
    traj = max(abs(step.Ptil[0, 0] - 1 / 3), abs(step.rtil[0] - 1 / 6))
    # same quantities from the marginal measures of S = {1}
    mm = marginal_measures_direct(inst, [0])
    traj = max(traj, abs(step.rtil[0] - 0.5 * mm.r[1]), abs(step.betaVec[0] - (1 - 0.5 * mm.w[1])))
    ok = worst <= 1e-12 and traj <= 1e-12 and list(step.rest) == [1]
    assert report(2, ok, f"index error {worst:.1e}, SE trajectory error {traj:.1e}")


def test_criterion_3_flop_counts(report):
    n = 200
    inst = random_instance(n, beta=0.9, seed=0)
    ratios = {a: ALGORITHMS[a](inst).flops.total / n**3 for a in ("fp0", "fp1", "cp", "se")}
    sizes = np.array([50.0, 100.0])
    flops = np.array([vwb_compute(random_instance(int(m), beta=0.9, seed=0)).flops.total
                      for m in sizes])
    c_vwb = float((flops * sizes**4).sum() / (sizes**8).sum())
    bands = {"fp0": (0.60, 0.74), "fp1": (1.25, 1.45), "cp": (1.85, 2.20), "se": (0.92, 1.10)}
    ok = all(lo <= ratios[a] <= hi for a, (lo, hi) in bands.items()) and 0.25 <= c_vwb <= 0.45
    detail = ", ".join(f"{a} {v:.3f}n^3" for a, v in ratios.items()) + f", vwb {c_vwb:.3f}n^4"
    assert report(3, ok, detail)


def test_criterion_4_cp_se_correspondence(report):
    worst = 0.0
    steps = 0
    for beta in (0.5, 0.9):
        for n in (2, 5, 10, 15, 20):
            for seed in range(10):
                inst = random_instance(n, 1.0 if seed % 2 else 0.3, (-1.0, 1.0), beta, seed)
                order = fp_compute(inst).order
                cp_trace, se_trace = [], []
                cp_compute(inst, order=order, trace=cp_trace)
                se_compute(inst, order=order, trace=se_trace)
                for cp, se in zip(cp_trace, se_trace):
                    rest = se.rest
                    if rest.size == 0:
                        continue
                    Pt = np.eye(rest.size) - (1 - beta) * cp.A[np.ix_(rest, rest)]
                    worst = max(worst,
                                np.abs(se.Ptil - Pt).max(),
                                np.abs(se.rtil - (1 - beta) * cp.r[rest]).max(),
                                np.abs(se.betaVec - (1 - (1 - beta) * cp.w[rest])).max())
                    steps += 1
    assert report(4, worst <= 1e-9, f"{steps} steps, worst identity residual {worst:.1e}")


def test_criterion_5_stopping(report):
    worst_a = worst_b = 0.0
    mismatches = 0
    for seed in range(100):
        n = 2 + seed % 7
        beta = 0.5 if seed % 2 == 0 else 0.9
        inst = random_stopping_instance(n, 0.6, (-1.0, 1.0), (-2.0, 2.0), (-2.0, 2.0),
                                        beta, seed)
        rhat = reduce_terminal_rewards(inst)
        rng = np.random.default_rng([seed, 7])
        for _ in range(20):
            S = np.flatnonzero(rng.random(n) < 0.5)
            X0, X1 = occupancy_matrices(inst.base, S)
            lhs = X1 @ inst.R + (1 - beta) * X0 @ inst.Q
            rhs = inst.Q + X1 @ rhat
            worst_a = max(worst_a, np.abs(lhs - rhs).max())
        sol = solve_optimal_stopping(inst)
        V = value_iteration(inst, tol=1e-12)
        gittins_value = evaluate_stopping_rule(inst, sol.continueSet)
        worst_b = max(worst_b, np.abs(gittins_value - V).max())
        vi_stop = inst.Q >= continuation_values(inst, V)
        clear = np.abs(sol.indexHat - inst.nu) > 1e-6
        mismatches += int((vi_stop != sol.stopSet)[clear].sum())
    ok = worst_a <= 1e-9 and worst_b <= 1e-6 and mismatches == 0
    assert report(5, ok, f"(a) {worst_a:.1e}, (b) {worst_b:.1e}, (c) {mismatches} mismatches")


def _irreducible(P):
    reach = (P > 0) | np.eye(P.shape[0], dtype=bool)
    for _ in range(int(np.ceil(np.log2(max(P.shape[0], 2)))) + 1):
        reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
    return bool(reach.all())


def test_criterion_6_undiscounted(report):
    worst = 0.0
    made = 0
    seed = 0
    while made < 50:
        n = 1 + made
        density = 1.0 if made % 2 == 0 else 0.2
        inst = random_instance(n, density, (0.0, 1.0), 1.0, seed)
        seed += 1
        if not _irreducible(inst.P):
            continue
        undisc = fp_compute(inst).index
        near = fp_compute(inst.with_beta(1 - 1e-6)).index
        worst = max(worst, np.abs(undisc - near).max())
        made += 1
    assert report(6, worst <= 1e-3, f"50 irreducible instances, worst gap {worst:.1e}")


def test_criterion_7_marginal_measures(report):
    worst = 0.0
    interval_ok = True
    for seed in range(60):
        n = 2 + seed % 7
        beta = (0.3, 0.7, 0.95)[seed % 3]
        inst = random_instance(n, 0.6, (-1.0, 1.0), beta, seed)
        trace = []
        res = fp_compute(inst, trace=trace)
        for tab in trace:
            rest = tab.complement
            if rest.size == 0:
                continue
            mm = marginal_measures_direct(inst, tab.S)
            worst = max(worst,
                        np.abs(tab.w_by_state()[rest] - mm.w[rest]).max(),
                        np.abs(tab.nu_by_state()[rest] - mm.nuRate[rest]).max())
        interval_ok &= optimality_interval_check(inst, res)
    ok = worst <= 1e-9 and interval_ok
    assert report(7, ok, f"worst (w, nu) deviation {worst:.1e}, intervals ok: {interval_ok}")


def test_criterion_8_monotone_in_discount(report):
    betas = [0.1, 0.3, 0.5, 0.7, 0.9, 0.99]
    failures = 0
    for seed in range(50):
        inst = random_instance(2 + seed % 9, 0.5, (-1.0, 1.0), 0.5, seed)
        failures += not kelly_monotonicity_check(inst, betas, slack=1e-9)
    assert report(8, failures == 0, f"50 instances, {failures} violations")


@pytest.mark.slow
def test_criterion_9_bench_report(report, tmp_path, capsys):
    out = tmp_path / "bench.csv"
    t0 = time.perf_counter()
    code = main(["bench", "--sizes", "500,1000", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    header = list(rows[0]) if rows else []
    expected = ["n", "algo", "seconds", "muldiv", "addsub", "flops_per_n3"]
    expected += [col for col, _, _ in SPEEDUPS]
    complete = all(all(r[c] != "" for c in expected) for r in rows)
    ok = code == 0 and header == expected and len(rows) == 8 and complete and elapsed < 600
    assert report(9, ok, f"{len(rows)} rows, columns {len(header)}, {elapsed:.1f}s")
