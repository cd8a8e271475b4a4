"""Command-line front end: ``gen``, ``index``, ``stop``, ``compare``, ``bench``.

Exit status: 0 success, 2 bad input, 3 algorithm precondition violated,
4 algorithms disagree beyond tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bench import ALGORITHMS, bench_csv, compare_algorithms, run_bench
from .errors import BadDiscount, DegeneratePivot, FastPivotError, SingularMatrix
from .model import (
    BanditInstance,
    StoppingInstance,
    instance_to_dict,
    load_instance,
    random_instance,
    save_instance,
)
from .oracle import MAX_BRUTEFORCE_N
from .stopping import solve_optimal_stopping, value_iteration

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_DISAGREE = 0, 2, 3, 4


class InputError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return values


def _algo_list(text: str) -> list[str]:
    names = [x.strip() for x in text.split(",") if x.strip()]
    unknown = [x for x in names if x not in ALGORITHMS]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s): {', '.join(unknown) or text!r}")
    return names


def _load(path) -> BanditInstance | StoppingInstance:
    try:
        return load_instance(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except FastPivotError as exc:
        raise InputError(f"{path}: {type(exc).__name__}: {exc}") from None


def _bandit(inst) -> BanditInstance:
    return inst.base if isinstance(inst, StoppingInstance) else inst


def _write_table(rows: list[dict], out: str | None) -> None:
    if out is None:
        cols = list(rows[0]) if rows else []
        print("\t".join(cols))
        for row in rows:
            print("\t".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row.values()))
        return
    path = Path(out)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(rows, indent=2) + "\n")
    else:
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)


def cmd_gen(args) -> int:
    if not 0.0 < args.density <= 1.0:
        raise InputError("--density must lie in (0, 1]")
    if args.reward_max < args.reward_min:
        raise InputError("--reward-max must be >= --reward-min")
    try:
        inst = random_instance(args.n, args.density, (args.reward_min, args.reward_max),
                               args.beta, args.seed)
    except FastPivotError as exc:
        raise InputError(str(exc)) from None
    if args.out:
        save_instance(inst, args.out)
    else:
        print(json.dumps(instance_to_dict(inst)))
    return EXIT_OK


def cmd_index(args) -> int:
    inst = _bandit(_load(args.instance))
    result = ALGORITHMS[args.algo](inst)
    ranks = result.ranks()
    rows = []
    for i in range(inst.n):
        row = {"state": i + 1, "index": float(result.index[i]), "rank": int(ranks[i])}
        if args.flops:
            row["muldiv"] = result.flops.muldiv
            row["addsub"] = result.flops.addsub
        rows.append(row)
    rows.sort(key=lambda r: r["rank"])
    _write_table(rows, args.out)
    return EXIT_OK


def cmd_stop(args) -> int:
    inst = _load(args.instance)
    if not isinstance(inst, StoppingInstance):
        raise InputError(f"{args.instance} has no terminal rewards Q")
    if args.nu is not None:
        inst = StoppingInstance(inst.base, inst.Q, args.nu)
    sol = solve_optimal_stopping(inst)
    rows = []
    for i in range(inst.n):
        row = {"state": i + 1, "rhat": float(sol.rhat[i]), "index": float(sol.indexHat[i]),
               "decision": "stop" if sol.stopSet[i] else "continue"}
        if sol.value is not None:
            row["value"] = float(sol.value[i])
        rows.append(row)
    _write_table(rows, args.out)
    if args.check_vi:
        if sol.value is None:
            raise InputError("--check-vi needs beta < 1")
        V = value_iteration(inst, tol=args.vi_tol)
        gap = float(np.abs(V - sol.value).max())
        print(f"vi_gap\t{gap:.3e}")
    return EXIT_OK


def cmd_compare(args) -> int:
    inst = _bandit(_load(args.instance))
    use_oracle = args.oracle and inst.n <= MAX_BRUTEFORCE_N and inst.beta < 1.0
    if args.oracle and not use_oracle:
        print("oracle skipped (needs n <= 20 and beta < 1)", file=sys.stderr)
    vectors, max_dev, orders_ok = compare_algorithms(inst, oracle=use_oracle)
    print("algorithms\t" + ",".join(vectors))
    print(f"max_rel_deviation\t{max_dev:.3e}")
    print(f"orders_agree\t{str(orders_ok).lower()}")
    ok = max_dev <= args.tol and orders_ok
    print("status\t" + ("ok" if ok else "DISAGREE"))
    return EXIT_OK if ok else EXIT_DISAGREE


def cmd_bench(args) -> int:
    if "vwb" in args.algos and max(args.sizes) > args.vwb_max_n:
        raise InputError(f"vwb is limited to n <= {args.vwb_max_n} (see --vwb-max-n)")
    rows = run_bench(args.sizes, args.algos, seed=args.seed, reps=args.reps,
                     density=args.density, beta=args.beta)
    text = bench_csv(rows, args.algos)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastpivot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--density", type=float, default=1.0)
    g.add_argument("--beta", type=float, default=0.9)
    g.add_argument("--reward-min", type=float, default=0.0)
    g.add_argument("--reward-max", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    ix = sub.add_parser("index", help="compute Gittins indices")
    ix.add_argument("instance")
    ix.add_argument("--algo", choices=list(ALGORITHMS), default="fp0")
    ix.add_argument("--flops", action="store_true", help="add operation-count columns")
    ix.add_argument("--out", help="write .csv or .json instead of printing")
    ix.set_defaults(func=cmd_index)

    st = sub.add_parser("stop", help="solve optimal stopping with terminal rewards")
    st.add_argument("instance")
    st.add_argument("--nu", type=float, help="override the continuation charge")
    st.add_argument("--check-vi", action="store_true", help="cross-check against value iteration")
    st.add_argument("--vi-tol", type=float, default=1e-10)
    st.add_argument("--out")
    st.set_defaults(func=cmd_stop)

    cp = sub.add_parser("compare", help="run all applicable algorithms and compare")
    cp.add_argument("instance")
    cp.add_argument("--tol", type=float, default=1e-8)
    cp.add_argument("--oracle", action="store_true", help="include brute force (n <= 20)")
    cp.set_defaults(func=cmd_compare)

    b = sub.add_parser("bench", help="runtime and operation-count report as CSV")
    b.add_argument("--sizes", type=_int_list, required=True)
    b.add_argument("--algos", type=_algo_list, default=["fp0", "fp1", "cp", "se"])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--reps", type=_positive_int, default=1)
    b.add_argument("--density", type=float, default=1.0)
    b.add_argument("--beta", type=float, default=0.9)
    b.add_argument("--vwb-max-n", type=int, default=500)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BadDiscount as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DegeneratePivot, SingularMatrix) as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
