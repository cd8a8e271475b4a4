"""Bandit and stopping instances, run results, random generation and JSON I/O.

States are numbered ``0..n-1`` throughout the Python API. Instance files and
printed reports number them ``1..n``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    BadDiscount,
    DimensionMismatch,
    NegativeProbability,
    NonStochasticRow,
    ParseError,
    ValidationError,
)

ROW_SUM_TOL = 1e-9


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name} must have {ndim} dimension(s), got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BanditInstance:
    """A finite-state bandit: transition matrix ``P``, rewards ``R``, discount ``beta``.

    Arrays are copied and made read-only on construction. Construction does
    not check the invariants; use :func:`validate_instance` for that.
    """

    P: np.ndarray
    R: np.ndarray
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "P", _frozen(self.P, 2, "P"))
        object.__setattr__(self, "R", _frozen(self.R, 1, "R"))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def n(self) -> int:
        return self.R.shape[0]

    def with_rewards(self, R) -> "BanditInstance":
        return BanditInstance(self.P, R, self.beta)

    def with_beta(self, beta: float) -> "BanditInstance":
        return BanditInstance(self.P, self.R, beta)


@dataclass(frozen=True)
class StoppingInstance:
    """Bandit data plus terminal rewards ``Q`` and continuation charge ``nu``."""

    base: BanditInstance
    Q: np.ndarray
    nu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "Q", _frozen(self.Q, 1, "Q"))
        object.__setattr__(self, "nu", float(self.nu))

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def P(self) -> np.ndarray:
        return self.base.P

    @property
    def R(self) -> np.ndarray:
        return self.base.R

    @property
    def beta(self) -> float:
        return self.base.beta


@dataclass
class OpCounter:
    """Tally of scalar multiplications/divisions and additions/subtractions."""

    muldiv: int = 0
    addsub: int = 0

    def add(self, muldiv: int = 0, addsub: int = 0) -> None:
        self.muldiv += int(muldiv)
        self.addsub += int(addsub)

    @property
    def total(self) -> int:
        return self.muldiv + self.addsub

    def reset(self) -> None:
        self.muldiv = 0
        self.addsub = 0


@dataclass
class ExtendedRecord:
    """Per-step output of the fast-pivoting algorithm in extended mode.

    Row ``k-1`` of ``w`` and ``nu`` holds the marginal workloads and marginal
    productivity rates of every state for the continuation set ``S_k``.
    ``A`` is the final working tableau in state labels: entry ``(i, j)`` with
    ``i`` selected after ``j`` is ``A_{ij}`` of the lower block, and with ``i``
    selected before ``j`` it is the upper block entry. Its diagonal is unused.
    """

    order: np.ndarray
    index: np.ndarray
    w: np.ndarray
    nu: np.ndarray
    A: np.ndarray


@dataclass
class IndexResult:
    """Gittins indices and the order in which states were selected.

    ``index[i]`` is the index of state ``i``; ``order[k]`` is the state picked
    at step ``k+1``, so ``index[order]`` is nonincreasing.
    """

    order: np.ndarray
    index: np.ndarray
    flops: OpCounter = field(default_factory=OpCounter)
    algorithm: str = ""
    extended: ExtendedRecord | None = None

    @property
    def n(self) -> int:
        return self.index.shape[0]

    def ranks(self) -> np.ndarray:
        """1-based selection rank of every state."""
        ranks = np.empty(self.n, dtype=int)
        ranks[self.order] = np.arange(1, self.n + 1)
        return ranks


Instance = Union[BanditInstance, StoppingInstance]


def validate_instance(inst: Instance) -> Instance:
    """Check every invariant of a bandit (or stopping) instance.

    Returns the same object when valid. Rows of ``P`` are never renormalized;
    a row sum off by more than ``1e-9`` is an error.
    """
    base = inst.base if isinstance(inst, StoppingInstance) else inst
    P, R, n = base.P, base.R, base.n
    if n < 1:
        raise DimensionMismatch("instance needs at least one state")
    if P.shape != (n, n):
        raise DimensionMismatch(f"P has shape {P.shape}, expected ({n}, {n})")
    if not np.all(np.isfinite(P)):
        raise ValidationError("P has non-finite entries")
    neg = np.argwhere(P < 0)
    if neg.size:
        i, j = neg[0]
        raise NegativeProbability(int(i) + 1, int(j) + 1, float(P[i, j]))
    dev = P.sum(axis=1) - 1.0
    bad = np.flatnonzero(np.abs(dev) > ROW_SUM_TOL)
    if bad.size:
        raise NonStochasticRow(int(bad[0]) + 1, float(dev[bad[0]]))
    if not (0.0 < base.beta <= 1.0) or math.isnan(base.beta):
        raise BadDiscount(f"discount factor {base.beta!r} not in (0, 1]")
    if not np.all(np.isfinite(R)):
        raise ValidationError("R has non-finite entries")
    if isinstance(inst, StoppingInstance):
        if inst.Q.shape != (n,):
            raise DimensionMismatch(f"Q has shape {inst.Q.shape}, expected ({n},)")
        if not np.all(np.isfinite(inst.Q)):
            raise ValidationError("Q has non-finite entries")
        if not math.isfinite(inst.nu):
            raise ValidationError("nu is not finite")
    return inst


def random_instance(
    n: int,
    density: float = 1.0,
    reward_range: tuple[float, float] = (0.0, 1.0),
    beta: float = 0.9,
    seed: int = 0,
) -> BanditInstance:
    """Draw a random bandit.

    Each row of ``P`` gets ``max(1, round(density * n))`` distinct columns,
    chosen uniformly, filled with uniform(0, 1) draws and then normalized.
    Rewards are uniform on ``reward_range``. The result depends only on the
    arguments.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < density <= 1.0:
        raise ValueError("density must lie in (0, 1]")
    lo, hi = reward_range
    if hi < lo:
        raise ValueError("reward_range must satisfy min <= max")
    rng = np.random.default_rng(seed)
    nnz = max(1, round(density * n))
    # nnz distinct columns per row: the first nnz of a random permutation
    cols = np.argsort(rng.random((n, n)), axis=1)[:, :nnz]
    vals = rng.uniform(0.0, 1.0, size=(n, nnz))
    for i in np.flatnonzero(vals.sum(axis=1) == 0.0):
        while vals[i].sum() == 0.0:
            vals[i] = rng.uniform(0.0, 1.0, size=nnz)
    P = np.zeros((n, n))
    np.put_along_axis(P, cols, vals / vals.sum(axis=1, keepdims=True), axis=1)
    R = rng.uniform(lo, hi, size=n)
    return validate_instance(BanditInstance(P, R, beta))


def random_stopping_instance(
    n: int,
    density: float = 1.0,
    reward_range: tuple[float, float] = (0.0, 1.0),
    terminal_range: tuple[float, float] = (-2.0, 2.0),
    nu_range: tuple[float, float] = (-2.0, 2.0),
    beta: float = 0.9,
    seed: int = 0,
) -> StoppingInstance:
    base = random_instance(n, density, reward_range, beta, seed)
    rng = np.random.default_rng([seed, 1])
    Q = rng.uniform(*terminal_range, size=n)
    nu = rng.uniform(*nu_range)
    return validate_instance(StoppingInstance(base, Q, nu))


def instance_to_dict(inst: Instance) -> dict:
    base = inst.base if isinstance(inst, StoppingInstance) else inst
    out = {"n": base.n, "beta": base.beta, "P": base.P.tolist(), "R": base.R.tolist()}
    if isinstance(inst, StoppingInstance):
        out["Q"] = inst.Q.tolist()
        out["nu"] = inst.nu
    return out


def instance_from_dict(d: dict) -> Instance:
    if not isinstance(d, dict):
        raise ParseError("<root>", "expected a JSON object")
    for key in ("n", "beta", "P", "R"):
        if key not in d:
            raise ParseError(key, "missing required key")
    n = d["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParseError("n", "must be an integer")
    try:
        P = np.array(d["P"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError("P", str(exc)) from None
    if P.shape != (n, n):
        raise DimensionMismatch(f"P has shape {P.shape}, expected ({n}, {n})")
    try:
        R = np.array(d["R"], dtype=np.float64)
        beta = float(d["beta"])
    except (TypeError, ValueError) as exc:
        raise ParseError("R/beta", str(exc)) from None
    if R.shape != (n,):
        raise DimensionMismatch(f"R has shape {R.shape}, expected ({n},)")
    base = BanditInstance(P, R, beta)
    if "Q" not in d:
        return validate_instance(base)
    try:
        Q = np.array(d["Q"], dtype=np.float64)
        nu = float(d.get("nu", 0.0))
    except (TypeError, ValueError) as exc:
        raise ParseError("Q/nu", str(exc)) from None
    if Q.shape != (n,):
        raise DimensionMismatch(f"Q has shape {Q.shape}, expected ({n},)")
    return validate_instance(StoppingInstance(base, Q, nu))


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst)) + "\n")


def load_instance(path) -> Instance:
    """Read a JSON instance file; the presence of ``"Q"`` yields a StoppingInstance."""
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("<json>", f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(d)
