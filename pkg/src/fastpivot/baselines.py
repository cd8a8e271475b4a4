"""Reference index algorithms: conventional pivoting (CP), state elimination (SE), VWB.

These exist to cross-check the fast-pivoting algorithm and to benchmark it.
All three share its tie-breaking rule and accept a forced selection order
and a trace list, so their intermediate quantities can be compared step by
step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDiscount, DegeneratePivot
from .fp import PIVOT_ATOL, pick_state
from .linsolve import solve_dense
from .model import BanditInstance, IndexResult, OpCounter


def _require_discounted(instance: BanditInstance, name: str) -> None:
    if not instance.beta < 1.0:
        raise BadDiscount(f"{name} requires beta < 1: its tableau divides by 1 - beta")


@dataclass
class CPTableau:
    """Full tableau of the CP algorithm after ``k`` steps, in state labels."""

    A: np.ndarray
    w: np.ndarray
    r: np.ndarray
    S: np.ndarray
    k: int
    pivot: float


def cp_compute(instance: BanditInstance, order=None, trace: list | None = None) -> IndexResult:
    """Gittins indices by conventional parametric-simplex pivoting on the full tableau."""
    _require_discounted(instance, "CP")
    n, beta = instance.n, instance.beta
    cnt = OpCounter()
    A = (np.eye(n) - beta * instance.P) / (1.0 - beta)
    cnt.add(muldiv=n * n + n * n, addsub=n + 1)
    w = np.ones(n)
    r = np.array(instance.R)
    active = np.ones(n, dtype=bool)   # S_{k-1}^c
    labels = np.arange(n)
    chosen = np.empty(n, dtype=int)
    index = np.empty(n)

    for k in range(1, n + 1):
        cand = np.flatnonzero(active)
        ratios = r[cand] / w[cand]
        cnt.add(muldiv=cand.size)
        i = int(cand[pick_state(ratios, labels[cand])]) if order is None else int(order[k - 1])
        index[i] = r[i] / w[i]
        chosen[k - 1] = i
        prev = ~active                # S_{k-1}
        active[i] = False             # now S_k^c
        p = np.nan
        if k < n:
            p = A[i, i]
            if abs(p) < PIVOT_ATOL:
                raise DegeneratePivot(k, p)
            A[i, i] = 1.0
            v = A[:, i] / p
            h = -A[i, :]
            cnt.add(muldiv=n)
            A += np.outer(v, h)
            cnt.add(muldiv=n * n, addsub=n * n)
            A[:, i] = v
            A[i, :] = h / p
            cnt.add(muldiv=n)
            m, s = int(active.sum()), int(prev.sum())
            wi, ri = w[i], r[i]
            w[active] -= wi * A[active, i]
            w[prev] += wi * A[prev, i]
            w[i] = wi / p
            r[active] -= ri * A[active, i]
            r[prev] += ri * A[prev, i]
            r[i] = ri / p
            cnt.add(muldiv=2 * (m + s + 1), addsub=2 * (m + s))
        if trace is not None:
            trace.append(CPTableau(A.copy(), w.copy(), r.copy(), chosen[:k].copy(), k, p))
    return IndexResult(order=chosen, index=index, flops=cnt, algorithm="cp")


@dataclass
class SEState:
    """State-elimination quantities after ``k`` steps.

    ``Ptil``, ``betaVec`` and ``rtil`` are indexed by the remaining states
    ``rest`` (in that order).
    """

    Ptil: np.ndarray
    betaVec: np.ndarray
    rtil: np.ndarray
    rest: np.ndarray
    S: np.ndarray
    k: int


def se_compute(instance: BanditInstance, order=None, trace: list | None = None) -> IndexResult:
    """Gittins indices by eliminating selected states from the chain one at a time."""
    _require_discounted(instance, "SE")
    n, beta = instance.n, instance.beta
    cnt = OpCounter()
    # permuted layout: eliminated states at positions < k
    Pt = beta * instance.P
    bvec = np.full(n, beta)
    rt = (1.0 - beta) * instance.R
    cnt.add(muldiv=n * n + n, addsub=1)
    perm = np.arange(n)
    chosen = np.empty(n, dtype=int)
    index = np.empty(n)

    for k in range(1, n + 1):
        t = k - 1
        denom = 1.0 - bvec[t:]
        ratios = rt[t:] / denom
        cnt.add(muldiv=n - t, addsub=n - t)
        if order is None:
            pos = t + pick_state(ratios, perm[t:])
        else:
            pos = t + int(np.flatnonzero(perm[t:] == order[t])[0])
        i = int(perm[pos])
        index[i] = ratios[pos - t]
        chosen[t] = i
        if pos != t:
            for v in (perm, bvec, rt):
                v[[t, pos]] = v[[pos, t]]
            Pt[[t, pos]] = Pt[[pos, t]]
            Pt[:, [t, pos]] = Pt[:, [pos, t]]
        if k < n:
            d = 1.0 - Pt[t, t]
            if abs(d) < PIVOT_ATOL:
                raise DegeneratePivot(k, d)
            m = n - k
            col = Pt[k:, t] * (1.0 / d)
            cnt.add(muldiv=m + 1, addsub=1)
            Pt[k:, t] = col
            Pt[k:, k:] += np.outer(col, Pt[t, k:])
            cnt.add(muldiv=m * m, addsub=m * m)
            bvec[k:] = Pt[k:, k:].sum(axis=1)
            cnt.add(addsub=m * (m - 1))
            rt[k:] += rt[t] * col
            cnt.add(muldiv=m, addsub=m)
        if trace is not None:
            trace.append(SEState(Pt[k:, k:].copy(), bvec[k:].copy(), rt[k:].copy(),
                                 perm[k:].copy(), chosen[:k].copy(), k))
    return IndexResult(order=chosen, index=index, flops=cnt, algorithm="se")


@dataclass
class VWBState:
    """Solutions ``a``, ``b`` of the two restricted systems at step ``k``."""

    a: np.ndarray
    b: np.ndarray
    S: np.ndarray
    k: int


def vwb_compute(instance: BanditInstance, order=None, trace: list | None = None) -> IndexResult:
    """Gittins indices by solving two fresh linear systems per step.

    Each step eliminates both ``|S_{k-1}|``-dimensional systems from scratch,
    so the operation count grows like ``n^4 / 3``.
    """
    _require_discounted(instance, "VWB")
    n, beta = instance.n, instance.beta
    P, R = instance.P, instance.R
    cnt = OpCounter()
    S: list[int] = []
    in_S = np.zeros(n, dtype=bool)
    chosen = np.empty(n, dtype=int)
    index = np.empty(n)

    for k in range(1, n + 1):
        s = len(S)
        Sidx = np.array(S, dtype=int)
        rest = np.flatnonzero(~in_S)
        m = rest.size
        a = np.zeros(n)
        b = np.zeros(n)
        if s:
            M = np.eye(s) - beta * P[np.ix_(Sidx, Sidx)]
            rhs_a = beta * R[Sidx]
            cnt.add(muldiv=s * s + s, addsub=s)
            a[Sidx] = solve_dense(M, rhs_a, cnt)
            b[Sidx] = solve_dense(M, np.full(s, beta), cnt)
        PrS = P[np.ix_(rest, Sidx)]
        a[rest] = beta * R[rest] + beta * (PrS @ a[Sidx])
        b[rest] = beta + beta * (PrS @ b[Sidx])
        dot_adds = m * max(s - 1, 0)
        cnt.add(muldiv=m * s + 2 * m, addsub=dot_adds + m)
        cnt.add(muldiv=m * s + m, addsub=dot_adds + m)
        ratios = a[rest] / b[rest]
        cnt.add(muldiv=m)
        if order is None:
            i = int(rest[pick_state(ratios, rest)])
        else:
            i = int(order[k - 1])
        index[i] = a[i] / b[i]
        chosen[k - 1] = i
        if trace is not None:
            trace.append(VWBState(a.copy(), b.copy(), Sidx.copy(), k))
        S.append(i)
        in_S[i] = True
    return IndexResult(order=chosen, index=index, flops=cnt, algorithm="vwb")
