"""Fast-pivoting Gittins index algorithm, plain FP(0) and extended-output FP(1).

The working matrix is kept in a permuted layout: after step ``k`` the
selected states occupy positions ``0..k-1`` and the rest ``k..n-1``, so the
block ``A_{S^c S}`` is the contiguous slice ``W[k:, :k]`` and, in extended
mode, ``A_{S S^c}`` is ``W[:k, k:]``. Picking a state swaps it into position
``k-1`` together with the matching rows and columns of the permuted copy of
``P``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadDiscount, DegeneratePivot
from .model import BanditInstance, ExtendedRecord, IndexResult, OpCounter

PIVOT_ATOL = 1e-12


def pick_state(values: np.ndarray, labels: np.ndarray) -> int:
    """Position of the largest value; exact ties go to the smallest label."""
    best = values.max()
    cand = np.flatnonzero(values == best)
    if cand.size == 1:
        return int(cand[0])
    return int(cand[np.argmin(labels[cand])])


@dataclass
class ReducedTableau:
    """Working set of the fast-pivoting algorithm (see module docstring for layout).

    ``w`` and ``nu`` are positional. In plain mode only entries at positions
    ``k..n-1`` are current; in extended mode every entry is.
    """

    perm: np.ndarray
    W: np.ndarray
    P: np.ndarray
    w: np.ndarray
    nu: np.ndarray
    beta: float
    extended: bool = False
    k: int = 0
    alpha: float = float("nan")
    flops: OpCounter = field(default_factory=OpCounter)

    @classmethod
    def initial(cls, instance: BanditInstance, extended: bool = False) -> "ReducedTableau":
        n = instance.n
        return cls(
            perm=np.arange(n),
            W=np.zeros((n, n)),
            P=np.array(instance.P),
            w=np.ones(n),
            nu=np.array(instance.R),
            beta=instance.beta,
            extended=extended,
        )

    @property
    def n(self) -> int:
        return self.perm.shape[0]

    @property
    def S(self) -> np.ndarray:
        """Selected states, in selection order."""
        return self.perm[: self.k]

    @property
    def complement(self) -> np.ndarray:
        return self.perm[self.k:]

    @property
    def A_low(self) -> np.ndarray:
        """``A_{S^c S}``: rows follow :attr:`complement`, columns follow :attr:`S`."""
        return self.W[self.k:, : self.k]

    @property
    def A_up(self) -> np.ndarray:
        """``A_{S S^c}`` (maintained in extended mode only)."""
        return self.W[: self.k, self.k:]

    def w_by_state(self) -> np.ndarray:
        out = np.empty(self.n)
        out[self.perm] = self.w
        return out

    def nu_by_state(self) -> np.ndarray:
        out = np.empty(self.n)
        out[self.perm] = self.nu
        return out

    def position(self, state: int) -> int:
        return int(np.flatnonzero(self.perm == state)[0])

    def snapshot(self) -> "ReducedTableau":
        return ReducedTableau(self.perm.copy(), self.W.copy(), self.P.copy(),
                              self.w.copy(), self.nu.copy(), self.beta,
                              self.extended, self.k, self.alpha,
                              OpCounter(self.flops.muldiv, self.flops.addsub))

    def _swap(self, a: int, b: int) -> None:
        if a == b:
            return
        for v in (self.perm, self.w, self.nu):
            v[[a, b]] = v[[b, a]]
        for M in (self.W, self.P):
            M[[a, b]] = M[[b, a]]
            M[:, [a, b]] = M[:, [b, a]]


def fp_pivot_step(tab: ReducedTableau, state: int) -> ReducedTableau:
    """Move ``state`` into the continuation set and update ``tab`` in place.

    Returns ``tab`` for convenience. ``tab.nu`` at the chosen state, before the
    call, is taken as the state's index value.

    Raises
    ------
    DegeneratePivot
        If the denominator of the pivot scalar is below ``1e-12`` in magnitude.
    """
    n, beta, eo = tab.n, tab.beta, tab.extended
    t = tab.k
    pos = tab.position(state)
    if pos < t:
        raise ValueError(f"state {state} is already in the continuation set")
    tab._swap(pos, t)
    k = t + 1
    tab.k = k
    W, P, w, nu, cnt = tab.W, tab.P, tab.w, tab.nu, tab.flops
    m = n - k          # |S_k^c|
    s = t              # |S_{k-1}|
    nu_star = nu[t]
    w_prev = w.copy()
    nu_prev = nu.copy()

    if k == 1 and (m > 0 or eo):
        denom = 1.0 - beta * P[0, 0]
        cnt.add(muldiv=1, addsub=1)
        if abs(denom) < PIVOT_ATOL:
            raise DegeneratePivot(k, denom)
        alpha = -beta / denom
        cnt.add(muldiv=1)
        W[1:, 0] = alpha * P[1:, 0]
        cnt.add(muldiv=m)
        if eo:
            W[0, 1:] = -alpha * P[0, 1:]
            cnt.add(muldiv=m)
        tab.alpha = alpha
    elif k > 1 and (m > 0 or eo):
        row_i = W[t, :t]                     # A_{i_k S_{k-1}}^{(k-1)}
        p_col = P[:t, t]                     # P_{S_{k-1} i_k}
        denom = 1.0 - beta * (P[t, t] - row_i @ p_col)
        cnt.add(muldiv=s + 1, addsub=(s - 1) + 2)
        if abs(denom) < PIVOT_ATOL:
            raise DegeneratePivot(k, denom)
        alpha = -beta / denom
        cnt.add(muldiv=1)
        tab.alpha = alpha
        if eo:
            # uses A_{S_{k-1} S_k^c}^{(k-1)}, so before it is overwritten
            new_row = -alpha * (P[t, t + 1:] + P[t, :t] @ W[:t, t + 1:])
            cnt.add(muldiv=m * s + m, addsub=m * (s - 1) + m)
        col = alpha * (P[t + 1:, t] - W[t + 1:, :t] @ p_col)
        cnt.add(muldiv=m * s + m, addsub=m * (s - 1) + m)
        W[t + 1:, :t] -= np.outer(col, row_i)
        cnt.add(muldiv=m * s, addsub=m * s)
        W[t + 1:, t] = col
        if eo:
            W[:t, t + 1:] += np.outer(W[:t, t], new_row)
            cnt.add(muldiv=m * s, addsub=m * s)
            W[t, t + 1:] = new_row

    if m > 0:
        col = W[t + 1:, t]
        w[t + 1:] = w_prev[t + 1:] - w_prev[t] * col
        cnt.add(muldiv=m, addsub=m)
        nu[t + 1:] = nu_star - (w_prev[t + 1:] / w[t + 1:]) * (nu_star - nu_prev[t + 1:])
        cnt.add(muldiv=2 * m, addsub=2 * m)

    if eo:
        w_i = -(tab.alpha * (1.0 - beta) / beta) * w_prev[t]
        cnt.add(muldiv=3, addsub=1)
        if s:
            w[:t] = w_prev[:t] + w_i * W[:t, t]
            cnt.add(muldiv=s, addsub=s)
            nu[:t] = nu_star - (w_prev[:t] / w[:t]) * (nu_star - nu_prev[:t])
            cnt.add(muldiv=2 * s, addsub=2 * s)
        w[t] = w_i
        nu[t] = nu_star
    return tab


def fp_compute(instance: BanditInstance, extended: bool = False, order=None,
               trace: list | None = None) -> IndexResult:
    """Compute all Gittins indices by fast pivoting.

    Parameters
    ----------
    instance : BanditInstance
        Valid instance; ``beta = 1`` computes the undiscounted index
        (plain mode only).
    extended : bool
        FP(1): also maintain ``w`` and ``nu`` for selected states and return
        them per step in ``result.extended``.
    order : sequence of int, optional
        Force this selection order instead of the argmax rule.
    trace : list, optional
        If given, a snapshot of the tableau is appended after every step.
    """
    if extended and instance.beta >= 1.0:
        raise BadDiscount("extended output is undefined for beta = 1")
    n = instance.n
    tab = ReducedTableau.initial(instance, extended)
    index = np.empty(n)
    chosen = np.empty(n, dtype=int)
    if extended:
        w_hist = np.empty((n, n))
        nu_hist = np.empty((n, n))
    for k in range(n):
        if order is None:
            pos = k + pick_state(tab.nu[k:], tab.perm[k:])
            state = int(tab.perm[pos])
        else:
            state = int(order[k])
        index[state] = tab.nu[tab.position(state)]
        chosen[k] = state
        fp_pivot_step(tab, state)
        if extended:
            w_hist[k] = tab.w_by_state()
            nu_hist[k] = tab.nu_by_state()
        if trace is not None:
            trace.append(tab.snapshot())
    ext = None
    if extended:
        A = np.full((n, n), np.nan)
        off = ~np.eye(n, dtype=bool)
        A[np.ix_(tab.perm, tab.perm)] = np.where(off, tab.W, np.nan)
        ext = ExtendedRecord(order=chosen.copy(), index=index.copy(), w=w_hist, nu=nu_hist, A=A)
    return IndexResult(order=chosen, index=index, flops=tab.flops,
                       algorithm="fp1" if extended else "fp0", extended=ext)
