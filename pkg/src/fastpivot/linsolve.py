"""Dense Gaussian elimination and evaluation of stationary continuation policies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrix
from .model import BanditInstance, OpCounter

PIVOT_RTOL = 1e-12


@dataclass
class PolicyMeasures:
    """Work measure ``g`` and reward measure ``f`` of the policy continuing on ``S``.

    Both vectors are zero outside ``S``.
    """

    g: np.ndarray
    f: np.ndarray
    S: np.ndarray


def solve_dense(A, B, counter: OpCounter | None = None) -> np.ndarray:
    """Solve ``A X = B`` by Gaussian elimination with partial (row) pivoting.

    Parameters
    ----------
    A : array_like, shape (m, m)
    B : array_like, shape (m,) or (m, k)
    counter : OpCounter, optional
        Receives the arithmetic performed by elimination and back substitution.

    Raises
    ------
    SingularMatrix
        When a pivot falls below ``1e-12`` times the largest magnitude
        initially present in its column.
    """
    a = np.array(A, dtype=np.float64)
    b = np.array(B, dtype=np.float64)
    m = a.shape[0]
    if a.shape != (m, m):
        raise ValueError(f"A must be square, got shape {a.shape}")
    vector_rhs = b.ndim == 1
    b = b.reshape(m, -1)
    if b.shape[0] != m:
        raise ValueError("B is not conformable with A")
    k = b.shape[1]
    scale = np.abs(a).max(axis=0) if m else np.zeros(0)

    muldiv = addsub = 0
    for c in range(m):
        p = c + int(np.abs(a[c:, c]).argmax())
        piv = a[p, c]
        if scale[c] == 0.0 or abs(piv) < PIVOT_RTOL * scale[c]:
            raise SingularMatrix(f"pivot {piv!r} in column {c} below threshold")
        if p != c:
            a[[c, p]] = a[[p, c]]
            b[[c, p]] = b[[p, c]]
        below = m - c - 1
        if below:
            f = a[c + 1:, c:c + 1] / piv
            a[c + 1:, c + 1:] -= f * a[c, c + 1:]
            b[c + 1:] -= f * b[c]
            muldiv += below + below * below + below * k
            addsub += below * below + below * k

    for c in range(m - 1, -1, -1):
        tail = m - c - 1
        b[c] = (b[c] - a[c, c + 1:] @ b[c + 1:]) / a[c, c]
        muldiv += tail * k + k
        addsub += tail * k
    if counter is not None:
        counter.add(muldiv=muldiv, addsub=addsub)

    return b[:, 0] if vector_rhs else b


def _as_index(S, n: int) -> np.ndarray:
    S = np.asarray(S)
    if S.dtype == bool:
        return np.flatnonzero(S)
    return np.unique(S.astype(int)) if S.size else np.zeros(0, dtype=int)


def evaluate_policy(instance: BanditInstance, S, rewards=None,
                    counter: OpCounter | None = None) -> PolicyMeasures:
    """Work and reward measures of the policy that continues exactly on ``S``.

    Solves ``(I - beta P_SS) y = 1`` and ``(I - beta P_SS) z = R_S`` on the
    ``|S| x |S|`` block only. ``rewards`` overrides ``instance.R``. ``S`` is a
    collection of 0-based states or a boolean mask.
    """
    n = instance.n
    idx = _as_index(S, n)
    R = instance.R if rewards is None else np.asarray(rewards, dtype=np.float64)
    g = np.zeros(n)
    f = np.zeros(n)
    if idx.size:
        M = np.eye(idx.size) - instance.beta * instance.P[np.ix_(idx, idx)]
        sol = solve_dense(M, np.column_stack([np.ones(idx.size), R[idx]]), counter)
        g[idx] = sol[:, 0]
        f[idx] = sol[:, 1]
    return PolicyMeasures(g=g, f=f, S=idx)
