"""Independent ground truths for the quantities the index algorithms compute.

Everything here goes through direct linear solves (LAPACK via numpy, or
:func:`fastpivot.linsolve.evaluate_policy`) or exhaustive enumeration, never
through the pivoting recursions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooLarge, SingularMatrix
from .linsolve import _as_index, evaluate_policy
from .model import BanditInstance, IndexResult

MAX_BRUTEFORCE_N = 20
_BATCH = 4096


def _subset_masks(n: int, start: int, stop: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(bool)


def _batched_ratios(instance: BanditInstance, masks: np.ndarray) -> np.ndarray:
    """``f_i^S / g_i^S`` for every mask row ``S`` and state ``i`` (``-inf`` off ``S``)."""
    n, beta = instance.n, instance.beta
    mf = masks.astype(np.float64)
    M = np.eye(n) - beta * mf[:, :, None] * instance.P[None] * mf[:, None, :]
    rhs = np.stack([mf, mf * instance.R[None]], axis=2)
    sol = np.linalg.solve(M, rhs)
    g, f = sol[..., 0], sol[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = f / g
    return np.where(masks & (g > 1e-12), ratio, -np.inf)


def gittins_bruteforce_all(instance: BanditInstance) -> np.ndarray:
    """Every state's index as the best reward/work ratio over all continuation sets.

    Enumerates all ``2^n`` subsets. For ``beta = 1``, subsets whose
    sub-chain is recurrent are skipped.
    """
    n = instance.n
    if n > MAX_BRUTEFORCE_N:
        raise InstanceTooLarge(f"n = {n} exceeds the enumeration limit {MAX_BRUTEFORCE_N}")
    best = np.full(n, -np.inf)
    total = 1 << n
    for start in range(1, total, _BATCH):
        masks = _subset_masks(n, start, min(start + _BATCH, total))
        if instance.beta < 1.0:
            ratios = _batched_ratios(instance, masks)
        else:
            ratios = np.full(masks.shape, -np.inf)
            for row, mask in enumerate(masks):
                try:
                    pm = evaluate_policy(instance, mask)
                except SingularMatrix:
                    continue
                ok = mask & (pm.g > 1e-12)
                ratios[row, ok] = pm.f[ok] / pm.g[ok]
        best = np.maximum(best, ratios.max(axis=0))
    return best


def gittins_bruteforce(instance: BanditInstance, i: int) -> float:
    """Index of state ``i`` by enumerating the ``2^(n-1)`` continuation sets containing it."""
    n = instance.n
    if n > MAX_BRUTEFORCE_N:
        raise InstanceTooLarge(f"n = {n} exceeds the enumeration limit {MAX_BRUTEFORCE_N}")
    others = [j for j in range(n) if j != i]
    best = -np.inf
    total = 1 << (n - 1)
    for start in range(0, total, _BATCH):
        sub = _subset_masks(n - 1, start, min(start + _BATCH, total))
        masks = np.zeros((sub.shape[0], n), dtype=bool)
        masks[:, others] = sub
        masks[:, i] = True
        if instance.beta < 1.0:
            best = max(best, float(_batched_ratios(instance, masks)[:, i].max()))
        else:
            for mask in masks:
                try:
                    pm = evaluate_policy(instance, mask)
                except SingularMatrix:
                    continue
                if pm.g[i] > 1e-12:
                    best = max(best, pm.f[i] / pm.g[i])
    return best


@dataclass
class OccupancyMeasures:
    """Discounted occupancies from initial state ``i`` under continuation set ``S``.

    ``x1[j]`` counts discounted periods spent continuing in ``j``, ``x0[j]``
    those spent stopped at ``j``.
    """

    x0: np.ndarray
    x1: np.ndarray
    i: int
    S: np.ndarray


def occupancy_matrices(instance: BanditInstance, S) -> tuple[np.ndarray, np.ndarray]:
    """Occupancy measures for every initial state at once: rows of ``(X0, X1)``."""
    n, beta, P = instance.n, instance.beta, instance.P
    if not beta < 1.0:
        raise ValueError("occupancy measures need beta < 1")
    idx = _as_index(S, n)
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    comp = np.flatnonzero(~mask)
    X1 = np.zeros((n, n))
    if idx.size:
        B = np.eye(idx.size) - beta * P[np.ix_(idx, idx)]
        # rows x solve x B = e_i, i.e. B^T x^T = e_i
        try:
            X1[np.ix_(idx, idx)] = np.linalg.solve(B.T, np.eye(idx.size)).T
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix(str(exc)) from None
    X0 = np.zeros((n, n))
    X0[:, comp] = (np.eye(n)[:, comp] + beta * X1[:, idx] @ P[np.ix_(idx, comp)]) / (1.0 - beta)
    return X0, X1


def occupancy_measures(instance: BanditInstance, S, i: int) -> OccupancyMeasures:
    X0, X1 = occupancy_matrices(instance, S)
    return OccupancyMeasures(x0=X0[i], x1=X1[i], i=i, S=_as_index(S, instance.n))


def occupancy_residual(instance: BanditInstance, occ: OccupancyMeasures) -> float:
    """Max residual of ``(1-beta) x0 + x1 (I - beta P) = e_i``."""
    n = instance.n
    lhs = (1.0 - instance.beta) * occ.x0 + occ.x1 @ (np.eye(n) - instance.beta * instance.P)
    return float(np.abs(lhs - np.eye(n)[occ.i]).max())


def measures_from_occupancy(occ: OccupancyMeasures, R, Q=None, beta: float = 0.0):
    """``(f, g)`` as linear functions of occupancies; ``Q`` adds stopped-period pensions."""
    f = float(occ.x1 @ np.asarray(R))
    if Q is not None:
        f += (1.0 - beta) * float(occ.x0 @ np.asarray(Q))
    return f, float(occ.x1.sum())


@dataclass
class MarginalMeasures:
    w: np.ndarray
    r: np.ndarray
    nuRate: np.ndarray


def marginal_measures_direct(instance: BanditInstance, S) -> MarginalMeasures:
    """Marginal work, reward and productivity measures for continuation set ``S``.

    ``w_S = (1-beta) g_S``, ``w_{S^c} = 1 + beta P_{S^c S} g_S`` and the same
    shape for ``r`` with ``R`` in place of 1.
    """
    n, beta, P, R = instance.n, instance.beta, instance.P, instance.R
    pm = evaluate_policy(instance, S)
    mask = np.zeros(n, dtype=bool)
    mask[pm.S] = True
    w = np.empty(n)
    r = np.empty(n)
    w[mask] = (1.0 - beta) * pm.g[mask]
    r[mask] = (1.0 - beta) * pm.f[mask]
    w[~mask] = 1.0 + beta * P[~mask] @ pm.g
    r[~mask] = R[~mask] + beta * P[~mask] @ pm.f
    with np.errstate(divide="ignore", invalid="ignore"):
        nu = r / w
    return MarginalMeasures(w=w, r=r, nuRate=nu)


def decomposition_check(instance: BanditInstance, S, Sprime, i: int, nu: float = 1.0):
    """Residuals of the three decomposition laws for rule ``Sprime`` relative to ``S``.

    Returns ``(res_g, res_f, res_obj)``: absolute differences between each
    measure of the ``Sprime``-active rule from state ``i`` and its expansion
    around the ``S``-active rule through marginal measures and occupancies.
    """
    n = instance.n
    mm = marginal_measures_direct(instance, S)
    base = evaluate_policy(instance, S)
    occ = occupancy_measures(instance, Sprime, i)
    f_tau, g_tau = measures_from_occupancy(occ, instance.R)
    inS = np.zeros(n, dtype=bool)
    inS[_as_index(S, n)] = True

    def expand(head, marg):
        return head - marg[inS] @ occ.x0[inS] + marg[~inS] @ occ.x1[~inS]

    g_exp = expand(base.g[i], mm.w)
    f_exp = expand(base.f[i], mm.r)
    obj_exp = expand(base.f[i] - nu * base.g[i], mm.r - nu * mm.w)
    return (abs(g_tau - g_exp), abs(f_tau - f_exp), abs((f_tau - nu * g_tau) - obj_exp))


def optimality_interval_check(instance: BanditInstance, result: IndexResult,
                              slack: float = 1e-9) -> bool:
    """Check that every continuation set ``S_k`` of ``result`` is optimal for some charge.

    That holds iff ``max_{j not in S} nu_j^S <= min_{j in S} nu_j^S``.
    """
    n = instance.n
    for k in range(1, n):
        S = result.order[:k]
        nu = marginal_measures_direct(instance, S).nuRate
        inS = np.zeros(n, dtype=bool)
        inS[S] = True
        if nu[~inS].max() > nu[inS].min() + slack:
            return False
    return True


def kelly_monotonicity_check(instance: BanditInstance, betas, slack: float = 1e-9,
                             algorithm=None) -> bool:
    """True iff indices are componentwise nondecreasing along increasing ``betas``."""
    if algorithm is None:
        from .fp import fp_compute as algorithm
    betas = sorted(betas)
    prev = None
    for b in betas:
        cur = algorithm(instance.with_beta(b)).index
        if prev is not None and np.any(cur < prev - slack):
            return False
        prev = cur
    return True
