"""Optimal stopping of a Markov chain with terminal rewards.

Terminal rewards are folded into the continuation rewards,
``Rhat = R - (I - beta P) Q``, after which it is optimal to stop at ``i``
exactly when the Gittins index of ``i`` under ``Rhat`` is at most the charge
``nu``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fp import fp_compute
from .linsolve import _as_index, evaluate_policy, solve_dense
from .model import BanditInstance, StoppingInstance

TIE_ATOL = 1e-12


@dataclass
class StoppingSolution:
    rhat: np.ndarray
    indexHat: np.ndarray
    stopSet: np.ndarray      # boolean mask over states
    value: np.ndarray | None  # None when beta = 1

    @property
    def continueSet(self) -> np.ndarray:
        return ~self.stopSet


def reduce_terminal_rewards(instance: StoppingInstance) -> np.ndarray:
    Q = instance.Q
    return instance.R - (Q - instance.beta * (instance.P @ Q))


def solve_optimal_stopping(instance: StoppingInstance) -> StoppingSolution:
    """Stop set from the index rule and, for ``beta < 1``, the optimal values.

    Ties ``indexHat_i == nu`` (within ``1e-12``) count as stop.
    """
    rhat = reduce_terminal_rewards(instance)
    res = fp_compute(BanditInstance(instance.P, rhat, instance.beta))
    stop = res.index <= instance.nu + TIE_ATOL
    value = None
    if instance.beta < 1.0:
        pm = evaluate_policy(instance.base, ~stop, rewards=rhat - instance.nu)
        value = instance.Q + pm.f
    return StoppingSolution(rhat=rhat, indexHat=res.index, stopSet=stop, value=value)


def value_iteration(instance: StoppingInstance, tol: float = 1e-10,
                    max_iter: int = 1_000_000) -> np.ndarray:
    """Successive approximation of ``V = max(Q, R - nu + beta P V)`` from ``V = Q``.

    Stops once ``beta * ||V_m - V_{m-1}|| / (1 - beta) <= tol``, which bounds
    the sup-norm distance to the fixed point by ``tol``.
    """
    beta = instance.beta
    if not beta < 1.0:
        raise ValueError("value iteration needs beta < 1")
    Q, P = instance.Q, instance.P
    cont = instance.R - instance.nu
    V = np.array(Q)
    for _ in range(max_iter):
        V_new = np.maximum(Q, cont + beta * (P @ V))
        gap = np.abs(V_new - V).max()
        V = V_new
        if beta * gap / (1.0 - beta) <= tol:
            return V
    raise RuntimeError("value iteration did not converge")


def continuation_values(instance: StoppingInstance, V: np.ndarray) -> np.ndarray:
    """One-step lookahead value of continuing: ``R - nu + beta P V``."""
    return instance.R - instance.nu + instance.beta * (instance.P @ V)


def evaluate_stopping_rule(instance: StoppingInstance, continue_set) -> np.ndarray:
    """Value of the stationary rule continuing exactly on ``continue_set``."""
    n, beta, P = instance.n, instance.beta, instance.P
    C = _as_index(continue_set, n)
    inC = np.zeros(n, dtype=bool)
    inC[C] = True
    D = np.flatnonzero(~inC)
    v = np.array(instance.Q)
    if C.size:
        M = np.eye(C.size) - beta * P[np.ix_(C, C)]
        rhs = instance.R[C] - instance.nu + beta * P[np.ix_(C, D)] @ instance.Q[D]
        v[C] = solve_dense(M, rhs)
    return v
