import numpy as np
import pytest

from fastpivot import (
    BadDiscount,
    BanditInstance,
    DegeneratePivot,
    ReducedTableau,
    cp_compute,
    fp_compute,
    fp_pivot_step,
    random_instance,
)
from fastpivot.oracle import gittins_bruteforce_all, marginal_measures_direct


def test_single_state(single_state):
    res = fp_compute(single_state)
    assert list(res.order) == [0]
    assert res.index[0] == 7.0


def test_two_state_indices(two_state):
    res = fp_compute(two_state)
    assert list(res.order) == [0, 1]
    assert res.index == pytest.approx([1.0, 0.25], abs=1e-15)


def test_two_state_first_pivot(two_state):
    tab = ReducedTableau.initial(two_state)
    assert np.array_equal(tab.w, [1, 1]) and np.array_equal(tab.nu, [1, 0])
    fp_pivot_step(tab, 0)
    assert tab.alpha == pytest.approx(-2 / 3, abs=1e-15)
    # CP tableau: A0_21 / a0_11 = -0.5 / 1.5
    assert tab.A_low[0, 0] == pytest.approx(-1 / 3, abs=1e-15)
    # 1 + beta p21 g1 with g1 = 4/3
    assert tab.w_by_state()[1] == pytest.approx(4 / 3, abs=1e-15)
    assert tab.nu_by_state()[1] == pytest.approx(0.25, abs=1e-15)


def test_decoupled_states_leave_each_other_alone():
    inst = BanditInstance(np.eye(2), [1.0, 0.0], 0.5)
    tab = fp_pivot_step(ReducedTableau.initial(inst), 0)
    assert tab.alpha == -1.0
    assert tab.A_low[0, 0] == 0.0
    assert tab.w_by_state()[1] == 1.0
    assert tab.nu_by_state()[1] == 0.0


def test_pivot_rejects_selected_state(two_state):
    tab = fp_pivot_step(ReducedTableau.initial(two_state), 0)
    with pytest.raises(ValueError):
        fp_pivot_step(tab, 0)


def test_first_pick_is_max_reward():
    inst = random_instance(15, beta=1.0, seed=4)
    res = fp_compute(inst)
    assert res.order[0] == int(np.argmax(inst.R))
    assert res.index[res.order[0]] == inst.R.max()


def test_ties_go_to_smallest_state():
    inst = BanditInstance(np.full((4, 4), 0.25), [0.5, 1.0, 1.0, 1.0], 0.9)
    assert fp_compute(inst).order[0] == 1


@pytest.mark.parametrize("seed", range(30))
@pytest.mark.parametrize("beta", [0.3, 0.9, 0.999])
def test_matches_bruteforce(seed, beta):
    inst = random_instance(7, 0.5, (-1, 1), beta, seed)
    ref = gittins_bruteforce_all(inst)
    for extended in (False, True):
        res = fp_compute(inst, extended=extended)
        assert np.allclose(res.index, ref, rtol=1e-8, atol=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_indices_nonincreasing_along_order(seed):
    res = fp_compute(random_instance(25, 0.3, (0, 1), 0.8, seed))
    assert np.all(np.diff(res.index[res.order]) <= 1e-12)


@pytest.mark.parametrize("seed", range(15))
def test_rate_update_matches_direct_measures(seed):
    inst = random_instance(8, 0.6, (-1, 1), 0.85, seed)
    trace = []
    fp_compute(inst, trace=trace)
    for tab in trace:
        rest = tab.complement
        if rest.size == 0:
            continue
        mm = marginal_measures_direct(inst, tab.S)
        assert np.abs(tab.w_by_state()[rest] - mm.w[rest]).max() <= 1e-9
        assert np.abs(tab.nu_by_state()[rest] - mm.nuRate[rest]).max() <= 1e-9
        assert np.all(tab.w_by_state()[rest] >= 1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_extended_output_covers_all_states(seed):
    inst = random_instance(8, 0.6, (-1, 1), 0.7, seed)
    res = fp_compute(inst, extended=True)
    ext = res.extended
    for k in range(inst.n):
        mm = marginal_measures_direct(inst, res.order[: k + 1])
        assert np.abs(ext.w[k] - mm.w).max() <= 1e-9
        assert np.abs(ext.nu[k] - mm.nuRate).max() <= 1e-9
        assert ext.nu[k, res.order[k]] == res.index[res.order[k]]


@pytest.mark.parametrize("seed", range(10))
def test_tableau_blocks_equal_cp_tableau(seed):
    inst = random_instance(9, 0.5, (0, 1), 0.9, seed)
    fp_trace, cp_trace = [], []
    res = fp_compute(inst, extended=True, trace=fp_trace)
    cp_compute(inst, order=res.order, trace=cp_trace)
    for tab, cp in zip(fp_trace[:-1], cp_trace[:-1]):
        S, rest = tab.S, tab.complement
        assert np.allclose(tab.A_low, cp.A[np.ix_(rest, S)], atol=1e-10)
        assert np.allclose(tab.A_up, cp.A[np.ix_(S, rest)], atol=1e-10)


def test_forced_order_is_followed(two_state):
    res = fp_compute(two_state, order=[1, 0])
    assert list(res.order) == [1, 0]
    assert res.index[1] == 0.0


def test_extended_rejects_undiscounted():
    with pytest.raises(BadDiscount):
        fp_compute(random_instance(3, beta=1.0, seed=0), extended=True)


def test_undiscounted_recurrent_subchain_is_degenerate():
    P = [[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]]
    inst = BanditInstance(P, [1.0, 0.9, 0.0], 1.0)
    with pytest.raises(DegeneratePivot) as err:
        fp_compute(inst)
    assert err.value.k == 2
    assert abs(err.value.value) < 1e-12


def test_undiscounted_identity_degenerate_at_first_step():
    with pytest.raises(DegeneratePivot) as err:
        fp_compute(BanditInstance(np.eye(2), [1.0, 0.0], 1.0))
    assert err.value.k == 1


def test_undiscounted_single_state_needs_no_pivot():
    assert fp_compute(BanditInstance([[1.0]], [3.0], 1.0)).index[0] == 3.0


@pytest.mark.parametrize("seed", range(5))
def test_undiscounted_is_limit_of_discounted(seed):
    inst = random_instance(20, beta=1.0, seed=seed)
    undisc = fp_compute(inst).index
    near = fp_compute(inst.with_beta(1 - 1e-6)).index
    assert np.abs(undisc - near).max() <= 1e-3


def test_flop_counts_fp0():
    n = 200
    res = fp_compute(random_instance(n, beta=0.9, seed=11))
    assert 0.30 <= res.flops.muldiv / n**3 <= 0.37
    assert 0.30 <= res.flops.addsub / n**3 <= 0.37


def test_flop_counts_fp1():
    n = 200
    res = fp_compute(random_instance(n, beta=0.9, seed=11), extended=True)
    assert 1.25 <= res.flops.total / n**3 <= 1.45


def test_flop_counts_are_deterministic():
    inst = random_instance(30, beta=0.9, seed=2)
    a, b = fp_compute(inst).flops, fp_compute(inst).flops
    assert (a.muldiv, a.addsub) == (b.muldiv, b.addsub)
