import math

import numpy as np
import pytest

from helpers import random_sparse, schur_matrix
from phitaylor import (OpCounter, ParameterError, ScalingOverflowError, select_action,
                       select_costmin, select_sequential)
from phitaylor.params import (DENSE_DEGREES, PhiParams, action_cost, action_p_max, alpha_p,
                              backward_error_ok, costmin_candidates, dense_cost,
                              scaling_divisor, scaling_exponent)
from phitaylor.taylor import ps_cost
from phitaylor.theta import default_theta_table

THETA = default_theta_table()


def test_alpha_p():
    assert alpha_p({2: 3.0, 3: 5.0, 4: 1.0}) == {2: 5.0, 3: 5.0}
    with pytest.raises(ParameterError):
        alpha_p({})


@pytest.mark.parametrize("eta, theta, expected", [
    (0.0, 1.0, 0), (0.5, 1.0, 0), (1.0, 1.0, 0), (1.5, 1.0, 1), (4.0, 1.0, 2),
    (4.000001, 1.0, 3), (1e-300, 1.0, 0),
])
def test_scaling_exponent(eta, theta, expected):
    assert scaling_exponent(eta, theta) == expected


@pytest.mark.parametrize("alpha, theta, expected", [
    (0.0, 1.0, 1), (0.3, 1.0, 1), (3.0, 1.0, 3), (3.5, 1.0, 4),
])
def test_scaling_divisor(alpha, theta, expected):
    assert scaling_divisor(alpha, theta) == expected


def test_costs():
    assert dense_cost(25, 3) == ps_cost(25) + 6
    assert action_cost(9, 3) == 29
    assert action_p_max(55) == 8


def test_small_matrix_selects_lowest_degree():
    a = np.array([[1e-7, 2e-7], [0.0, -1e-7]])
    for select in (select_sequential, select_costmin):
        params = select(a)
        assert (params.m, params.s) == (2, 0)


def test_zero_matrix():
    for select in (select_sequential, select_costmin):
        params = select(np.zeros((4, 4)))
        assert (params.m, params.s) == (2, 0)


@pytest.mark.parametrize("select", [select_sequential, select_costmin])
def test_huge_norm_overflows(select):
    with pytest.raises(ScalingOverflowError):
        select(np.array([[1e30, 0.0], [0.0, 1.0]]))


@pytest.mark.parametrize("select", [select_sequential, select_costmin])
def test_powers_are_rescaled(select, rng):
    a = rng.standard_normal((6, 6)) * 20
    params = select(a)
    assert params.s > 0
    for i, power in enumerate(params.powers, start=1):
        expected = np.linalg.matrix_power(a, i) * 2.0 ** (-i * params.s)
        np.testing.assert_allclose(power, expected, rtol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_sequential_bound_holds(seed):
    rng = np.random.default_rng(seed)
    a = schur_matrix(rng, 12, 10 ** rng.uniform(-3, 2), bool(seed % 2), seed % 3 == 0)
    params = select_sequential(a)
    eta = min(params.evidence["eta"].values())
    assert eta * 2.0 ** -params.s <= THETA[params.m] * (1 + 1e-15)
    assert params.m in DENSE_DEGREES
    assert backward_error_ok(params)


def test_costmin_candidates_brute_force():
    eta = {1: 3.0, 2: 3.0, 3: 2.5, 4: 2.0, 5: 1.9}
    cands = costmin_candidates(eta, THETA)
    schedule = {2: 2, 4: 3, 6: 3, 9: 3, 12: 4, 16: 4, 20: 5, 25: 5}
    for m, (s, cost) in cands.items():
        expect_s = max(math.ceil(math.log2(eta[schedule[m]] / THETA[m])), 0)
        assert s == expect_s
        assert cost == math.ceil(math.sqrt(m)) + math.floor(math.sqrt(m)) - 2 + 2 * s


def test_costmin_uses_estimates(rng):
    c = OpCounter()
    params = select_costmin(rng.standard_normal((30, 30)), counter=c)
    assert c.norm_est_count == 5
    assert set(params.evidence["d"]) == {1, 2, 3, 4, 5, 6}
    assert params.strategy == "costmin"


def test_action_small_norm_uses_one_norm(rng):
    a = random_sparse(rng, 50, 0.05, 5.0)
    c = OpCounter()
    params = select_action(a, counter=c)
    assert params.p == 1 and c.norm_est_count == 0
    assert params.evidence["alpha"] == {1: pytest.approx(5.0)}
    assert params.cost == action_cost(params.m, params.s)
    assert backward_error_ok(params)


def test_action_large_norm_estimates(rng):
    a = random_sparse(rng, 80, 0.05, 500.0)
    c = OpCounter()
    params = select_action(a, counter=c)
    assert params.p >= 2 and c.norm_est_count == 8
    assert params.m >= params.p * (params.p - 1) - 2
    assert backward_error_ok(params)


def test_action_rejects_bad_mmax(rng):
    a = rng.standard_normal((4, 4))
    with pytest.raises(ParameterError):
        select_action(a, m_max=56)
    with pytest.raises(ParameterError):
        select_action(a, m_max=1)


def test_evidence_lists_are_json_friendly():
    params = PhiParams(m=2, s=0, cost=1, strategy="x",
                       evidence={"d": {2: np.float64(1.5), 1: 2.0}, "alpha": {}, "eta": {}})
    assert params.evidence_lists() == {"d": [[1, 2.0], [2, 1.5]], "alpha": [], "eta": []}
