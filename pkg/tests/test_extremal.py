import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snakeineq.chebcore import ChebPoly, derivative, evaluate, multiply
from snakeineq.extremal import (
    OracleError,
    ParityError,
    Verdict,
    brute_force_ds,
    ds_constant,
    ds_pointwise,
    ds_sign_pattern,
    ds_system,
    lagrange_basis,
    markov_attainment,
    md_construction,
    md_growth_fit,
    md_lower_bound,
    md_markov_value,
    mu_m_snake,
    positivity_profile,
    theorem_main_report,
    verify_theorem_main,
)
from snakeineq.scans import tau_dx_max_of
from snakeineq.snake import Majorant, catalog_majorant, catalog_majorant_only, snake_construct

X2M1 = ChebPoly(np.array([-0.5, 0.0, 0.5]))


def cheb_extrema(n):
    return np.cos(np.pi * np.arange(n + 1) / n)


def tn_k_at_1(n, k):
    return math.prod((n * n - j * j) / (2 * j + 1) for j in range(k))


# --- positivity --------------------------------------------------------------

def test_positivity_chebyshev():
    assert positivity_profile(ChebPoly.basis(9)).k0 == 0


def test_positivity_sqrt1mx2_snake():
    omega = (ChebPoly.basis(9) - ChebPoly.basis(7)) / 2
    prof = positivity_profile(omega)
    assert prof.k0 == 1 and len(prof.margins) == 2 and prof.margins[0] < 0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_positivity_mu_m_snake(m):
    _, s = catalog_majorant("mu_m", {"m": m}, 12)
    assert positivity_profile(s.omega).k0 == m


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_positivity_mu_m_never_zero(m):
    # the snake vanishes at +-1, so omega itself never has a positive expansion
    _, s = catalog_majorant("mu_m", {"m": m}, 14)
    assert 1 <= positivity_profile(s.omega).k0 <= m


# --- pointwise oracle ---------------------------------------------------------

def test_ds_pointwise_hand_example():
    assert ds_pointwise([1, 0, -1], [1, 1, 1], 1, 1.0) == pytest.approx(4.0)


def test_ds_pointwise_at_node_k0():
    nodes = cheb_extrema(5)
    mu = np.linspace(0.5, 2.0, 6)
    for j in range(6):
        assert ds_pointwise(nodes, mu, 0, nodes[j]) == pytest.approx(mu[j])


def test_ds_pointwise_matches_brute_force():
    nodes = cheb_extrema(5)
    assert ds_pointwise(nodes, np.ones(6), 2, 0.3) == pytest.approx(
        brute_force_ds(nodes, np.ones(6), 2, 0.3), rel=1e-12)


def test_ds_pointwise_coincident_nodes():
    with pytest.raises(OracleError, match="boundary-degenerate majorant: pointwise oracle unavailable"):
        ds_pointwise([1.0, 1.0, 0.0, -1.0], np.ones(4), 1, 0.0)


def test_lagrange_basis_is_cardinal():
    nodes = cheb_extrema(7)
    L = lagrange_basis(nodes)
    vals = np.array([evaluate(l, nodes) for l in L])
    assert np.allclose(vals, np.eye(8), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(1, 3), st.floats(-1, 1), st.floats(0.01, 100))
def test_ds_pointwise_scale_invariance(n, k, x, lam):
    k = min(k, n)
    nodes = cheb_extrema(n)
    mu = 1.0 + 0.5 * np.cos(np.arange(n + 1))
    base = ds_pointwise(nodes, mu, k, x)
    assert ds_pointwise(nodes, lam * mu, k, x) == pytest.approx(lam * base, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(1, 3), st.floats(-1, 1))
def test_sign_pattern_optimality(n, k, x):
    k = min(k, n)
    nodes = cheb_extrema(n)
    mu = np.ones(n + 1)
    L = lagrange_basis(nodes)
    vals = np.array([evaluate(derivative(l, k), x) for l in L])
    scale = np.max(np.abs(vals))
    if np.min(np.abs(vals)) < 1e-12 * scale * 1e3:
        return  # tie: any sign is optimal
    _, pattern = brute_force_ds(nodes, mu, k, x, return_pattern=True)
    assert np.array_equal(pattern, ds_sign_pattern(nodes, k, x, scale))


# --- D* constants --------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 5, 8, 13, 20])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_ds_constant_classical(n, k):
    if k > n:
        return
    mu, s = catalog_majorant("unit", {}, n)
    v, x = ds_constant(s, mu, k)
    assert v == pytest.approx(tn_k_at_1(n, k), rel=1e-8)
    assert x == 1.0


def test_ds_constant_n6():
    mu, s = catalog_majorant("unit", {}, 6)
    assert ds_constant(s, mu, 1)[0] == pytest.approx(36.0, rel=1e-12)


def test_ds_constant_case8():
    mu, s = catalog_majorant("case8", {"a": 1}, 8)
    v, _ = ds_constant(s, mu, 1)
    assert v == pytest.approx(evaluate(derivative(s.omega), 1.0), rel=1e-8)


def test_brute_force_examples():
    assert brute_force_ds([1, 0, -1], [1, 1, 1], 1, 1.0) == pytest.approx(4.0)
    assert brute_force_ds(cheb_extrema(4), np.ones(5), 1, "norm") == pytest.approx(16.0)
    assert brute_force_ds(cheb_extrema(3), np.zeros(4), 1, "norm") == 0.0


def test_brute_force_too_large():
    with pytest.raises(ValueError, match="instance too large for enumeration"):
        brute_force_ds(cheb_extrema(13), np.ones(14), 1, 0.0)


@pytest.mark.parametrize("case_id,params", [("unit", {}), ("case1", {"a": 1, "b": 1}), ("case8", {"a": 1})])
@pytest.mark.parametrize("n", [4, 6, 8])
def test_oracle_equivalence(case_id, params, n):
    mu, s = catalog_majorant(case_id, params, n)
    sysd = ds_system(s)
    for k in (1, 2, 3):
        v, _ = ds_constant(s, mu, k)
        b = brute_force_ds(sysd.nodes, sysd.bounds, k, "norm", weight=sysd.weight)
        assert abs(v - b) <= 1e-9 * max(v, 1.0)


@pytest.mark.parametrize("case_id,params,n", [
    ("unit", {}, 9), ("case1", {}, 10), ("case3", {}, 9), ("case8", {}, 12),
    ("sqrt1mx2", {}, 9), ("case5", {}, 11), ("case2", {"l": 1, "m": 1}, 9),
])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_feasibility_chain(case_id, params, n, k):
    mu, s = catalog_majorant(case_id, params, n)
    at1 = evaluate(derivative(s.omega, k), 1.0)
    norm = markov_attainment(s, k).norm
    d, _ = ds_constant(s, mu, k)
    scale = max(norm, 1.0)
    assert at1 <= norm + 1e-8 * scale
    assert norm <= d + 1e-7 * scale


@pytest.mark.parametrize("case_id,params,n,k", [
    ("case8", {}, 8, 1), ("case8", {}, 10, 2), ("case1", {}, 9, 2), ("case3", {}, 9, 2),
    ("unit", {}, 7, 2), ("case4", {}, 8, 1),
])
def test_ds_below_tau_bound(case_id, params, n, k):
    mu, s = catalog_majorant(case_id, params, n)
    hat = derivative(s.omega, k - 1)
    assert positivity_profile(s.omega).k0 <= k - 1
    d, _ = ds_constant(s, mu, k)
    bound = max(evaluate(derivative(s.omega, k), 1.0), tau_dx_max_of(hat))
    assert d <= bound * (1 + 1e-7)


# --- Markov -----------------------------------------------------------------------

def test_markov_t4_second_derivative():
    r = markov_attainment(ChebPoly.basis(4), 2)
    assert r.norm == pytest.approx(80.0) and r.argmax == 1.0 and r.attained_at_1


@pytest.mark.parametrize("s_,n", [(1, 6), (1, 9), (2, 7)])
def test_markov_weighted_chebyshev(s_, n):
    f = ChebPoly.basis(n)
    for _ in range(s_):
        f = multiply(f, X2M1)
    for k in range(2 * s_, 2 * s_ + 3):
        assert markov_attainment(f, k).attained_at_1


@pytest.mark.parametrize("n", [5, 10, 17])
def test_markov_sqrt1mx2(n):
    mu = catalog_majorant_only("sqrt1mx2")
    s = snake_construct(mu, n - 1)
    assert markov_attainment(s, 1).value_at_1 == pytest.approx(2 * n, rel=1e-12)


# --- extremal verdicts ------------------------------------------------------------

def test_theorem_main_unit():
    r = verify_theorem_main("unit", {}, 7, 2)
    assert r.verdict is Verdict.CONFIRMS
    # T_7''(1) = n^2 (n^2 - 1) / 3
    assert r.omega_k_at_1 == pytest.approx(784.0)
    assert r.ds_constant == pytest.approx(784.0, rel=1e-10)


def test_theorem_main_case1():
    assert verify_theorem_main("case1", {"a": 1, "b": 1}, 8, 2).verdict is Verdict.CONFIRMS


def test_theorem_main_mu2_positivity_fails():
    r = verify_theorem_main("mu_m", {"m": 2}, 8, 1)
    assert r.verdict is Verdict.POSITIVITY_FAILS and r.positivity_k0 == 2


def test_report_serialization():
    r = verify_theorem_main("unit", {}, 5, 1)
    text = r.to_text()
    assert "verdict=ConfirmsTheoremMain" in text and "n=5" in text
    assert len(r.csv_row()) == len(r.CSV_FIELDS)


def test_report_chain_invariant():
    r = verify_theorem_main("case3", {}, 10, 2)
    scale = max(r.markov_norm, 1.0)
    assert r.ds_constant >= r.markov_norm - 1e-8 * scale >= r.omega_k_at_1 - 2e-8 * scale


def test_theorem_main_report_on_product_snake():
    mu = Majorant(ChebPoly.constant(1.0))
    r = theorem_main_report(snake_construct(mu, 6), 1)
    assert r.verdict is Verdict.CONFIRMS and r.ds_constant == pytest.approx(36.0)


# --- growth separation ---------------------------------------------------------------

def test_parity_errors():
    with pytest.raises(ParityError, match="parity condition violated"):
        md_lower_bound(2, 1, 21)
    with pytest.raises(ParityError, match="parity condition violated"):
        md_lower_bound(1, 1, 20)


@pytest.mark.parametrize("m,n", [(1, 9), (2, 10), (3, 11), (4, 8)])
def test_mu_m_snake_matches_catalog(m, n):
    s = (m + 1) // 2
    degree = n + 2 * s - (m % 2)
    _, snake = catalog_majorant("mu_m", {"m": m}, degree)
    assert snake.omega.allclose(mu_m_snake(m, n), rtol=1e-9)


@pytest.mark.parametrize("n", [10, 22, 42])
def test_q1_node_constraints(n):
    con = md_construction(2, 1, n)
    assert np.allclose(con.values[con.active], 1.0, atol=1e-9)
    assert con.values[0] <= 1e-12 and con.values[-1] <= 1e-12  # q1(+-1) = 0
    assert con.values[n // 2] <= 1e-12  # q1(0) = 0 for even n
    assert con.max_violation <= 1e-9


def test_q1_endpoint_identity():
    # |q1(t_i)| = |P'(t_i)| / n^2 with P' = n^2 T_n + x T_n'
    n = 12
    con = md_construction(2, 1, n)
    Tn = ChebPoly.basis(n)
    t = con.nodes[con.active]
    dP = n * n * evaluate(Tn, t) + t * evaluate(derivative(Tn), t)
    assert np.allclose(con.values[con.active], np.abs(dP) / n**2, atol=1e-10)


@pytest.mark.parametrize("n", [9, 21, 41])
def test_q2_node_constraints(n):
    con = md_construction(1, 1, n)
    assert np.allclose(con.values[con.active], con.bounds[con.active], rtol=1e-9)
    assert con.max_violation <= 1e-9 * np.max(con.bounds)


def test_md_lower_bound_exceeds_markov_side():
    for n in (22, 42, 82):
        assert md_lower_bound(2, 1, n) > md_markov_value(2, 1, n)
    for n in (21, 41, 81):
        assert md_lower_bound(1, 1, n) > md_markov_value(1, 1, n)


def test_lower_bound_is_dominated_by_ds_constant():
    # the construction is admissible, so it cannot beat the computed D*
    n = 10
    mu, s = catalog_majorant("mu_m", {"m": 2}, n + 2)
    d, _ = ds_constant(s, mu, 1)
    assert md_lower_bound(2, 1, n) <= d * (1 + 1e-9)


def test_growth_markov_side_m2_k2():
    fit = md_growth_fit(2, 2, [21, 41, 81, 161, 321])
    assert fit.markov_exponent == pytest.approx(2.0, abs=0.1)


def test_growth_markov_side_k_equals_m():
    fit = md_growth_fit(1, 1, [21, 41, 81, 161, 321])
    assert fit.markov_exponent == pytest.approx(1.0, abs=0.1)


def test_growth_ds_side_log_factor():
    fit = md_growth_fit(2, 1, [502, 1002, 2002, 4002])
    assert fit.log_factor
    assert fit.lower_exponent == pytest.approx(1.0, abs=0.15)


def test_growth_fit_validation():
    with pytest.raises(ValueError):
        md_growth_fit(2, 1, [22, 42, 82])
    with pytest.raises(ParityError):
        md_growth_fit(2, 1, [21, 41, 81, 161])
