"""Norm-bound certificates: conditions, implications, and mu traces."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpcert import (BoundParams, build_weights, cartlidge_constant,
                    cartlidge_profile, cesaro, check_cartlidge,
                    check_factorable_product, check_factorable_stepwise,
                    check_product_condition, check_ratio_condition,
                    check_stepwise_p2, comparability_pair, mu_dual, mu_primal,
                    power_lower_bound, ratio_at, trace_report, weighted_mean)

weight_arrays = st.lists(
    st.floats(min_value=1e-2, max_value=1e2, allow_nan=False,
              allow_infinity=False),
    min_size=3, max_size=40,
).map(np.array)


def test_cartlidge_constant_closed_forms():
    assert cartlidge_constant(build_weights("constant", 50)) == 1.0
    # lam_n = n: Lam_n/lam_n = (n+1)/2, increments exactly 1/2
    assert cartlidge_constant(
        build_weights("power", 50, exponent=1.0)) == pytest.approx(0.5, abs=1e-12)
    # lam_n = 2^n: ratios (2 - 2^{1-n}), first increment 1/2 is the largest
    assert cartlidge_constant(
        build_weights("geometric", 20, ratio=2.0)) == pytest.approx(0.5, abs=1e-13)


def test_cartlidge_profile_flags_tail_growth():
    L, argmax, tail_up = cartlidge_profile(build_weights("constant", 100))
    assert L == 1.0 and argmax == 1
    assert not tail_up


def test_check_cartlidge_constant_weights_pass_and_bound():
    rep = check_cartlidge(build_weights("constant", 100), 2.0, 1.0)
    assert rep.passed
    assert rep.bound == pytest.approx(2.0, rel=1e-15)
    rep2 = check_cartlidge(build_weights("constant", 100), 2.0, 0.5)
    assert not rep2.passed


def test_bound_params_derived_quantities():
    params = BoundParams(p=2.0, L=1.0)
    assert params.q == pytest.approx(2.0)
    assert params.bound == pytest.approx(2.0)
    assert params.lam_p == pytest.approx(0.25)
    assert params.U_p == pytest.approx(4.0)


@given(weight_arrays, st.floats(min_value=1.2, max_value=4.0))
@settings(max_examples=80, deadline=None)
def test_ratio_condition_implies_product_condition(vals, p):
    w = build_weights("explicit", len(vals), values=vals)
    L = min(cartlidge_constant(w) * 1.01 + 1e-9, 0.999 * p)
    if not (0.0 < L < p):
        return
    if check_ratio_condition(w, p, L).passed:
        assert check_product_condition(w, p, L).passed


@given(weight_arrays, st.floats(min_value=1.2, max_value=4.0))
@settings(max_examples=80, deadline=None)
def test_cartlidge_implies_ratio_condition(vals, p):
    w = build_weights("explicit", len(vals), values=vals)
    L = min(cartlidge_constant(w) * 1.01 + 1e-9, 0.999 * p)
    if not (0.0 < L < p):
        return
    if check_cartlidge(w, p, L).passed:
        assert check_ratio_condition(w, p, L).passed


@given(weight_arrays)
@settings(max_examples=80, deadline=None)
def test_stepwise_specialization_agrees_at_p2(vals):
    w = build_weights("explicit", len(vals), values=vals)
    L = min(cartlidge_constant(w), 1.9)
    if not (0.0 < L < 2.0):
        return
    general = check_factorable_stepwise(weighted_mean(w), 2.0, L).passed
    special = check_stepwise_p2(w, L).passed
    assert general == special


def test_comparability_pair_separates_the_two_tests():
    a, b = comparability_pair()
    assert check_stepwise_p2(a, 1.0).passed
    assert not check_ratio_condition(a, 2.0, 1.0).passed
    assert not check_stepwise_p2(b, 1.0).passed
    assert check_ratio_condition(b, 2.0, 1.0).passed


def test_product_condition_on_factorable_matches_weight_form():
    w = build_weights("power", 30, exponent=0.5)
    L = cartlidge_constant(w)
    rep_w = check_product_condition(w, 2.0, L)
    rep_f = check_factorable_product(weighted_mean(w), 2.0, L)
    assert rep_w.passed == rep_f.passed


def test_certificate_bounds_hold_against_norm_probe():
    # certified upper bound must dominate the measured lower bound
    for kind, kwargs in [("constant", {}), ("power", {"exponent": 1.0}),
                         ("geometric", {"ratio": 1.1})]:
        w = build_weights(kind, 256, **kwargs)
        L = cartlidge_constant(w)
        p = 2.0
        if L >= p:
            continue
        assert check_cartlidge(w, p, L).passed
        bound = p / (p - L)
        est = power_lower_bound(weighted_mean(w), p)
        assert est.lower_bound <= bound + 1e-9


def test_mu_primal_cesaro_hand_values():
    # p = 2, lam_p = 1/4: mu_1 = 1, mu_2 = 4/(1 + 1)^1 * 1... evaluated
    # by hand: mu_2 = 2^2 * 1 / (1 + 1)^1 ... = 3/4 after subtracting
    trace = mu_primal(cesaro(10), 2.0, 0.25)
    assert trace.mu[0] == pytest.approx(1.0, abs=0.0)
    assert trace.mu[1] == pytest.approx(0.75, rel=1e-14)
    assert trace.mu[2] == pytest.approx(41.0 / 28.0, rel=1e-12)
    assert trace.passed


def test_mu_primal_fails_for_overclaimed_bound():
    # lam_p too large (claiming a bound below the true norm) must die
    trace = mu_primal(cesaro(2000), 2.0, 0.5)
    assert not trace.passed
    assert trace.first_violation is not None


def test_mu_dual_cesaro_hand_values():
    trace = mu_dual(cesaro(10), 2.0, 4.0)
    assert trace.mu[0] == pytest.approx(0.25, abs=0.0)
    assert trace.mu[1] == pytest.approx(7.0 / 12.0, rel=1e-14)
    assert trace.mu[2] == pytest.approx(153.0 / 164.0, rel=1e-13)
    assert trace.passed
    assert trace.constraint.startswith("mu <")


def test_mu_dual_fails_below_norm():
    # U_p = 3 claims bound 3^(1/2)·... below the Cesaro norm: the
    # ceiling must break at some finite index
    trace = mu_dual(cesaro(5000), 2.0, 3.0)
    assert not trace.passed


def test_mu_traces_certify_actual_inequality():
    # when the dual trace passes at U_p = 4, direct ratios at random
    # positive vectors confirm ||Mx||_2 <= 2 ||x||_2
    spec = cesaro(512)
    assert mu_dual(spec, 2.0, 4.0).passed
    rng = np.random.default_rng(5)
    for _ in range(25):
        x = 10.0 ** rng.uniform(-2, 2, size=512)
        assert ratio_at(spec, 2.0, x) <= 2.0 + 1e-10


def test_trace_report_wraps_fields():
    params = BoundParams(p=2.0, L=1.0)
    trace = mu_dual(cesaro(16), 2.0, params.U_p)
    rep = trace_report(trace, "mu-dual", params, 16)
    d = rep.to_dict()
    assert d["method"] == "mu-dual"
    assert d["pass"] is True
    assert d["N"] == 16
    assert d["bound"] == pytest.approx(2.0)


def test_domain_validation():
    w = build_weights("constant", 8)
    with pytest.raises(ValueError):
        check_cartlidge(w, 1.0, 0.5)
    with pytest.raises(ValueError):
        check_cartlidge(w, 2.0, -0.1)
    with pytest.raises(ValueError):
        check_stepwise_p2(w, 2.5)
