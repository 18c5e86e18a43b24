"""Prefix/tail mean inequalities: root, kernel, branches, mu recurrences."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpcert import (BRANCHES, admissible_alpha, admissible_c, branch_constant,
                    build_weights, check_bge, check_copson_branch,
                    check_kernel_inequality, copson_root, copson_threshold,
                    mu_bge, mu_dual_copson, near_extremal_ratio,
                    near_extremal_schedule)
from lpcert.copson import branch_parts

# roots of (1 + (1-c)/p)^(1-p) = (1-c)/p pinned by an independent
# high-precision solver (mpmath at 50 digits), frozen here
PINNED_ROOTS = {
    1.5: -0.13231649937003914,
    2.0: -0.23606797749978970,
    3.0: -0.39671369563030408,
    4.0: -0.52111027639045646,
}


@pytest.mark.parametrize("p,root", sorted(PINNED_ROOTS.items()))
def test_copson_root_matches_pinned_values(p, root):
    res = copson_root(p)
    assert res.root == pytest.approx(root, abs=2e-14)
    assert abs(res.residual) <= 1e-13


def test_copson_root_p2_closed_form():
    # at p = 2 the defining equation reduces to a quadratic with root
    # 2 - sqrt(5)
    res = copson_root(2.0)
    assert res.root == pytest.approx(2.0 - math.sqrt(5.0), abs=1e-10)
    assert copson_threshold(2.0) == pytest.approx(math.sqrt(5.0), abs=1e-10)


def test_admissible_c_flips_at_threshold():
    assert admissible_c(2.0, 2.236)
    assert not admissible_c(2.0, 2.237)
    assert admissible_c(2.0, 2.0)


def test_kernel_inequality_pass_and_fail():
    ok = check_kernel_inequality(2.0, 2.23)
    assert ok.passed
    assert ok.min_margin == pytest.approx(0.0, abs=1e-12)
    assert ok.argmin == pytest.approx(0.0, abs=1e-6)
    bad = check_kernel_inequality(2.0, 2.30)
    assert not bad.passed
    assert bad.argmin == pytest.approx(1.0, abs=1e-6)
    # by hand at y = 1: LHS = 1 + 1.3/2 = 1.65, RHS = (0.65)^-1
    assert bad.min_margin == pytest.approx(1.0 / 0.65 - 1.65, rel=1e-10)


def test_branch_constants():
    assert branch_constant("copson_prefix", 2.0, 2.0) == pytest.approx(2.0)
    assert branch_constant("copson_tail", 2.0, 0.5) == pytest.approx(4.0)
    assert branch_constant("leindler_prefix", 3.0, 0.0) == pytest.approx(3.0)
    assert branch_constant("leindler_tail", 3.0, 2.5) == pytest.approx(2.0)


def fraction_branch_ratio(lam, x, branch, p_int, c_int):
    """Exact rational evaluation of one branch at integer p, c."""
    lam = [Fraction(v) for v in lam]
    x = [Fraction(v) for v in x]
    n = len(lam)
    partials = []
    total = Fraction(0)
    for v in lam:
        total += v
        partials.append(total)
    tails = []
    total = Fraction(0)
    for v in reversed(lam):
        total += v
        tails.append(total)
    tails.reverse()
    base = partials if branch.startswith("copson") else tails
    inner_prefix = branch in ("copson_prefix", "leindler_prefix")
    sums = []
    if inner_prefix:
        run = Fraction(0)
        for k in range(n):
            run += lam[k] * x[k]
            sums.append(run)
    else:
        run = Fraction(0)
        rsums = []
        for k in reversed(range(n)):
            run += lam[k] * x[k]
            rsums.append(run)
        sums = list(reversed(rsums))
    inner = [s / b for s, b in zip(sums, base)]
    u = [lam[k] * base[k] ** (p_int - c_int) for k in range(n)]
    if branch in ("copson_prefix", "leindler_tail"):
        konst = Fraction(p_int, c_int - 1) ** p_int
    else:
        konst = Fraction(p_int, 1 - c_int) ** p_int
    lhs = sum(uk * av ** p_int for uk, av in zip(u, inner))
    rhs = konst * sum(uk * xv ** p_int for uk, xv in zip(u, x))
    return lhs / rhs


@pytest.mark.parametrize("branch,c", [
    ("copson_prefix", 2), ("copson_tail", 0),
    ("leindler_prefix", 0), ("leindler_tail", 2),
])
def test_branch_ratio_matches_exact_fraction_oracle(branch, c):
    lam = [1, 2, 3, 2, 1]
    x = [5, 1, 4, 2, 3]
    exact = fraction_branch_ratio(lam, x, branch, 2, c)
    assert exact <= 1
    w = build_weights("explicit", 5, values=np.array(lam, dtype=float))
    X = np.array([x], dtype=float)
    inner, u = branch_parts(w, X, branch, 2.0, float(c))
    lhs = float(np.sum(u * inner ** 2, axis=-1)[0])
    rhs = float(branch_constant(branch, 2.0, float(c)) ** 2
                * np.sum(u * X ** 2, axis=-1)[0])
    assert lhs / rhs == pytest.approx(float(exact), rel=1e-12)


@pytest.mark.parametrize("branch", BRANCHES)
def test_branch_trials_never_violate(branch):
    w = build_weights("power", 100, exponent=1.0)
    c = 1.8 if branch in ("copson_prefix", "leindler_tail") else 0.3
    rep = check_copson_branch(w, 2.0, c, branch, trials=200, seed=1)
    assert rep.passed
    assert rep.max_ratio <= 1.0 + 1e-10


def test_branch_rejects_out_of_range_c():
    w = build_weights("constant", 10)
    with pytest.raises(ValueError):
        check_copson_branch(w, 2.0, 2.5, "copson_prefix")
    with pytest.raises(ValueError):
        check_copson_branch(w, 2.0, 1.5, "copson_tail")
    with pytest.raises(ValueError):
        check_copson_branch(w, 2.0, -0.1, "leindler_prefix")


def test_near_extremal_schedule_monotone_toward_one():
    sched = near_extremal_schedule(2.0, 2.0, n_start=64, n_stop=4096)
    ratios = [r for _, r in sched]
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1.0
    assert near_extremal_ratio(2.0, 2.0, 4096) == pytest.approx(
        ratios[-1], rel=1e-12)


def test_bge_spike_hand_value():
    # constant weights, alpha = 1, p = 2, N = 2, x = (0, 1):
    # LHS = (Lam_2)^2 + (Lam_2)^2 = 8, RHS = 9 (1 + 4) = 45
    w = build_weights("constant", 2)
    lam, Lam = w.values, w.partials
    x = np.array([0.0, 1.0])
    from lpcert import suffix_sums
    lhs = float(np.sum(lam * suffix_sums(Lam * x) ** 2))
    rhs = float((1 * 2 + 1) ** 2 * np.sum(lam * Lam ** 2 * suffix_sums(x) ** 2))
    assert lhs == pytest.approx(8.0, abs=0.0)
    assert rhs == pytest.approx(45.0, abs=0.0)
    assert lhs / rhs <= 1.0


@pytest.mark.parametrize("p,alpha", [(2.0, 0.75), (2.0, 1.0), (1.5, 2.0 / 3.0)])
def test_bge_trials_pass_on_proven_range(p, alpha):
    w = build_weights("constant", 200)
    rep = check_bge(w, p, alpha, trials=200, seed=0)
    assert rep.passed


def test_admissible_alpha_boundary():
    assert admissible_alpha(2.0, 0.75)
    assert not admissible_alpha(2.0, 0.74)
    assert admissible_alpha(1.5, 2.0 / 3.0)


def test_mu_dual_copson_hand_values():
    w = build_weights("constant", 3)
    trace = mu_dual_copson(w, 2.0, 2.0)
    assert trace.mu[0] == pytest.approx(0.25, abs=0.0)
    assert trace.mu[1] == pytest.approx(7.0 / 12.0, rel=1e-14)
    assert trace.mu[2] == pytest.approx(153.0 / 164.0, rel=1e-13)
    assert trace.passed


def test_mu_dual_copson_threshold_flip():
    w = build_weights("constant", 2000)
    assert mu_dual_copson(w, 2.0, 2.236).passed
    assert not mu_dual_copson(w, 2.0, 2.237).passed


def test_mu_bge_routes_agree_with_hand_values():
    w = build_weights("constant", 100)
    dual = mu_bge(w, 2.0, 1.0, route="dual")
    assert dual.mu[0] == pytest.approx(0.25, abs=0.0)
    assert dual.mu[1] == pytest.approx(7.0 / 12.0, rel=1e-14)
    assert dual.passed
    primal = mu_bge(w, 2.0, 1.0, route="primal")
    assert primal.mu[1] == pytest.approx(0.75, rel=1e-14)
    assert primal.passed
    # the analytic floor is exactly met at n = 2 for these parameters
    assert primal.target_margins[1] == pytest.approx(0.25, rel=1e-12)


def test_mu_bge_rejects_bad_routes_and_domains():
    w = build_weights("constant", 10)
    with pytest.raises(ValueError):
        mu_bge(w, 2.0, 1.0, route="sideways")
    with pytest.raises(ValueError):
        mu_bge(w, 2.0, 0.4, route="primal")
    assert not mu_bge(w, 2.0, 0.3, route="dual").passed


@given(st.integers(min_value=2, max_value=40),
       st.floats(min_value=1.1, max_value=1.9))
@settings(max_examples=60, deadline=None)
def test_copson_prefix_random_instances_stay_below_one(n, c):
    rng = np.random.default_rng(n)
    w = build_weights("explicit", n, values=rng.uniform(0.5, 2.0, size=n))
    x = rng.uniform(0.1, 10.0, size=n)
    X = np.array([x])
    inner, u = branch_parts(w, X, "copson_prefix", 2.0, c)
    lhs = float(np.sum(u * inner ** 2, axis=-1)[0])
    rhs = float(branch_constant("copson_prefix", 2.0, c) ** 2
                * np.sum(u * X ** 2, axis=-1)[0])
    assert lhs <= rhs * (1.0 + 1e-10)
