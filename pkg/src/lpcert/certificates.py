"""Sufficient conditions certifying l^p bounds p/(p-L) for factorable matrices.

All checks target the same conclusion for a lower triangular factorable
matrix M (entries b_k/a_n, k <= n) on l^p, p > 1:

    sum_n ( (1/a_n) sum_{k<=n} b_k x_k )^p  <=  (p/(p-L))^p  sum_n x_n^p.

Checkers, from weakest hypothesis to most specialized:

  check_product_condition    weighted mean matrices; for every n,
      sum_{k<=n} (lam_k/Lam_n) prod_{i=k..n} ((R_{i+1} - L/p)/R_i)^(1/(p-1))
      <= p/(p-L),  where R_n = Lam_n/lam_n.
  check_ratio_condition      weighted mean matrices; per-index test
      R_{n+1} <= R_n (1 - L lam_n/(p Lam_n))^(1-p) + L/p.
  cartlidge_constant         L = sup_n (R_{n+1} - R_n); the classical
      Cartlidge condition certifies p/(p-L) when L < p.
  check_factorable_product   the product condition for general normalized
      factorable matrices (a_1 = b_1), factors
      ((a_i/b_{i+1} + 1 - L/p)/(a_i/b_i))^(1/(p-1)).
  check_factorable_stepwise  consecutive-pair condition equivalent to one
      step of the primal mu recurrence staying above a linear floor.
  check_stepwise_p2          weighted mean, p = 2 specialization of the
      stepwise condition in terms of the ratio differences.

mu_primal and mu_dual run the recurrences behind these certificates
directly; a completed trace is itself a certificate at truncation N.
Products are accumulated in log space; sums of positive terms inside the
product conditions use a running log-sum-exp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._num import first_bad, margin_ok
from .factorable import FactorableSpec
from .sequences import WeightSequence


@dataclass(frozen=True)
class BoundParams:
    """Derived constants for a target bound p/(p-L)."""

    p: float
    L: float

    def __post_init__(self):
        if not (self.p > 1.0):
            raise ValueError("need p > 1")
        if not (0.0 < self.L < self.p):
            raise ValueError("need 0 < L < p")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def bound(self) -> float:
        return self.p / (self.p - self.L)

    @property
    def lam_p(self) -> float:
        """(1 - L/p)^p, the reciprocal of the p-th power of the bound."""
        return (1.0 - self.L / self.p) ** self.p

    @property
    def U_p(self) -> float:
        return 1.0 / self.lam_p


@dataclass
class MuTrace:
    """A mu recurrence trace with its hard constraint margins.

    margins[i] is the constraint margin at 1-based index n = i+1; the
    trace stops at the first violation.  Dual traces with an analytic
    target additionally carry target margins (reported, also gating for
    the pass verdict when present).
    """

    mu: np.ndarray
    constraint: str
    margins: np.ndarray
    first_violation: int | None
    target_margins: np.ndarray | None = None
    target_violation: int | None = None
    aux_constraint: str = ""
    aux_margins: np.ndarray | None = None

    @property
    def passed(self) -> bool:
        """Hard constraint and analytic target only; aux margins are
        informational and never gate the verdict."""
        return self.first_violation is None and self.target_violation is None

    @property
    def n_evaluated(self) -> int:
        return int(self.mu.shape[0])

    @property
    def worst_margin(self) -> float:
        worst = float(np.min(self.margins)) if self.margins.size else math.inf
        if self.target_margins is not None and self.target_margins.size:
            worst = min(worst, float(np.min(self.target_margins)))
        return worst


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one certificate check, JSON/CSV friendly."""

    method: str
    p: float
    N: int
    passed: bool
    first_fail: int | None
    worst_margin: float
    bound: float | None
    L: float | None = None
    c: float | None = None
    alpha: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "method": self.method, "p": self.p, "L": self.L, "c": self.c,
            "alpha": self.alpha, "N": self.N, "pass": self.passed,
            "first_fail": self.first_fail, "worst_margin": self.worst_margin,
            "bound": self.bound, "note": self.note,
        }


def _report(method: str, params: BoundParams, N: int, margins: np.ndarray,
            scales: np.ndarray, note: str = "", offset: int = 1,
            **extra) -> CertificateReport:
    """Assemble a report from margin/scale arrays indexed from `offset`."""
    bad = first_bad(margins, scales)
    worst = float(np.min(margins)) if margins.size else math.inf
    return CertificateReport(
        method=method, p=params.p, L=params.L, N=N, passed=bad is None,
        first_fail=None if bad is None else bad + offset,
        worst_margin=worst, bound=params.bound, note=note, **extra)


# ----------------------------------------------------------------------
# Cartlidge constant


def cartlidge_constant(w: WeightSequence) -> float:
    """sup over the truncation of Lam_{n+1}/lam_{n+1} - Lam_n/lam_n."""
    if w.N < 2:
        raise ValueError("need at least two weights")
    r = w.ratios
    return float(np.max(np.diff(r)))


def cartlidge_profile(w: WeightSequence) -> tuple[float, int, bool]:
    """(L, attaining index n, tail-still-increasing flag).

    The flag warns that the last tenth of the differences is strictly
    increasing, so the truncated maximum may undershoot the true sup.
    """
    if w.N < 2:
        raise ValueError("need at least two weights")
    diffs = np.diff(w.ratios)
    arg = int(np.argmax(diffs))
    tail_len = max(2, diffs.shape[0] // 10)
    tail = diffs[-tail_len:]
    increasing = bool(tail.shape[0] >= 2 and np.all(np.diff(tail) > 0.0))
    return float(diffs[arg]), arg + 1, increasing


def check_cartlidge(w: WeightSequence, p: float, L: float) -> CertificateReport:
    """Pass iff the Cartlidge constant of w is <= L (and L < p)."""
    params = BoundParams(p, L)
    diffs = np.diff(w.ratios)
    margins = L - diffs
    scales = np.maximum(np.abs(diffs), L)
    return _report("cartlidge", params, w.N, margins, scales)


# ----------------------------------------------------------------------
# Ratio and product conditions for weighted mean matrices


def check_ratio_condition(w: WeightSequence, p: float, L: float) -> CertificateReport:
    """Per-index growth test on R_n = Lam_n/lam_n, checked for n <= N-1:

        R_{n+1} <= R_n (1 - L lam_n / (p Lam_n))^(1-p) + L/p.
    """
    params = BoundParams(p, L)
    r = w.ratios
    inner = 1.0 - (L / p) / r[:-1]  # positive since R_n >= 1 > L/p
    rhs = r[:-1] * inner ** (1.0 - p) + L / p
    lhs = r[1:]
    margins = rhs - lhs
    scales = np.maximum(np.abs(lhs), np.abs(rhs))
    return _report("ratio", params, w.N, margins, scales)


def _product_condition(a: np.ndarray, b: np.ndarray, params: BoundParams,
                       factors_num: np.ndarray, method: str, N: int) -> CertificateReport:
    """Shared log-space evaluator for the product conditions.

    factors_num[i] is the factor numerator at math index i+1; the factor is
    factors_num[i] / (a_i/b_i).  Condition at n (1 <= n <= N-1):

        (1/a_n) sum_{k<=n} b_k prod_{i=k..n} factor_i^(1/(p-1)) <= p/(p-L).
    """
    p = params.p
    ratios = a / b
    if np.any(factors_num <= 0.0):
        bad = int(np.flatnonzero(factors_num <= 0.0)[0])
        margins = np.full(bad + 1, np.nan)
        margins[:bad] = 0.0
        return _report(method, params, N, margins, np.ones_like(margins),
                       note=f"nonpositive product factor at n={bad + 1}")
    lnf = (np.log(factors_num) - np.log(ratios[:-1])) / (p - 1.0)
    C = np.cumsum(lnf)                      # C[i] = sum_{j<=i+1} ln factor_j^(1/(p-1))
    Cprev = np.concatenate(([0.0], C[:-1]))
    terms = np.log(b[:-1]) - Cprev          # ln b_k - C_{k-1}, k = 1..N-1
    S = np.logaddexp.accumulate(terms)
    lhs = np.exp(C + S - np.log(a[:-1]))
    margins = params.bound - lhs
    scales = np.maximum(lhs, params.bound)
    return _report(method, params, N, margins, scales)


def check_product_condition(w: WeightSequence, p: float, L: float) -> CertificateReport:
    """Weighted mean product condition, checked for n <= N-1."""
    params = BoundParams(p, L)
    r = w.ratios
    nums = r[1:] - L / p
    return _product_condition(w.partials, w.values, params, nums, "product", w.N)


def check_factorable_product(spec: FactorableSpec, p: float, L: float) -> CertificateReport:
    """Product condition for a normalized factorable matrix, n <= N-1."""
    params = BoundParams(p, L)
    if not spec.normalized:
        raise ValueError("product certificate needs a normalized spec (a_1 = b_1)")
    nums = spec.a[:-1] / spec.b[1:] + 1.0 - L / p
    return _product_condition(spec.a, spec.b, params, nums,
                              "factorable-product", spec.N)


# ----------------------------------------------------------------------
# Stepwise (consecutive-pair) conditions


def check_factorable_stepwise(spec: FactorableSpec, p: float, L: float) -> CertificateReport:
    """Consecutive-pair condition on a normalized factorable matrix.

    With A = lam_p^(1-1/p), B = 1 - lam_p - A, r_n = a_n/b_n, the test at
    each n <= N-1 is

        (A r_{n+1} + 1 - A)^(1/(p-1)) *
            ((A r_n + B)^(1/(p-1)) + (a_n/b_{n+1})^(p/(p-1)))
        <=  r_{n+1}^(p/(p-1)) (A r_n + B)^(1/(p-1)),

    which propagates the linear floor mu_n >= A r_{n-1} + B through the
    primal recurrence.  The floor values A r_n + B must stay positive for
    the condition to make sense; a nonpositive value is reported as a
    failure at that index.
    """
    params = BoundParams(p, L)
    if not spec.normalized:
        raise ValueError("stepwise certificate needs a normalized spec (a_1 = b_1)")
    lam_p = params.lam_p
    A = lam_p ** (1.0 - 1.0 / p)
    B = 1.0 - lam_p - A
    r = spec.row_ratios
    x, y = r[:-1], r[1:]
    cross = spec.a[:-1] / spec.b[1:]
    g = A * x + B
    if np.any(g <= 0.0):
        bad = int(np.flatnonzero(g <= 0.0)[0])
        margins = np.full(bad + 1, np.nan)
        margins[:bad] = 0.0
        return _report("stepwise", params, spec.N, margins, np.ones_like(margins),
                       note=f"floor constant A*r_n+B nonpositive at n={bad + 1}")
    e1 = 1.0 / (p - 1.0)
    ep = p / (p - 1.0)
    lhs = (A * y + 1.0 - A) ** e1 * (g ** e1 + cross ** ep)
    rhs = y ** ep * g ** e1
    margins = rhs - lhs
    scales = np.maximum(np.abs(lhs), np.abs(rhs))
    return _report("stepwise", params, spec.N, margins, scales)


def check_stepwise_p2(w: WeightSequence, L: float) -> CertificateReport:
    """p = 2 weighted mean form of the stepwise condition, n <= N-1:

        R_{n+1} - R_n <= L + (L^2/4) ((1 + L/2)/(1 - L/2)) / (R_{n+1} + L/2).

    Not comparable in general with the p = 2 ratio condition
        R_{n+1} - R_n <= L + (L^2/4) / (R_n - L/2);
    each can pass where the other fails.
    """
    params = BoundParams(2.0, L)
    r = w.ratios
    d = np.diff(r)
    rhs = L + (L * L / 4.0) * ((1.0 + L / 2.0) / (1.0 - L / 2.0)) / (r[1:] + L / 2.0)
    margins = rhs - d
    scales = np.maximum(np.abs(d), np.abs(rhs))
    return _report("stepwise-p2", params, w.N, margins, scales)


# ----------------------------------------------------------------------
# Mu recurrences


def mu_primal(spec: FactorableSpec, p: float, lam_p: float) -> MuTrace:
    """Primal recurrence; a full nonnegative trace certifies the bound
    lam_p^(-1/p) at truncation N.

        mu_1 = 1,
        mu_{n+1} = (a_n/b_n)^p mu_n
                   / (mu_n^(1/(p-1)) + (a_{n-1}/b_n)^(p/(p-1)))^(p-1)
                   - lam_p,           with a_0 = 0.

    Constraint: mu_n >= 0.  Values within -1e-12 (relative) of zero are
    clamped to zero and the run continues; anything lower stops the trace.
    """
    if not (p > 1.0):
        raise ValueError("need p > 1")
    if not (0.0 < lam_p < 1.0):
        raise ValueError("need lam_p in (0, 1)")
    if not spec.normalized:
        raise ValueError("primal recurrence needs a normalized spec (a_1 = b_1)")
    a, b = spec.a, spec.b
    N = spec.N
    e1 = 1.0 / (p - 1.0)
    ep = p / (p - 1.0)
    mu = [1.0]
    violation = None
    for n in range(1, N):  # math index; computes mu_{n+1}
        prev = mu[-1]
        an, bn = float(a[n - 1]), float(b[n - 1])
        anm1 = float(a[n - 2]) if n >= 2 else 0.0
        base = prev ** e1 if prev > 0.0 else 0.0
        cross = (anm1 / bn) ** ep if anm1 > 0.0 else 0.0
        denom = (base + cross) ** (p - 1.0)
        if denom <= 0.0 or not math.isfinite(denom):
            violation = n
            break
        t = (an / bn) ** p * prev / denom
        nxt = t - lam_p
        if nxt < 0.0:
            if margin_ok(nxt, max(t, lam_p)):
                nxt = 0.0
            else:
                mu.append(nxt)
                violation = n + 1
                break
        mu.append(nxt)
    arr = np.array(mu, dtype=np.float64)
    return MuTrace(mu=arr, constraint="mu >= 0", margins=arr.copy(),
                   first_violation=violation)


def mu_dual(spec: FactorableSpec, p: float, U_p: float) -> MuTrace:
    """Dual recurrence; staying strictly below the ceiling (a_n/b_n)^q for
    all n <= N certifies sum (Mx)_n^p <= U_p sum x_n^p at truncation N.

        mu_1 = U_p^(-q/p),
        mu_{n+1} = U_p^(-q/p)
                   + (a_n/b_{n+1})^q
                     / ((a_n/b_n)^(q/(q-1)) mu_n^(-1/(q-1)) - 1)^(q-1).

    The ceiling is strict: a zero margin is a violation (e.g. U_p = 1 on a
    normalized spec dies immediately at n = 1).
    """
    if not (p > 1.0):
        raise ValueError("need p > 1")
    if not (U_p > 0.0):
        raise ValueError("need U_p > 0")
    a, b = spec.a, spec.b
    N = spec.N
    q = p / (p - 1.0)
    base = U_p ** (-q / p)
    eq = q / (q - 1.0)           # equals p
    e1 = 1.0 / (q - 1.0)         # equals p - 1
    mu = [base]
    margins = []
    violation = None
    for n in range(1, N + 1):  # math index of the value just appended
        r = float(a[n - 1] / b[n - 1])
        ceiling = r ** q
        m = ceiling - mu[-1]
        margins.append(m)
        if not (m > 0.0):
            violation = n
            break
        if n == N:
            break
        cross = float(a[n - 1] / b[n])
        inner = r ** eq * mu[-1] ** (-e1) - 1.0
        if inner <= 0.0 or not math.isfinite(inner):
            violation = n
            break
        mu.append(base + cross ** q / inner ** (q - 1.0))
    arr = np.array(mu, dtype=np.float64)
    return MuTrace(mu=arr, constraint="mu < (a_n/b_n)^q",
                   margins=np.array(margins, dtype=np.float64),
                   first_violation=violation)


def trace_report(trace: MuTrace, method: str, params: BoundParams,
                 N: int) -> CertificateReport:
    """Wrap a mu trace as a CertificateReport."""
    return CertificateReport(
        method=method, p=params.p, L=params.L, N=N, passed=trace.passed,
        first_fail=trace.first_violation if trace.first_violation is not None
        else trace.target_violation,
        worst_margin=trace.worst_margin, bound=params.bound)


__all__ = [
    "BoundParams", "MuTrace", "CertificateReport",
    "cartlidge_constant", "cartlidge_profile", "check_cartlidge",
    "check_ratio_condition", "check_product_condition",
    "check_factorable_product", "check_factorable_stepwise",
    "check_stepwise_p2", "mu_primal", "mu_dual", "trace_report",
]
