"""Weighted prefix/tail averaging inequalities and their certificates.

Four numeric branches share one report shape.  With weights lam_n,
prefix partials Lam_n, truncated tail partials Lam*_n, and positive x:

  copson_prefix    sum lam_n Lam_n^(p-c)  ((1/Lam_n)  sum_{k<=n} lam_k x_k)^p
                     <= (p/(c-1))^p sum lam_n Lam_n^(p-c)  x_n^p,   c > 1
  copson_tail      sum lam_n Lam_n^(p-c)  ((1/Lam_n)  sum_{k>=n} lam_k x_k)^p
                     <= (p/(1-c))^p sum lam_n Lam_n^(p-c)  x_n^p,   0 <= c < 1
  leindler_prefix  sum lam_n Lam*_n^(p-c) ((1/Lam*_n) sum_{k<=n} lam_k x_k)^p
                     <= (p/(1-c))^p sum lam_n Lam*_n^(p-c) x_n^p,   0 <= c < 1
  leindler_tail    sum lam_n Lam*_n^(p-c) ((1/Lam*_n) sum_{k>=n} lam_k x_k)^p
                     <= (p/(c-1))^p sum lam_n Lam*_n^(p-c) x_n^p,   c > 1

Every finite-N evaluation with positive x is an exact instance of the
corresponding inequality (extend x by zeros), so a ratio above 1 + 1e-10
is a genuine counterexample, not truncation noise.

The admissible-c threshold for the prefix branch beyond c = p is
p - (p-1) c_q, where c_q is the unique negative root of

    (1 + (1 - c)/q')^(1 - q') = (1 - c)/q'     evaluated at q' = p/(p-1);

copson_root computes that root, and check_kernel_inequality verifies the
pointwise kernel bound on [0, 1] that drives the threshold proof.

The blocked tail inequality checked by check_bge is, for p >= 1, alpha > 0,

    sum lam_n (sum_{k>=n} Lam_k^alpha x_k)^p
      <= (alpha p + 1)^p sum lam_n Lam_n^(alpha p) (sum_{k>=n} x_k)^p,

with admissible_alpha giving the proven range alpha >= 1 - 1/(2p).

mu_dual_copson and mu_bge run the dual/primal mu recurrences specialized
to these families and compare each trace against both its hard domain
ceiling and the analytic envelope that the admissibility proofs provide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._num import first_bad, margin_ok, suffix_sums
from .certificates import MuTrace, mu_primal
from .factorable import bge_matrix
from .sequences import WeightSequence, build_weights

RATIO_TOL = 1e-10  # LHS/RHS ratios above 1 + RATIO_TOL are violations

BRANCHES = ("copson_prefix", "copson_tail", "leindler_prefix", "leindler_tail")

_PREFIX_INNER = {"copson_prefix": True, "copson_tail": False,
                 "leindler_prefix": True, "leindler_tail": False}
_PREFIX_WEIGHT = {"copson_prefix": True, "copson_tail": True,
                  "leindler_prefix": False, "leindler_tail": False}
_NEEDS_C_ABOVE_1 = {"copson_prefix": True, "copson_tail": False,
                    "leindler_prefix": False, "leindler_tail": True}


# ----------------------------------------------------------------------
# Negative root, admissible exponents, kernel inequality


@dataclass(frozen=True)
class RootResult:
    """Unique negative root of the threshold equation for one exponent."""

    root: float
    residual: float
    iterations: int


def _threshold_gap(c: float, p: float) -> float:
    """(1 + (1-c)/p)^(1-p) - (1-c)/p; increasing in c, one root in c < 0."""
    t = (1.0 - c) / p
    return (1.0 + t) ** (1.0 - p) - t


def copson_root(p: float) -> RootResult:
    """Solve (1 + (1-c)/p)^(1-p) = (1-c)/p for the unique c < 0.

    Brackets on (-50, 0), widening the left end up to -1e6 if the sign
    change is not yet inside, then runs a safeguarded bracketing solver.
    """
    if not (p > 1.0):
        raise ValueError("need p > 1")
    lo, hi = -50.0, 0.0
    while _threshold_gap(lo, p) >= 0.0:
        lo *= 10.0
        if lo < -1e6:
            raise ValueError("no sign change down to c = -1e6")
    if _threshold_gap(hi, p) <= 0.0:
        raise ValueError("threshold function not positive at c = 0")
    root, info = brentq(_threshold_gap, lo, hi, args=(p,),
                        xtol=1e-15, rtol=8.9e-16, full_output=True)
    return RootResult(root=float(root),
                      residual=float(_threshold_gap(root, p)),
                      iterations=int(info.iterations))


def copson_threshold(p: float) -> float:
    """Largest admissible c for the prefix branch: p - (p-1) c_q, q dual."""
    if not (p > 1.0):
        raise ValueError("need p > 1")
    q = p / (p - 1.0)
    return p - (p - 1.0) * copson_root(q).root


def admissible_c(p: float, c: float) -> bool:
    """True iff 1 < c <= p - (p-1) c_q (the proven prefix-branch range)."""
    if not (p > 1.0):
        raise ValueError("need p > 1")
    if not (c > 1.0):
        return False
    return c <= copson_threshold(p)


@dataclass(frozen=True)
class KernelReport:
    """Minimum margin of the [0, 1] kernel inequality for one (p, c)."""

    p: float
    c: float
    grid: int
    passed: bool
    min_margin: float
    argmin: float

    def to_dict(self) -> dict:
        return {"p": self.p, "c": self.c, "grid": self.grid,
                "pass": self.passed, "min_margin": self.min_margin,
                "argmin": self.argmin}


def _kernel_margin(y: np.ndarray | float, p: float, c: float):
    """RHS - LHS of  1 + ((c-1)/p) y <= (((c-1)/p) y + (1-y)^((c-1)/(p-1)))^(1-p)."""
    t = (c - 1.0) / p
    lhs = 1.0 + t * y
    inner = t * y + (1.0 - y) ** ((c - 1.0) / (p - 1.0))
    return inner ** (1.0 - p) - lhs


def check_kernel_inequality(p: float, c: float, grid: int = 4096) -> KernelReport:
    """Scan the kernel inequality on [0, 1]; equality holds at y = 0.

    A uniform grid locates the minimum margin, then a golden-section
    refinement narrows around it; pass means min margin >= -1e-12.
    """
    if not (p > 1.0 and c > 1.0):
        raise ValueError("need p > 1 and c > 1")
    if grid < 1000:
        raise ValueError("need grid resolution >= 1000")
    y = np.linspace(0.0, 1.0, grid + 1)
    m = _kernel_margin(y, p, c)
    i = int(np.argmin(m))
    lo = y[max(i - 1, 0)]
    hi = y[min(i + 1, grid)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1 = float(_kernel_margin(x1, p, c))
    f2 = float(_kernel_margin(x2, p, c))
    while b - a > 1e-13:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = float(_kernel_margin(x1, p, c))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = float(_kernel_margin(x2, p, c))
    refined_y = x1 if f1 <= f2 else x2
    refined_m = min(f1, f2)
    min_margin = min(float(m[i]), refined_m)
    argmin = float(y[i]) if float(m[i]) <= refined_m else float(refined_y)
    return KernelReport(p=p, c=c, grid=grid,
                        passed=margin_ok(min_margin, 1.0),
                        min_margin=min_margin, argmin=argmin)


# ----------------------------------------------------------------------
# Branch evaluation


@dataclass(frozen=True)
class BranchReport:
    """Max observed LHS/RHS ratio over a batch of positive trial vectors.

    argmin is the 1-based trial index attaining the smallest margin
    (equivalently the largest ratio).
    """

    branch: str
    p: float
    c_or_alpha: float
    N: int
    trials: int
    max_ratio: float
    min_margin: float
    argmin: int
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {"branch": self.branch, "p": self.p,
                "c_or_alpha": self.c_or_alpha, "N": self.N,
                "trials": self.trials, "max_ratio": self.max_ratio,
                "min_margin": self.min_margin, "argmin": self.argmin,
                "pass": self.passed, "note": self.note}


def branch_constant(branch: str, p: float, c: float) -> float:
    """First-power constant of the branch: p/(c-1) or p/(1-c)."""
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    if _NEEDS_C_ABOVE_1[branch]:
        if not (1.0 < c <= p):
            raise ValueError(f"branch {branch} needs 1 < c <= p")
        return p / (c - 1.0)
    if not (0.0 <= c < 1.0):
        raise ValueError(f"branch {branch} needs 0 <= c < 1")
    return p / (1.0 - c)


def branch_parts(w: WeightSequence, X: np.ndarray, branch: str, p: float,
                 c: float) -> tuple[np.ndarray, np.ndarray]:
    """(inner averages, summation weights u) for trial rows X.

    inner[j, n] is the branch's averaged quantity for trial row j, and
    u_n = lam_n Lam_n^(p-c) or lam_n Lam*_n^(p-c) as the branch demands.
    """
    lam = w.values
    # copson branches average against the prefix partials (so copson_tail
    # divides a tail sum by Lam_n); leindler branches against the tail
    # partials (so leindler_prefix divides a prefix sum by Lam*_n).
    base = w.partials if _PREFIX_WEIGHT[branch] else w.tails
    xl = X * lam
    if _PREFIX_INNER[branch]:
        sums = np.cumsum(xl, axis=-1)
    else:
        sums = suffix_sums(xl)
    inner = sums / base
    u = lam * base ** (p - c)
    return inner, u


def _branch_ratios(w: WeightSequence, X: np.ndarray, branch: str, p: float,
                   c: float) -> np.ndarray:
    """Per-trial LHS/RHS ratios of the p-th power branch inequality."""
    K = branch_constant(branch, p, c)
    X = X / np.max(X, axis=-1, keepdims=True)
    inner, u = branch_parts(w, X, branch, p, c)
    lhs = np.sum(u * inner ** p, axis=-1)
    rhs = K ** p * np.sum(u * X ** p, axis=-1)
    return lhs / rhs


def check_copson_branch(w: WeightSequence, p: float, c: float, branch: str,
                        trials: int = 1000, seed: int = 0) -> BranchReport:
    """Random positive trials (log-uniform entries in [1e-3, 1e3]) of one
    branch; every trial is an exact finite instance, so the max ratio must
    stay <= 1 + 1e-10."""
    if not (p > 1.0):
        raise ValueError("need p > 1")
    if trials < 1:
        raise ValueError("need trials >= 1")
    branch_constant(branch, p, c)  # validates branch and c domain
    rng = np.random.default_rng(seed)
    chunk = max(1, int(2_000_000 // max(w.N, 1)))
    best = -math.inf
    best_trial = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        X = 10.0 ** rng.uniform(-3.0, 3.0, size=(m, w.N))
        ratios = _branch_ratios(w, X, branch, p, c)
        j = int(np.argmax(ratios))
        if float(ratios[j]) > best:
            best = float(ratios[j])
            best_trial = done + j + 1
        done += m
    return BranchReport(branch=branch, p=p, c_or_alpha=c, N=w.N,
                        trials=trials, max_ratio=best,
                        min_margin=1.0 - best, argmin=best_trial,
                        passed=best <= 1.0 + RATIO_TOL)


def near_extremal_ratio(p: float, c: float, N: int,
                        offset: float = 0.01) -> float:
    """copson_prefix ratio for constant weights and x_n = n^(-1/p-offset).

    As N grows (the schedule doubles N) the ratio increases toward the
    best-possible-constant limit; the fixed offset keeps the p-th power
    sums convergent so the climb is monotone.
    """
    w = build_weights("constant", N)
    n = np.arange(1, N + 1, dtype=np.float64)
    x = n ** (-1.0 / p - offset)
    return float(_branch_ratios(w, x[None, :], "copson_prefix", p, c)[0])


def near_extremal_schedule(p: float, c: float, n_start: int = 64,
                           n_stop: int = 100_000,
                           offset: float = 0.01) -> list[tuple[int, float]]:
    """(N, ratio) along a doubling schedule n_start, 2 n_start, ..., n_stop.

    All truncations reuse one prefix-sum pass at n_stop, since the inner
    averages of the prefix branch do not depend on the truncation point.
    """
    if not (1 <= n_start <= n_stop):
        raise ValueError("need 1 <= n_start <= n_stop")
    K = branch_constant("copson_prefix", p, c)
    w = build_weights("constant", n_stop)
    n = np.arange(1, n_stop + 1, dtype=np.float64)
    x = n ** (-1.0 / p - offset)
    inner, u = branch_parts(w, x[None, :], "copson_prefix", p, c)
    num = np.cumsum(u * inner[0] ** p)
    den = K ** p * np.cumsum(u * x ** p)
    schedule = []
    N = n_start
    while N < n_stop:
        schedule.append(N)
        N *= 2
    schedule.append(n_stop)
    return [(N, float(num[N - 1] / den[N - 1])) for N in schedule]


# ----------------------------------------------------------------------
# Blocked tail inequality


def admissible_alpha(p: float, alpha: float) -> bool:
    """True iff alpha >= 1 - 1/(2p), the proven range for the blocked
    tail inequality.  The boundary itself is admissible, so the
    comparison carries a 1e-12 slack for cases like p = 1.5 where
    1 - 1/(2p) is not exactly representable."""
    if not (p > 1.0):
        raise ValueError("need p > 1")
    return alpha >= 1.0 - 1.0 / (2.0 * p) - 1e-12


def check_bge(w: WeightSequence, p: float, alpha: float, trials: int = 1000,
              seed: int = 0) -> BranchReport:
    """Random trials of the blocked tail inequality with truncated tail
    sums; max LHS/RHS ratio must stay <= 1 + 1e-10."""
    if not (p >= 1.0):
        raise ValueError("need p >= 1")
    if not (alpha > 0.0):
        raise ValueError("need alpha > 0")
    if trials < 1:
        raise ValueError("need trials >= 1")
    lam, Lam = w.values, w.partials
    K = (alpha * p + 1.0) ** p
    rng = np.random.default_rng(seed)
    chunk = max(1, int(2_000_000 // max(w.N, 1)))
    best = -math.inf
    best_trial = 0
    done = 0
    wa = Lam ** alpha
    while done < trials:
        m = min(chunk, trials - done)
        X = 10.0 ** rng.uniform(-3.0, 3.0, size=(m, w.N))
        X /= np.max(X, axis=-1, keepdims=True)
        lhs = np.sum(lam * suffix_sums(wa * X) ** p, axis=-1)
        rhs = K * np.sum(lam * wa ** p * suffix_sums(X) ** p, axis=-1)
        ratios = lhs / rhs
        j = int(np.argmax(ratios))
        if float(ratios[j]) > best:
            best = float(ratios[j])
            best_trial = done + j + 1
        done += m
    return BranchReport(branch="bge", p=p, c_or_alpha=alpha, N=w.N,
                        trials=trials, max_ratio=best,
                        min_margin=1.0 - best, argmin=best_trial,
                        passed=best <= 1.0 + RATIO_TOL)


# ----------------------------------------------------------------------
# Mu recurrences specialized to the two families


def mu_dual_copson(w: WeightSequence, p: float, c: float,
                   N: int | None = None) -> MuTrace:
    """Dual recurrence for the prefix branch with constant (p/(c-1))^p.

    With q = p/(p-1) and R_n = Lam_n/lam_n:

        mu_1 = ((c-1)/p)^q,
        mu_{n+1} = mu_1 + (lam_n/Lam_n) (Lam_n/Lam_{n+1})^((c-1)/(p-1))
                          (Lam_{n+1}/lam_{n+1})
                   / (mu_n^(-1/(q-1)) - (lam_n/Lam_n)^(q/(q-1)))^(q-1).

    Hard ceiling (also the recurrence domain): mu_n < R_n^q, strict.
    Analytic envelope: mu_n <= R_n (1/R_n + a)^(1-q) with a = p/(c-1);
    staying under it for admissible c is what the threshold proof shows.
    """
    if not (p > 1.0):
        raise ValueError("need p > 1")
    if not (c > 1.0):
        raise ValueError("need c > 1")
    n_stop = w.N if N is None else int(N)
    if not (1 <= n_stop <= w.N):
        raise ValueError("need 1 <= N <= len(weights)")
    lam = w.values
    Lam = w.partials
    q = p / (p - 1.0)
    e1 = 1.0 / (q - 1.0)   # = p - 1
    eq = q / (q - 1.0)     # = p
    a = p / (c - 1.0)
    base = ((c - 1.0) / p) ** q
    theta = (c - 1.0) / (p - 1.0)
    mu = [base]
    margins = []
    violation = None
    for n in range(1, n_stop + 1):
        R = float(Lam[n - 1] / lam[n - 1])
        ceiling = R ** q
        m = ceiling - mu[-1]
        margins.append(m)
        if not (m > 0.0):
            violation = n
            break
        if n == n_stop:
            break
        t = float(lam[n - 1] / Lam[n - 1])
        D = mu[-1] ** (-e1) - t ** eq
        # D > 0 is exactly the ceiling just checked; guard anyway
        if D <= 0.0 or not math.isfinite(D):
            violation = n
            break
        num = t * float(Lam[n - 1] / Lam[n]) ** theta * float(Lam[n] / lam[n])
        mu.append(base + num / D ** (q - 1.0))
    arr = np.array(mu, dtype=np.float64)
    R_used = Lam[:arr.shape[0]] / lam[:arr.shape[0]]
    targets = R_used * (1.0 / R_used + a) ** (1.0 - q)
    t_margins = targets - arr
    t_bad = first_bad(t_margins, np.maximum(np.abs(targets), np.abs(arr)))
    return MuTrace(mu=arr, constraint="mu < (Lam_n/lam_n)^q",
                   margins=np.array(margins, dtype=np.float64),
                   first_violation=violation,
                   target_margins=t_margins,
                   target_violation=None if t_bad is None else t_bad + 1)


def _bge_s(w: WeightSequence, alpha: float, n_stop: int) -> np.ndarray:
    """s_n = 1 - (Lam_{n-1}/Lam_n)^alpha, with s_1 = 1."""
    Lam = w.partials[:n_stop]
    prev = np.concatenate(([0.0], Lam[:-1]))
    return 1.0 - (prev / Lam) ** alpha


def mu_bge(w: WeightSequence, p: float, alpha: float, route: str = "dual",
           N: int | None = None) -> MuTrace:
    """Mu recurrences for the blocked tail inequality, either route.

    dual route, with q = p/(p-1) and s_n = 1 - (Lam_{n-1}/Lam_n)^alpha:

        mu_1 = ((p-1)/(alpha p))^q,
        mu_{n+1} = mu_1 + (lam_n/lam_{n+1})
                   / (mu_n^(-1/(q-1)) - s_n^(q/(q-1)))^(q-1),

    hard ceiling mu_n < s_n^(-q), envelope
    mu_n <= (s_n^(q/(q-1)) + (A lam_n/Lam_n)^(1/(q-1)))^(1-q) with
    A = alpha^q q^(q-1).

    primal route (needs alpha > 1 - 1/p): the generic primal recurrence on
    the blocked-tail factorable matrix with lam_p = ((p-1)/(alpha p))^p,
    plus the analytic floor for n >= 2

        mu_n >= (lam_{n-1}/Lam_{n-1})^(p-1) / ((p/(p-1))^(p-1) s_{n-1}^p).
    """
    if not (p > 1.0):
        raise ValueError("need p > 1")
    if not (alpha > 0.0):
        raise ValueError("need alpha > 0")
    if route not in ("dual", "primal"):
        raise ValueError("route must be 'dual' or 'primal'")
    n_stop = w.N if N is None else int(N)
    if not (1 <= n_stop <= w.N):
        raise ValueError("need 1 <= N <= len(weights)")
    lam = w.values
    Lam = w.partials
    q = p / (p - 1.0)
    s = _bge_s(w, alpha, n_stop)

    if route == "primal":
        lam_p = ((p - 1.0) / (alpha * p)) ** p
        if not (lam_p < 1.0):
            raise ValueError("primal route needs alpha > 1 - 1/p")
        spec = bge_matrix(w, p, alpha)
        if n_stop != w.N:
            spec = bge_matrix(build_weights(
                "explicit", n_stop, values=w.values[:n_stop]), p, alpha)
        trace = mu_primal(spec, p, lam_p)
        k = trace.mu.shape[0]
        # The analytic floor only constrains n >= 2; n = 1 is recorded
        # with an infinite margin and excluded from the violation scan.
        t_margins = np.full(k, math.inf)
        t_bad = None
        if k > 1:
            idx = np.arange(1, k)
            floors = (lam[idx - 1] / Lam[idx - 1]) ** (p - 1.0) / (
                (p / (p - 1.0)) ** (p - 1.0) * s[idx - 1] ** p)
            t_margins[1:] = trace.mu[1:] - floors
            scales = np.maximum(np.abs(trace.mu[1:]), np.abs(floors))
            bad = first_bad(t_margins[1:], scales)
            t_bad = None if bad is None else bad + 2
        return MuTrace(mu=trace.mu, constraint=trace.constraint,
                       margins=trace.margins,
                       first_violation=trace.first_violation,
                       target_margins=t_margins,
                       target_violation=t_bad)

    e1 = 1.0 / (q - 1.0)
    eq = q / (q - 1.0)
    base = ((p - 1.0) / (alpha * p)) ** q
    A = alpha ** q * q ** (q - 1.0)
    mu = [base]
    margins = []
    violation = None
    for n in range(1, n_stop + 1):
        sn = float(s[n - 1])
        ceiling = sn ** (-q)
        m = ceiling - mu[-1]
        margins.append(m)
        if not (m > 0.0):
            violation = n
            break
        if n == n_stop:
            break
        D = mu[-1] ** (-e1) - sn ** eq
        if D <= 0.0 or not math.isfinite(D):
            violation = n
            break
        mu.append(base + float(lam[n - 1] / lam[n]) / D ** (q - 1.0))
    arr = np.array(mu, dtype=np.float64)
    k = arr.shape[0]
    targets = (s[:k] ** eq + (A * lam[:k] / Lam[:k]) ** e1) ** (1.0 - q)
    t_margins = targets - arr
    t_bad = first_bad(t_margins, np.maximum(np.abs(targets), np.abs(arr)))
    return MuTrace(mu=arr, constraint="mu < s_n^(-q)",
                   margins=np.array(margins, dtype=np.float64),
                   first_violation=violation,
                   target_margins=t_margins,
                   target_violation=None if t_bad is None else t_bad + 1)


__all__ = [
    "RATIO_TOL", "BRANCHES", "RootResult", "copson_root", "copson_threshold",
    "admissible_c", "KernelReport", "check_kernel_inequality",
    "BranchReport", "branch_constant", "branch_parts", "check_copson_branch",
    "near_extremal_ratio", "near_extremal_schedule", "admissible_alpha",
    "check_bge", "mu_dual_copson", "mu_bge",
]
