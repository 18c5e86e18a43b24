"""Reversed averaging inequality for 0 < p < 1 and its certificates.

The target inequality, for positive x and C_p = (p/(1-p))^p, is

    sum_n ( (1/n) sum_{k>=n} x_k )^p  >=  C_p  sum_n x_n^p,

together with its dual form (q = p/(p-1) < 0)

    sum_n ( sum_{k<=n} x_k/k )^q  <=  (p/(1-p))^q  sum_n x_n^q.

Two recurrence certificates are implemented.

mu_direct drives the primal route:

    mu_1 = ((1-p)/p)^p,
    mu_{n+1} = (n+1)^p (n^(p/(p-1)) mu_n^(1/(1-p)) - 1)^(1-p) + mu_1,

whose domain condition at step n is exactly mu_n > n^p; a trace that
keeps mu_{n0} above the linear floor a n0 + b with

    a = (p/(1-p))^(1-p),   b = (1/p - 1)^p / 2

stays above it forever, certifying the inequality (certify_direct finds
the smallest such n0).  Forcing n0 = 2 reproduces the closed-form
threshold test threshold_margin, whose positive range ends just above
p = 0.346.

mu_dual drives the dual route:

    mu_1 = 0,
    mu_{n+1} = (n^(-p) + mu_n^(1-p))^(1/(1-p)) - (1/p - 1)^(p/(p-1)),

and positivity of mu_n for n >= 2 certifies the dual inequality.
dual_feasible checks the three-part sufficient condition that a shift
constant c makes the trace provably positive from n0 on:

    mu_{n0} >= (1/p-1)^(1/(p-1)) (n0 + c),      c > -1/(2p),
    f(1/n0) >= 0  with  f(y) = (1/p-1) y + (1+cy)^(1-p)
                               - (1+(c+1/p)y)^(1-p),

and search_c automates the hunt for a feasible (n0, c) pair; f is
increasing in c, so the largest c allowed by the first condition is the
best candidate and ties resolve toward it.

The probes evaluate both inequalities directly on finite data.  Tail
truncation only shrinks the primal LHS, so probe_primal is a
conservative lower-ratio probe; any value below C_p would disprove the
inequality outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._num import PASS_RTOL, first_bad, margin_ok, suffix_sums
from .certificates import MuTrace

N_MAX_DEFAULT = 100_000


def hlp_constant(p: float) -> float:
    """C_p = (p/(1-p))^p, the certified constant of the primal form."""
    if not (0.0 < p < 1.0):
        raise ValueError("need 0 < p < 1")
    return (p / (1.0 - p)) ** p


def direct_floor(p: float) -> tuple[float, float]:
    """(a, b) of the linear floor a n + b used by the direct certificate."""
    a = (p / (1.0 - p)) ** (1.0 - p)
    b = (1.0 / p - 1.0) ** p / 2.0
    return a, b


def mu_direct(p: float, N: int) -> MuTrace:
    """Direct-route trace; margins are mu_n - n^p (strictly positive
    keeps the recurrence inside its domain)."""
    if not (1.0 / 3.0 <= p < 1.0):
        raise ValueError("need 1/3 <= p < 1")
    if N < 1:
        raise ValueError("need N >= 1")
    base = ((1.0 - p) / p) ** p
    ep = p / (p - 1.0)
    e1 = 1.0 / (1.0 - p)
    mu = [base]
    margins = []
    violation = None
    for n in range(1, N + 1):
        m = mu[-1] - float(n) ** p
        margins.append(m)
        if not (m > 0.0):
            violation = n
            break
        if n == N:
            break
        inner = float(n) ** ep * mu[-1] ** e1 - 1.0
        if inner <= 0.0 or not math.isfinite(inner):
            violation = n
            break
        mu.append(float(n + 1) ** p * inner ** (1.0 - p) + base)
    return MuTrace(mu=np.array(mu), constraint="mu > n^p",
                   margins=np.array(margins), first_violation=violation)


@dataclass(frozen=True)
class DirectCertificate:
    """Outcome of the direct-route floor search."""

    p: float
    n0: int | None
    margin: float
    n0_max: int
    trace: MuTrace

    @property
    def certified(self) -> bool:
        return self.n0 is not None


def certify_direct(p: float, n0_max: int = N_MAX_DEFAULT) -> DirectCertificate:
    """Smallest n0 <= n0_max with mu_{n0} >= a n0 + b (tolerant of exact
    equality); margin is the raw slack at that n0."""
    trace = mu_direct(p, n0_max)
    a, b = direct_floor(p)
    k = trace.mu.shape[0]
    n = np.arange(1, k + 1, dtype=np.float64)
    floors = a * n + b
    slack = trace.mu - floors
    scales = np.maximum(np.abs(trace.mu), np.abs(floors))
    ok = slack >= -PASS_RTOL * np.maximum(scales, 1.0)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return DirectCertificate(p=p, n0=None, margin=float(np.max(slack)),
                                 n0_max=n0_max, trace=trace)
    i = int(idx[0])
    return DirectCertificate(p=p, n0=i + 1, margin=float(slack[i]),
                             n0_max=n0_max, trace=trace)


def direct_floor_margin(p: float, n0: int) -> float:
    """Raw slack mu_{n0} - (a n0 + b), or -inf if the trace dies first."""
    if n0 < 1:
        raise ValueError("need n0 >= 1")
    trace = mu_direct(p, n0)
    if trace.mu.shape[0] < n0 or (trace.first_violation is not None
                                  and trace.first_violation <= n0):
        return -math.inf
    a, b = direct_floor(p)
    return float(trace.mu[n0 - 1]) - (a * n0 + b)


def threshold_margin(p: float) -> float:
    """Closed-form margin whose nonnegativity is the n0 = 2 floor test:

        2^(p/(1-p)) (((1-p)/p)^(1/(1-p)) - (1-p)/p)
            - (1 + (3 - 1/p)/2)^(1/(1-p)).

    Positive up to a threshold just above p = 0.346.
    """
    if not (1.0 / 3.0 < p < 0.5):
        raise ValueError("need 1/3 < p < 1/2")
    t = (1.0 - p) / p
    e = 1.0 / (1.0 - p)
    return 2.0 ** (p / (1.0 - p)) * (t ** e - t) - (1.0 + (3.0 - 1.0 / p) / 2.0) ** e


def bracket_threshold(lo: float = 0.346, hi: float = 0.35,
                      width: float = 1e-4) -> tuple[float, float]:
    """Bisect the sign change of threshold_margin inside [lo, hi]."""
    if not (threshold_margin(lo) >= 0.0 > threshold_margin(hi)):
        raise ValueError("threshold_margin does not change sign on [lo, hi]")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if threshold_margin(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo, hi


# ----------------------------------------------------------------------
# Dual route


def mu_dual(p: float, N: int) -> MuTrace:
    """Dual-route trace; the certificate needs mu_n > 0 for n >= 2.

    The stronger comparison mu_n - n^p is reported as an informational
    margin only (it is what a linear-floor argument would eventually
    give, but the certificate itself does not require it).
    """
    if not (1.0 / 3.0 <= p < 1.0):
        raise ValueError("need 1/3 <= p < 1")
    if N < 1:
        raise ValueError("need N >= 1")
    shift = (1.0 / p - 1.0) ** (p / (p - 1.0))
    e1 = 1.0 / (1.0 - p)
    mu = [0.0]
    margins = [math.inf]        # n = 1 is unconstrained (mu_1 = 0 by design)
    violation = None
    for n in range(1, N + 1):
        if n >= 2:
            m = mu[-1]
            margins.append(m)
            if not (m > 0.0):
                violation = n
                break
        if n == N:
            break
        nxt = (float(n) ** (-p) + mu[-1] ** (1.0 - p)) ** e1 - shift
        mu.append(nxt)
    arr = np.array(mu)
    k = arr.shape[0]
    aux = arr - np.arange(1, k + 1, dtype=np.float64) ** p
    return MuTrace(mu=arr, constraint="mu > 0 (n >= 2)",
                   margins=np.array(margins), first_violation=violation,
                   aux_constraint="mu - n^p (informational)", aux_margins=aux)


def shift_gap(y: float, p: float, c: float) -> float:
    """f(y) = (1/p-1) y + (1+cy)^(1-p) - (1+(c+1/p)y)^(1-p).

    f(0) = f'(0) = 0; nonnegativity on (0, 1/n0] propagates the linear
    lower bound on the dual trace.  Needs 1 + c y > 0.
    """
    if not (1.0 + c * y > 0.0):
        raise ValueError("shift gap needs 1 + c*y > 0")
    e = 1.0 - p
    return (1.0 / p - 1.0) * y + (1.0 + c * y) ** e - (1.0 + (c + 1.0 / p) * y) ** e


@dataclass(frozen=True)
class DualFeasibility:
    """Margins of the three-part shift condition at one (p, n0, c)."""

    p: float
    n0: int
    c: float
    mu_n0: float
    margins: tuple[float, float, float]
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {"p": self.p, "n0": self.n0, "c": self.c, "mu_n0": self.mu_n0,
                "margins": list(self.margins), "pass": self.passed,
                "note": self.note}


def dual_feasible(p: float, n0: int, c: float) -> DualFeasibility:
    """Margins: mu_{n0} - (1/p-1)^(1/(p-1))(n0+c); c + 1/(2p) (strict);
    f(1/n0)."""
    if n0 < 1:
        raise ValueError("need n0 >= 1")
    trace = mu_dual(p, n0)
    if trace.mu.shape[0] < n0:
        return DualFeasibility(p=p, n0=n0, c=c, mu_n0=math.nan,
                               margins=(-math.inf,) * 3, passed=False,
                               note=f"trace dies at n={trace.first_violation}")
    mu_n0 = float(trace.mu[n0 - 1])
    slope = (1.0 / p - 1.0) ** (1.0 / (p - 1.0))
    m1 = mu_n0 - slope * (n0 + c)
    m2 = c + 1.0 / (2.0 * p)
    if not (1.0 + c / n0 > 0.0):
        return DualFeasibility(p=p, n0=n0, c=c, mu_n0=mu_n0,
                               margins=(m1, m2, -math.inf), passed=False,
                               note="1 + c/n0 <= 0: shift gap undefined")
    m3 = shift_gap(1.0 / n0, p, c)
    ok = (margin_ok(m1, max(abs(mu_n0), 1.0)) and m2 > 0.0
          and margin_ok(m3, 1.0))
    return DualFeasibility(p=p, n0=n0, c=c, mu_n0=mu_n0,
                           margins=(m1, m2, m3), passed=ok)


@dataclass(frozen=True)
class ShiftSearch:
    """First feasible (n0, c) for the dual shift condition, if any."""

    p: float
    feasible: bool
    n0: int | None
    c: float | None
    c_min: float | None
    c_max: float | None
    margins: tuple[float, float, float] | None
    n0_max: int

    @property
    def pair(self) -> tuple[int, float] | None:
        return (self.n0, self.c) if self.feasible else None


def search_c(p: float, n0_max: int = 10_000) -> ShiftSearch:
    """Scan n0 upward; at each n0 the first condition caps c at

        c_max = mu_{n0} (1/p-1)^(-1/(p-1)) - n0,

    and since f is increasing in c, (n0, c_max) is feasible iff any c is.
    Ties resolve toward larger c, so the returned c is c_max; c_min is
    the bisected lower end of the feasible interval (bounded below by
    the strict -1/(2p) and the domain bound -n0).
    """
    trace = mu_dual(p, n0_max)
    k = trace.mu.shape[0]
    slope = (1.0 / p - 1.0) ** (1.0 / (p - 1.0))
    for n0 in range(1, k + 1):
        if n0 >= 2 and not (trace.mu[n0 - 1] > 0.0):
            break
        c_max = float(trace.mu[n0 - 1]) / slope - n0
        lower = max(-1.0 / (2.0 * p), -float(n0))
        if not (c_max > lower):
            continue
        if shift_gap(1.0 / n0, p, c_max) < 0.0:
            continue
        lo, hi = lower, c_max
        # f(., lo+) may already be feasible; bisect only across a sign
        # change, stepping just inside the open lower end.
        eps = 1e-12 * max(1.0, abs(lower))
        if shift_gap(1.0 / n0, p, lower + eps) >= 0.0:
            c_min = lower
        else:
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if shift_gap(1.0 / n0, p, mid) >= 0.0:
                    hi = mid
                else:
                    lo = mid
            c_min = hi
        verdict = dual_feasible(p, n0, c_max)
        return ShiftSearch(p=p, feasible=True, n0=n0, c=c_max, c_min=c_min,
                           c_max=c_max, margins=verdict.margins,
                           n0_max=n0_max)
    return ShiftSearch(p=p, feasible=False, n0=None, c=None, c_min=None,
                       c_max=None, margins=None, n0_max=n0_max)


# ----------------------------------------------------------------------
# Direct numeric probes


def probe_primal(p: float, s: float, N: int) -> float:
    """Ratio of the primal inequality on x_k = k^(-s) truncated at N.

    Tail truncation only lowers the LHS, so any return below C_p would
    contradict the inequality; values approach C_p from above as
    s -> (1/p)+ and N grows.
    """
    if not (0.0 < p < 1.0):
        raise ValueError("need 0 < p < 1")
    if not (s > 1.0 / p):
        raise ValueError("need s > 1/p")
    if N < 1:
        raise ValueError("need N >= 1")
    n = np.arange(1, N + 1, dtype=np.float64)
    x = n ** (-s)
    inner = suffix_sums(x) / n
    return float(np.sum(inner ** p) / np.sum(x ** p))


def probe_dual(p: float, x) -> float:
    """LHS/RHS ratio of the dual inequality on one positive vector.

    Must stay <= 1 + 1e-10 whenever the inequality holds; entries are
    rescaled by their maximum first (the ratio is scale invariant) to
    keep negative powers of partial sums in range.
    """
    if not (0.0 < p < 1.0):
        raise ValueError("need 0 < p < 1")
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size == 0 or not np.all(arr > 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("x must be a nonempty positive finite vector")
    arr = arr / np.max(arr)
    q = p / (p - 1.0)
    n = np.arange(1, arr.shape[0] + 1, dtype=np.float64)
    y = np.cumsum(arr / n)
    lhs = np.sum(y ** q)
    rhs = (p / (1.0 - p)) ** q * np.sum(arr ** q)
    return float(lhs / rhs)


def certify_report(p: float, method: str = "direct",
                   n0_max: int = N_MAX_DEFAULT) -> dict:
    """CLI-facing summary: {p, certified, n0, c, method, margins, N_max}."""
    if method == "direct":
        cert = certify_direct(p, n0_max)
        return {"p": p, "certified": cert.certified, "n0": cert.n0,
                "c": None, "method": "direct",
                "margins": [cert.margin], "N_max": n0_max}
    if method == "dual-shift":
        found = search_c(p, n0_max)
        return {"p": p, "certified": found.feasible, "n0": found.n0,
                "c": found.c, "method": "dual-shift",
                "margins": list(found.margins) if found.margins else [],
                "N_max": n0_max}
    raise ValueError("method must be 'direct' or 'dual-shift'")


__all__ = [
    "N_MAX_DEFAULT", "hlp_constant", "direct_floor", "mu_direct",
    "DirectCertificate", "certify_direct", "direct_floor_margin",
    "threshold_margin", "bracket_threshold", "mu_dual", "shift_gap",
    "DualFeasibility", "dual_feasible", "ShiftSearch", "search_c",
    "probe_primal", "probe_dual", "certify_report",
]
