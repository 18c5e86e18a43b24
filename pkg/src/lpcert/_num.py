"""Shared numeric helpers.

Everything here is binary64 only.  Partial sums of weights use Neumaier
compensation so that ratios like Lam_n/lam_n keep close to full precision
even for slowly growing weights at large truncations.  Fractional powers
of positive scalars go through exp(e*log(b)) with an explicit domain
check rather than relying on libm pow edge cases.
"""

from __future__ import annotations

import math
import os

import numpy as np

# Relative slack used when a certificate condition is tested for pass/fail.
# Margins themselves are always reported raw.
PASS_RTOL = 1e-12


def comp_cumsum(values) -> np.ndarray:
    """Running sums of a 1-d array with Neumaier compensation."""
    arr = np.asarray(values, dtype=np.float64)
    out = np.empty(arr.shape[0], dtype=np.float64)
    total = 0.0
    comp = 0.0
    for i in range(arr.shape[0]):
        v = float(arr[i])
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = total + comp
    return out


def rev_cumsum(values) -> np.ndarray:
    """Compensated suffix sums: out[i] = values[i] + ... + values[-1]."""
    arr = np.asarray(values, dtype=np.float64)
    return comp_cumsum(arr[::-1])[::-1]


def suffix_sums(values) -> np.ndarray:
    """Plain vectorized suffix sums along the last axis.

    Used for bulk trial evaluation where the compensated 1-d variant
    would dominate the runtime; weight partials always go through
    comp_cumsum/rev_cumsum instead.
    """
    arr = np.asarray(values, dtype=np.float64)
    return np.cumsum(arr[..., ::-1], axis=-1)[..., ::-1]


def fpow(base: float, expo: float) -> float:
    """base**expo for base > 0 via exp/log; raises on a nonpositive base."""
    if base <= 0.0:
        if base == 0.0 and expo > 0.0:
            return 0.0
        raise ValueError(f"fractional power needs a positive base, got {base!r}")
    return math.exp(expo * math.log(base))


def margin_ok(margin: float, scale: float, rtol: float = PASS_RTOL) -> bool:
    """Pass test for `margin >= 0` with relative slack against `scale`."""
    if not math.isfinite(margin):
        return False
    return margin >= -rtol * max(abs(scale), 1.0)


def first_bad(margins: np.ndarray, scales: np.ndarray, rtol: float = PASS_RTOL):
    """Index (0-based) of the first margin failing `margin_ok`, or None."""
    scales = np.maximum(np.abs(scales), 1.0)
    bad = ~(margins >= -rtol * scales)
    bad |= ~np.isfinite(margins)
    idx = np.flatnonzero(bad)
    return int(idx[0]) if idx.size else None


def thread_count() -> int:
    """Worker cap taken from the THREADS environment variable."""
    raw = os.environ.get("THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
            if n >= 1:
                return n
        except ValueError:
            pass
    return os.cpu_count() or 1
