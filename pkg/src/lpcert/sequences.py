"""Weight sequences and the averaged transforms built from them.

A weight sequence is a finite positive sequence lam_1..lam_N together with
its partial sums Lam_n = lam_1 + ... + lam_n and the truncated tail sums
Lam*_n = lam_n + ... + lam_N.  Four averaged transforms of an input vector
x are used throughout the package:

    prefix_mean[n] = (1/Lam_n)   * sum_{k<=n} lam_k x_k
    tail_mean[n]   = (1/Lam*_n)  * sum_{k>=n} lam_k x_k
    dual_prefix[n] = lam_n * sum_{k>=n} x_k / Lam_k
    dual_tail[n]   = lam_n * sum_{k<=n} x_k / Lam*_k

All tail sums are truncated at N; there is no extrapolation.  Partial sums
of the weights use compensated summation (see _num.comp_cumsum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._num import comp_cumsum

WEIGHT_KINDS = ("constant", "power", "geometric", "explicit")


@dataclass(frozen=True)
class WeightSequence:
    """A positive weight sequence with precomputed partial and tail sums."""

    kind: str
    values: np.ndarray    # lam_1..lam_N
    partials: np.ndarray  # Lam_n
    tails: np.ndarray     # Lam*_n, truncated at N
    label: str = ""

    def __post_init__(self):
        for arr in (self.values, self.partials, self.tails):
            arr.setflags(write=False)

    @property
    def N(self) -> int:
        return int(self.values.shape[0])

    @property
    def ratios(self) -> np.ndarray:
        """Lam_n / lam_n."""
        return self.partials / self.values

    @property
    def tail_ratios(self) -> np.ndarray:
        """Lam*_n / lam_n."""
        return self.tails / self.values

    def __repr__(self):
        tag = self.label or self.kind
        return f"WeightSequence({tag}, N={self.N})"


def _finish(kind: str, lam: np.ndarray, label: str) -> WeightSequence:
    if lam.ndim != 1 or lam.shape[0] < 1:
        raise ValueError("weights must form a nonempty 1-d sequence")
    if not np.all(np.isfinite(lam)):
        raise ValueError("weights must be finite (overflow in construction?)")
    if np.any(lam <= 0.0):
        raise ValueError("weights must be positive")
    partials = comp_cumsum(lam)
    tails = comp_cumsum(lam[::-1])[::-1]
    return WeightSequence(kind=kind, values=lam, partials=partials,
                          tails=tails, label=label)


def build_weights(kind: str, N: int, *, exponent: float | None = None,
                  ratio: float | None = None,
                  values=None, label: str = "") -> WeightSequence:
    """Construct one of the supported weight families at truncation N.

    kind "constant":  lam_n = 1
    kind "power":     lam_n = n**exponent, exponent > -1
    kind "geometric": lam_n = ratio**n, ratio > 0
    kind "explicit":  lam_n = values[n-1], all positive
    """
    if not isinstance(N, int) or N < 1:
        raise ValueError(f"truncation N must be a positive integer, got {N!r}")
    if kind == "constant":
        lam = np.ones(N, dtype=np.float64)
        label = label or "constant"
    elif kind == "power":
        if exponent is None or not math.isfinite(exponent) or exponent <= -1.0:
            raise ValueError("power weights need exponent > -1")
        lam = np.arange(1, N + 1, dtype=np.float64) ** float(exponent)
        label = label or f"power:{exponent:g}"
    elif kind == "geometric":
        if ratio is None or not math.isfinite(ratio) or ratio <= 0.0:
            raise ValueError("geometric weights need ratio > 0")
        lam = float(ratio) ** np.arange(1, N + 1, dtype=np.float64)
        label = label or f"geometric:{ratio:g}"
    elif kind == "explicit":
        if values is None:
            raise ValueError("explicit weights need values")
        lam = np.array(values, dtype=np.float64).reshape(-1)
        if lam.shape[0] != N:
            raise ValueError(f"expected {N} values, got {lam.shape[0]}")
        label = label or "explicit"
    else:
        raise ValueError(f"unknown weight kind {kind!r}; expected one of {WEIGHT_KINDS}")
    return _finish(kind, lam, label)


def load_weight_file(path: str) -> WeightSequence:
    """Read an explicit weight list: one positive decimal per line.

    UTF-8 text, LF newlines, '#' starts a comment, blank lines ignored.
    Values are parsed exactly once; serialization round-trips use repr.
    """
    vals: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for ln, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            try:
                v = float(body)
            except ValueError as exc:
                raise ValueError(f"{path}:{ln}: not a decimal number: {body!r}") from exc
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{path}:{ln}: weights must be positive and finite")
            vals.append(v)
    if not vals:
        raise ValueError(f"{path}: no weights found")
    return build_weights("explicit", len(vals), values=vals, label=f"file:{path}")


@dataclass(frozen=True)
class AveragesBundle:
    """The four averaged transforms of one input vector."""

    x: np.ndarray
    prefix_mean: np.ndarray
    tail_mean: np.ndarray
    dual_prefix: np.ndarray
    dual_tail: np.ndarray


def averages(w: WeightSequence, x) -> AveragesBundle:
    """Compute all four averaged transforms of x against w (O(N) each)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (w.N,):
        raise ValueError(f"x must have shape ({w.N},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    lam = w.values
    lx = lam * x
    prefix_mean = np.cumsum(lx) / w.partials
    tail_mean = np.cumsum(lx[::-1])[::-1] / w.tails
    dual_prefix = lam * np.cumsum((x / w.partials)[::-1])[::-1]
    dual_tail = lam * np.cumsum(x / w.tails)
    return AveragesBundle(x=x, prefix_mean=prefix_mean, tail_mean=tail_mean,
                          dual_prefix=dual_prefix, dual_tail=dual_tail)
