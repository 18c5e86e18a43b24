"""Lower triangular factorable matrices.

A factorable matrix here is determined by two positive sequences a, b:

    M[n, k] = b_k / a_n   for k <= n,   0 otherwise   (indices 1-based).

Applying M to a vector only needs one running prefix sum of b_k x_k, so
the matrix is never materialized.  The adjoint apply needs one suffix sum.

Constructors cover the families the certificates target:

    weighted_mean(w):        a_n = Lam_n, b_k = lam_k        (rows sum to 1)
    copson_matrix(w, p, c):  a_n = lam_n^(-1/p) Lam_n^(c/p),
                             b_k = lam_k^(1-1/p) Lam_k^(-(1-c/p))
    bge_matrix(w, p, alpha): a_n = lam_n^(1-1/p) Lam_n^alpha
                                   / (Lam_n^alpha - Lam_{n-1}^alpha),
                             b_k = lam_k^(1-1/p)
    hlp_dual_matrix(N):      a_n = 1, b_k = 1/k

weighted_mean with constant weights is the Cesaro matrix (entries 1/n).
copson_matrix and bge_matrix are normalized (a_1 = b_1) for every weight
sequence; their diagonal ratios a_n/b_n are Lam_n/lam_n and
1/(1 - (Lam_{n-1}/Lam_n)^alpha) respectively.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .sequences import WeightSequence

_DENSE_LIMIT = 4096  # to_dense is a test/debug aid, not a compute path


@dataclass(frozen=True)
class FactorableSpec:
    """Positive row divisors a_n and column factors b_k of a factorable matrix."""

    kind: str
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a, b = self.a, self.b
        if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape or a.shape[0] < 1:
            raise ValueError("a and b must be 1-d arrays of equal positive length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("a and b must be finite")
        if np.any(a <= 0.0) or np.any(b <= 0.0):
            raise ValueError("a and b must be positive")
        a.setflags(write=False)
        b.setflags(write=False)

    @property
    def N(self) -> int:
        return int(self.a.shape[0])

    @property
    def normalized(self) -> bool:
        """a_1 = b_1, required by the product and stepwise certificates."""
        a1, b1 = float(self.a[0]), float(self.b[0])
        return abs(a1 - b1) <= 1e-12 * max(abs(a1), abs(b1))

    @property
    def row_ratios(self) -> np.ndarray:
        """Diagonal ratios a_n / b_n."""
        return self.a / self.b

    def entry(self, n: int, k: int) -> float:
        """Matrix entry at 1-based position (n, k)."""
        if not (1 <= k and 1 <= n <= self.N and k <= self.N):
            raise IndexError(f"indices out of range: ({n}, {k})")
        if k > n:
            return 0.0
        return float(self.b[k - 1] / self.a[n - 1])

    def apply(self, x) -> np.ndarray:
        """y_n = (1/a_n) sum_{k<=n} b_k x_k via one running prefix sum."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.N,):
            raise ValueError(f"x must have shape ({self.N},), got {x.shape}")
        return np.cumsum(self.b * x) / self.a

    def adjoint_apply(self, z) -> np.ndarray:
        """(M^T z)_k = b_k sum_{n>=k} z_n / a_n via one suffix sum."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.N,):
            raise ValueError(f"z must have shape ({self.N},), got {z.shape}")
        return self.b * np.cumsum((z / self.a)[::-1])[::-1]

    def to_dense(self) -> np.ndarray:
        """Materialize the matrix; guarded, for small-N oracle checks only."""
        if self.N > _DENSE_LIMIT:
            raise ValueError(f"refusing to materialize N={self.N} > {_DENSE_LIMIT}")
        m = np.tril(np.outer(1.0 / self.a, self.b))
        return m

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "a": [repr(float(v)) for v in self.a],
            "b": [repr(float(v)) for v in self.b],
            "N": self.N,
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "FactorableSpec":
        payload = json.loads(text)
        a = np.array([float(v) for v in payload["a"]], dtype=np.float64)
        b = np.array([float(v) for v in payload["b"]], dtype=np.float64)
        if int(payload["N"]) != a.shape[0]:
            raise ValueError("N does not match sequence length")
        return FactorableSpec(kind=str(payload["kind"]), a=a, b=b)


def weighted_mean(w: WeightSequence) -> FactorableSpec:
    """Rows are weighted averages: entries lam_k / Lam_n."""
    return FactorableSpec(kind="weighted_mean", a=w.partials.copy(), b=w.values.copy())


def copson_matrix(w: WeightSequence, p: float, c: float) -> FactorableSpec:
    """The factorable matrix whose l^p bound (p/(c-1))^p encodes the
    Copson inequality with weight exponent c; c = p with constant weights
    recovers the Cesaro matrix."""
    if not (p > 1.0):
        raise ValueError("copson_matrix needs p > 1")
    if not (c > 1.0):
        raise ValueError("copson_matrix needs c > 1")
    lam, Lam = w.values, w.partials
    a = lam ** (-1.0 / p) * Lam ** (c / p)
    b = lam ** (1.0 - 1.0 / p) * Lam ** (-(1.0 - c / p))
    return FactorableSpec(kind=f"copson(p={p:g},c={c:g})", a=a, b=b)


def bge_matrix(w: WeightSequence, p: float, alpha: float) -> FactorableSpec:
    """The factorable matrix behind the power-difference inequality with
    exponent alpha; its l^p bound target is (alpha*p/(p-1))^p."""
    if not (p > 1.0):
        raise ValueError("bge_matrix needs p > 1")
    if not (alpha > 0.0):
        raise ValueError("bge_matrix needs alpha > 0")
    lam, Lam = w.values, w.partials
    prev = np.concatenate(([0.0], Lam[:-1]))
    diff = Lam ** alpha - prev ** alpha
    if np.any(diff <= 0.0):
        raise ValueError("power differences must stay positive")
    base = lam ** (1.0 - 1.0 / p)
    a = base * Lam ** alpha / diff
    b = base.copy()
    return FactorableSpec(kind=f"bge(p={p:g},alpha={alpha:g})", a=a, b=b)


def hlp_dual_matrix(N: int) -> FactorableSpec:
    """Prefix sums of x_k/k: the transpose companion of the harmonic kernel
    used on the 0 < p < 1 side (probed there with negative exponents)."""
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    a = np.ones(N, dtype=np.float64)
    b = 1.0 / np.arange(1, N + 1, dtype=np.float64)
    return FactorableSpec(kind="hlp_dual", a=a, b=b)


def cesaro(N: int) -> FactorableSpec:
    """Convenience: the Cesaro matrix, entries 1/n for k <= n."""
    a = np.arange(1, N + 1, dtype=np.float64)
    b = np.ones(N, dtype=np.float64)
    return FactorableSpec(kind="cesaro", a=a, b=b)


def norm_upper_hardy(p: float, L: float) -> float:
    """The certified bound p/(p-L) that every certificate here targets."""
    if not (p > 1.0 and 0.0 < L < p):
        raise ValueError("need p > 1 and 0 < L < p")
    return p / (p - L)


def _require_normalized(spec: FactorableSpec, what: str):
    if not spec.normalized:
        raise ValueError(f"{what} needs a normalized spec (a_1 = b_1); "
                         f"got a_1={spec.a[0]!r}, b_1={spec.b[0]!r}")


__all__ = [
    "FactorableSpec", "weighted_mean", "copson_matrix", "bge_matrix",
    "hlp_dual_matrix", "cesaro", "norm_upper_hardy",
]
