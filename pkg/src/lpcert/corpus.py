"""Built-in weight corpus for cross-checking the certificate family.

builtin_corpus returns fifty positive nondecreasing-partial weight
sequences: six deterministic profiles (constant, powers n^a for
a in {0.5, 1, 2}, geometric ratios 1.1 and 2) plus forty-four seeded
random-monotone sequences whose weights are cumulative sums of uniform
increments, so their ratios Lam_n/lam_n vary irregularly but stay well
behaved.

comparability_pair constructs two explicit weight sequences separating
the stepwise p = 2 test from the ratio test.  Both are built by
prescribing the ratio profile R_n = Lam_n/lam_n directly: with lam_1 = 1
and lam_{n+1} = Lam_n/(R_{n+1} - 1), any profile with R_1 = 1 and
R_{n+1} > 1 is realized exactly.  Profile A jumps 1, 2, 3.2 then climbs
by unit steps: at L = 1, p = 2 the stepwise test passes while the ratio
test fails at the 3.2 -> 4.2 step.  Profile B jumps 1, 2.4 then climbs
by unit steps: the ratio test passes while the stepwise test fails at
the first step.  Neither test implies the other.
"""

from __future__ import annotations

import numpy as np

from .sequences import WeightSequence, build_weights

CORPUS_SIZE = 50
CORPUS_N = 256
CORPUS_SEED = 7


def builtin_corpus(N: int = CORPUS_N, seed: int = CORPUS_SEED) -> list[WeightSequence]:
    """Fifty weight sequences: six deterministic plus seeded random."""
    if N < 2:
        raise ValueError("need N >= 2")
    out = [
        build_weights("constant", N, label="constant"),
        build_weights("power", N, exponent=0.5, label="power-0.5"),
        build_weights("power", N, exponent=1.0, label="power-1"),
        build_weights("power", N, exponent=2.0, label="power-2"),
        build_weights("geometric", N, ratio=1.1, label="geometric-1.1"),
        build_weights("geometric", N, ratio=2.0, label="geometric-2"),
    ]
    rng = np.random.default_rng(seed)
    for i in range(CORPUS_SIZE - len(out)):
        increments = rng.uniform(0.0, 1.0, size=N)
        values = 0.05 + np.cumsum(increments)
        out.append(build_weights("explicit", N, values=values,
                                 label=f"random-monotone-{i + 1}"))
    return out


def weights_from_ratios(R, label: str = "") -> WeightSequence:
    """Realize a prescribed ratio profile R_n = Lam_n/lam_n exactly.

    Needs R_1 = 1 and R_{n+1} > 1; then lam_1 = 1 and
    lam_{n+1} = Lam_n/(R_{n+1} - 1) reproduce the profile.
    """
    prof = np.asarray(R, dtype=np.float64).reshape(-1)
    if prof.size < 1 or abs(prof[0] - 1.0) > 1e-12:
        raise ValueError("ratio profile must start at R_1 = 1")
    if prof.size > 1 and not np.all(prof[1:] > 1.0):
        raise ValueError("ratio profile needs R_n > 1 for n >= 2")
    lam = [1.0]
    total = 1.0
    for r in prof[1:]:
        nxt = total / (r - 1.0)
        lam.append(nxt)
        total += nxt
    return build_weights("explicit", prof.size, values=np.array(lam),
                         label=label)


def comparability_pair(N: int = 40) -> tuple[WeightSequence, WeightSequence]:
    """(A, B): A passes stepwise p = 2 but fails the ratio test; B the
    reverse.  Both at L = 1, p = 2."""
    if N < 4:
        raise ValueError("need N >= 4")
    ra = np.concatenate(([1.0, 2.0, 3.2], 3.2 + np.arange(1, N - 2)))
    rb = np.concatenate(([1.0, 2.4], 2.4 + np.arange(1, N - 1)))
    a = weights_from_ratios(ra, label="stepwise-only")
    b = weights_from_ratios(rb, label="ratio-only")
    return a, b


__all__ = ["CORPUS_SIZE", "CORPUS_N", "CORPUS_SEED", "builtin_corpus",
           "weights_from_ratios", "comparability_pair"]
