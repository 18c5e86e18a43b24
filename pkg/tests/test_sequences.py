"""Weight sequence construction, partial sums, and tail identities."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpcert import build_weights, comp_cumsum, load_weight_file, averages

finite_weights = st.lists(
    st.floats(min_value=1e-3, max_value=1e3, allow_nan=False,
              allow_infinity=False),
    min_size=1, max_size=64,
)


def test_constant_weights_partials_and_ratios():
    w = build_weights("constant", 6)
    assert np.array_equal(w.values, np.ones(6))
    assert np.array_equal(w.partials, np.arange(1, 7, dtype=float))
    assert np.array_equal(w.ratios, np.arange(1, 7, dtype=float))
    # tails count the remaining indices including n
    assert np.array_equal(w.tails, np.arange(6, 0, -1, dtype=float))


def test_power_weights_match_direct_formula():
    w = build_weights("power", 10, exponent=2.0)
    n = np.arange(1, 11, dtype=float)
    assert np.allclose(w.values, n ** 2, rtol=0, atol=0)
    assert np.allclose(w.partials, np.cumsum(n ** 2), rtol=1e-15)


def test_geometric_weights_start_at_ratio():
    w = build_weights("geometric", 4, ratio=3.0)
    assert np.allclose(w.values, [3.0, 9.0, 27.0, 81.0], rtol=0)


def test_explicit_weights_round_trip():
    vals = np.array([0.5, 1.25, 0.75])
    w = build_weights("explicit", 3, values=vals, label="abc")
    assert w.label == "abc"
    assert np.array_equal(w.values, vals)


@pytest.mark.parametrize("kind,kwargs", [
    ("power", {"exponent": -1.5}),
    ("geometric", {"ratio": 0.0}),
    ("geometric", {"ratio": -2.0}),
    ("unknown", {}),
])
def test_bad_parameters_rejected(kind, kwargs):
    with pytest.raises(ValueError):
        build_weights(kind, 5, **kwargs)


def test_nonpositive_values_rejected():
    with pytest.raises(ValueError):
        build_weights("explicit", 3, values=np.array([1.0, 0.0, 2.0]))
    with pytest.raises(ValueError):
        build_weights("explicit", 2, values=np.array([1.0, -1.0]))


@given(finite_weights)
@settings(max_examples=200, deadline=None)
def test_partials_match_exact_fraction_cumsum(vals):
    w = build_weights("explicit", len(vals), values=np.array(vals))
    exact = []
    total = Fraction(0)
    for v in vals:
        total += Fraction(v)
        exact.append(float(total))
    assert np.allclose(w.partials, exact, rtol=1e-13, atol=0.0)


@given(finite_weights)
@settings(max_examples=200, deadline=None)
def test_tail_plus_previous_partial_is_total(vals):
    w = build_weights("explicit", len(vals), values=np.array(vals))
    total = w.partials[-1]
    # tails[n] counts indices n..N, so tails[n] + partials[n-1] = total
    recomposed = w.tails.copy()
    recomposed[1:] += w.partials[:-1]
    assert np.allclose(recomposed, total, rtol=1e-12)


@given(finite_weights)
@settings(max_examples=200, deadline=None)
def test_ratio_families_bounded_below_by_one(vals):
    w = build_weights("explicit", len(vals), values=np.array(vals))
    assert np.all(w.ratios >= 1.0 - 1e-12)
    assert np.all(w.tail_ratios >= 1.0 - 1e-12)
    assert np.all(np.diff(w.partials) > 0.0)


def test_comp_cumsum_beats_naive_on_adversarial_input():
    vals = np.array([1e16, 1.0, -1e16, 1.0])
    out = comp_cumsum(vals)
    assert out[-1] == 2.0


def test_averages_bundle_matches_direct_sums():
    w = build_weights("power", 5, exponent=1.0)
    x = np.array([2.0, 0.5, 1.0, 3.0, 0.25])
    b = averages(w, x)
    lam = w.values
    direct_prefix = [float(np.sum(lam[:n] * x[:n]) / w.partials[n - 1])
                     for n in range(1, 6)]
    direct_tail = [float(np.sum(lam[n - 1:] * x[n - 1:]) / w.tails[n - 1])
                   for n in range(1, 6)]
    direct_dual_prefix = [float(lam[n - 1] * np.sum(x[n - 1:] /
                                                    w.partials[n - 1:]))
                          for n in range(1, 6)]
    direct_dual_tail = [float(lam[n - 1] * np.sum(x[:n] / w.tails[:n]))
                        for n in range(1, 6)]
    assert np.allclose(b.prefix_mean, direct_prefix, rtol=1e-13)
    assert np.allclose(b.tail_mean, direct_tail, rtol=1e-13)
    assert np.allclose(b.dual_prefix, direct_dual_prefix, rtol=1e-13)
    assert np.allclose(b.dual_tail, direct_dual_tail, rtol=1e-13)


def test_weight_file_parsing(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("# header\n1.5\n\n2.5  # inline note\n4\n", encoding="utf-8")
    w = load_weight_file(str(path))
    assert np.allclose(w.values, [1.5, 2.5, 4.0], rtol=0)


def test_weight_file_rejects_nonpositive(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("1.0\n-2.0\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_weight_file(str(path))
