"""High-precision oracles and property tests for the primary-factor layer."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concidx import (
    bound13_holds,
    bound19_holds,
    genus_schedule,
    log_abs_primary,
    log_abs_primary_series,
    tail_polynomial,
)
from concidx.primary import GENUS_CAP


def mp_log_abs_primary(w, p, dps=50):
    """Arbitrary-precision reference: log|1-w| + Re sum_{j<=p} w^j/j."""
    with mpmath.workdps(dps):
        wm = mpmath.mpc(w)
        acc = mpmath.log(abs(1 - wm))
        for j in range(1, p + 1):
            acc += (wm**j / j).real
        return float(acc)


# ---------------------------------------------------------------------------
# genus schedule
# ---------------------------------------------------------------------------

def test_genus_schedule_examples():
    assert genus_schedule(1.0, 0.7) == 0
    assert genus_schedule(0.0, 2.0) == 0
    assert genus_schedule(math.e, 0.3) == 1
    assert genus_schedule(math.e**4, 0.5) == 8  # floor(4^1.5)


def test_genus_schedule_guards():
    with pytest.raises(ValueError):
        genus_schedule(2.0, 0.0)
    with pytest.raises(ValueError):
        genus_schedule(-1.0, 1.0)
    with pytest.raises(ValueError):
        genus_schedule(math.exp(700.0), 3.0)  # blows past the genus cap


# ---------------------------------------------------------------------------
# log_abs_primary
# ---------------------------------------------------------------------------

def test_log_abs_primary_trivial_values():
    assert log_abs_primary(0.0, 12) == 0.0
    assert log_abs_primary(-1.0, 0) == pytest.approx(math.log(2.0), rel=1e-15)
    assert log_abs_primary(1.0, 5) == float("-inf")


def test_log_abs_primary_against_high_precision():
    assert log_abs_primary(0.3 + 0.4j, 7) == pytest.approx(
        mp_log_abs_primary(0.3 + 0.4j, 7), abs=1e-12
    )
    rng = np.random.default_rng(314)
    for _ in range(200):
        w = rng.uniform(0.01, 0.9) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        p = int(rng.integers(0, 80))
        assert log_abs_primary(complex(w), p) == pytest.approx(
            mp_log_abs_primary(complex(w), p), abs=1e-12
        )


def test_log_abs_primary_high_genus_small_w_stays_stable():
    # the direct form loses everything here; the series path must not
    w = 0.2 + 0.1j
    p = 200
    got = log_abs_primary(w, p)
    ref = mp_log_abs_primary(w, p, dps=200)
    assert got == pytest.approx(ref, abs=1e-15)


def test_log_abs_primary_conjugation_symmetry():
    rng = np.random.default_rng(99)
    for _ in range(100):
        w = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        p = int(rng.integers(0, 50))
        assert log_abs_primary(w, p) == log_abs_primary(w.conjugate(), p)


def test_log_abs_primary_genus_guard():
    with pytest.raises(ValueError):
        log_abs_primary(0.5, -1)
    with pytest.raises(ValueError):
        log_abs_primary(0.5, GENUS_CAP + 1)


def test_series_and_direct_agree_at_crossover():
    rng = np.random.default_rng(55)
    for _ in range(200):
        aw = rng.uniform(0.45, 0.55)
        w = complex(aw * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        p = int(rng.integers(1, 40))
        direct = math.log(abs(1 - w)) + tail_polynomial(w, p)
        series = log_abs_primary_series(w, p)
        assert abs(direct - series) <= 1e-10
        assert log_abs_primary(w, p) == pytest.approx(series, abs=1e-10)


# ---------------------------------------------------------------------------
# tail_polynomial
# ---------------------------------------------------------------------------

def test_tail_polynomial_examples():
    assert tail_polynomial(123.4 + 5j, 0) == 0.0
    assert tail_polynomial(1.0, 3) == pytest.approx(11.0 / 6.0, rel=1e-15)


def test_tail_polynomial_matches_naive_sum():
    rng = np.random.default_rng(21)
    for _ in range(100):
        w = complex(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2))
        naive = sum((w**j / j).real for j in range(1, 21))
        assert tail_polynomial(w, 20) == pytest.approx(naive, abs=1e-13, rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(
    re=st.floats(-1.0, 1.0),
    im=st.floats(-1.0, 1.0),
    p=st.integers(1, 60),
)
def test_tail_polynomial_increment_property(re, im, p):
    w = complex(re, im)
    inc = tail_polynomial(w, p) - tail_polynomial(w, p - 1)
    expected = (w**p).real / p
    assert inc == pytest.approx(expected, rel=1e-13, abs=1e-13)


# ---------------------------------------------------------------------------
# elementary bounds
# ---------------------------------------------------------------------------

def test_bound13_hand_cases():
    wit = bound13_holds(0.0, 2.0, 5)
    assert wit.holds and wit.lhs == 0.0
    wit = bound13_holds(0.9, 1.1, 1)
    assert wit.holds and wit.lhs == pytest.approx(0.9) and wit.rhs == pytest.approx(2.2)


def test_bound13_preconditions():
    with pytest.raises(ValueError):
        bound13_holds(0.5, 1.0, 3)
    with pytest.raises(ValueError):
        bound13_holds(2.0, 1.5, 3)
    with pytest.raises(ValueError):
        bound13_holds(0.5, 2.0, 0)


def test_bound13_sampled_domain():
    rng = np.random.default_rng(13013)
    bad = 0
    for _ in range(10000):
        a = float(rng.uniform(1.0 + 1e-9, 10.0))
        p = int(rng.integers(1, 201))
        w = a * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        if abs(w) >= a:
            continue
        if not bound13_holds(complex(w), a, p).holds:
            bad += 1
    assert bad == 0


def test_bound19_hand_case():
    wit = bound19_holds(0.5, 1)
    assert wit.holds
    assert wit.lhs == pytest.approx(abs(0.5 - math.log(2.0)), abs=1e-12)
    assert wit.rhs == pytest.approx(0.25)


def test_bound19_preconditions():
    with pytest.raises(ValueError):
        bound19_holds(0.9, 1)  # |w| > 1/2 with p = 1
    with pytest.raises(ValueError):
        bound19_holds(0.1, 0)


def test_bound19_sampled_domain():
    rng = np.random.default_rng(19019)
    bad = 0
    for _ in range(10000):
        p = int(rng.integers(1, 65))
        cap = p / (p + 1.0)
        w = cap * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        if not bound19_holds(complex(w), p).holds:
            bad += 1
    assert bad == 0


@settings(max_examples=60, deadline=None)
@given(
    aw=st.floats(0.0, 0.45),
    theta=st.floats(0.0, 2 * math.pi),
    p=st.integers(1, 64),
)
def test_bound19_property(aw, theta, p):
    w = complex(aw * math.cos(theta), aw * math.sin(theta))
    assert bound19_holds(w, p).holds
