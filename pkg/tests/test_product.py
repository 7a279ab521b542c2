"""Product evaluation, five-region decomposition, and the local identities."""

import math

import mpmath
import numpy as np
import pytest

from concidx import (
    DomainError,
    PointMeasure,
    circle_average,
    decompose,
    eval_v,
    eval_v_many,
    integrated_counting,
    midgap_radius,
    product_field,
    v1_via_parts,
)
from concidx.product import atom_genera, region_masks

ETA = 1.1
DELTA_EXP = 1.0


def naive_eval_v(mu, eta, z, dps=60):
    """From-scratch reference: brute-force n, genus, and factors in mpmath."""
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for loc, m in zip(mu.locations, mu.masses):
            n_here = sum(
                float(mm) for ll, mm in zip(mu.locations, mu.masses) if abs(ll) <= abs(loc)
            )
            if n_here <= 1.0:
                p = 0
            else:
                p = int(mpmath.floor(mpmath.log(n_here) ** (1.0 + eta)))
            w = mpmath.mpc(z) / mpmath.mpc(loc)
            term = mpmath.log(abs(1 - w))
            for j in range(1, p + 1):
                term += (w**j / j).real
            total += m * term
        return float(total)


# ---------------------------------------------------------------------------
# eval_v
# ---------------------------------------------------------------------------

def test_eval_v_empty_measure():
    assert eval_v(PointMeasure([], 5.0), 1.0, 3 + 4j) == 0.0


def test_eval_v_single_atom_closed_form():
    mu = PointMeasure([(2.0 + 0j, 1.0)], 10.0)
    assert eval_v(mu, 1.0, 0.0) == 0.0
    assert eval_v(mu, 1.0, 4.0) == pytest.approx(0.0, abs=1e-15)
    assert eval_v(mu, 1.0, 6.0) == pytest.approx(math.log(2.0), rel=1e-14)
    assert eval_v(mu, 1.0, 2.0) == float("-inf")  # atom location


def test_eval_v_matches_naive_recomputation(mu5):
    for z in (2.5 + 0.1j, -3.1 + 0.4j, 0.2 + 3.6j):
        got = eval_v(mu5, ETA, z)
        ref = naive_eval_v(mu5, ETA, z)
        assert got == pytest.approx(ref, rel=1e-11, abs=1e-11)


def test_atom_genera_uses_closed_disk_counts():
    mu = PointMeasure([(2.0 + 0j, 4.0), (-2.0 + 0j, 4.0), (3.0 + 0j, 1.0)], 5.0)
    g = atom_genera(mu, 1.0)
    # tied moduli count each other: n = 8 at modulus 2, n = 9 at modulus 3
    assert g[0] == g[1] == math.floor(math.log(8.0) ** 2)
    assert g[2] == math.floor(math.log(9.0) ** 2)


def test_product_field_harmonic_addend(mu5):
    base = product_field(mu5, ETA)
    shifted = product_field(mu5, ETA, harmonic_coeffs=[1.0, 2.0])
    z = 2.5 + 0.3j
    assert shifted(z) == pytest.approx(base(z) + (1.0 + 2.0 * z).real, rel=1e-12)
    zs = np.array([2.5 + 0.3j, -1.0 + 2.0j])
    np.testing.assert_allclose(
        shifted(zs), base(zs) + (1.0 + 2.0 * zs).real, rtol=1e-12
    )


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------

def test_decompose_partition_identity(mu6):
    rng = np.random.default_rng(4242)
    for r in (4.0, 4.5, 5.0):
        for theta in rng.uniform(0, 2 * math.pi, 20):
            z = r * complex(math.cos(theta), math.sin(theta))
            rep = decompose(mu6, ETA, DELTA_EXP, z)
            assert rep.bigR == rep.r + rep.delta
            assert rep.v_sum == pytest.approx(
                rep.v_direct, abs=1e-9 * max(1.0, abs(rep.v_direct))
            )
            masses = rep.mass_A1 + rep.mass_A3 + rep.mass_A4 + rep.mass_A5
            assert masses == pytest.approx(mu6.total_mass, rel=1e-12)


def test_region_exclusivity(mu6):
    rng = np.random.default_rng(7)
    for _ in range(20):
        z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        delta = rng.uniform(0.1, 2.0)
        masks = region_masks(mu6, z, delta, abs(z) + delta)
        stacked = np.sum(np.stack(masks).astype(int), axis=0)
        assert np.all(stacked == 1)


def test_decompose_domain_gate():
    mu = PointMeasure([(2.0 + 0j, 1.0)], 5.0)
    with pytest.raises(DomainError):
        decompose(mu, 1.0, 1.0, 3.0 + 0j)


def test_decompose_all_mass_outside_bigR():
    mu = PointMeasure([(4.0 + 0j, 1.0), (5j, 2.0)], 6.0)
    rep = decompose(mu, 1.0, 1.0, 2.0 + 0j, delta=0.5)
    assert rep.v1 == rep.v2 == rep.v3 == rep.v4 == 0.0
    assert rep.mass_A5 == mu.total_mass
    assert rep.v5 == pytest.approx(rep.v_direct, rel=1e-12)


def test_decompose_all_mass_in_local_disk():
    mu = PointMeasure([(2.8 + 0j, 1.0), (3.1 + 0j, 1.0), (2.9 + 0.1j, 1.0)], 6.0)
    rep = decompose(mu, 1.0, 1.0, 3.0 + 0.05j, delta=1.0)
    assert rep.v3 == rep.v4 == rep.v5 == 0.0
    assert rep.mass_A1 == mu.total_mass
    assert rep.v1 + rep.v2 == pytest.approx(rep.v_direct, abs=1e-12)


def test_v2_frozen_differs_when_genus_varies(mu6):
    # atoms inside the local disk straddle several n-levels, so the frozen
    # central genus and the per-atom genera disagree somewhere
    rep = decompose(mu6, ETA, DELTA_EXP, 4.5 + 0.3j)
    assert rep.mass_A1 > 0
    assert rep.v2_frozen != rep.v2


# ---------------------------------------------------------------------------
# v1_via_parts
# ---------------------------------------------------------------------------

def test_v1_via_parts_empty_local_disk():
    # all mass at modulus 2, z far away: nothing within delta
    mu = PointMeasure([(2.0 + 0j, 3.0)], 40.0)
    z = 30.0 + 0j
    assert v1_via_parts(mu, 1.0, z) == 0.0


def test_v1_via_parts_single_atom_hand_case():
    # one massive atom (mass 3 so the schedule gate n >= 3 holds)
    xi0 = 2.9 + 0.2j
    mu = PointMeasure([(xi0, 3.0)], 10.0)
    z = 3.0 + 0j
    got = v1_via_parts(mu, 1.0, z)
    expected = 3.0 * (math.log(abs(z - xi0)) - math.log(abs(xi0)))
    assert got == pytest.approx(expected, rel=1e-12)


def test_v1_via_parts_matches_decompose(mu6):
    rng = np.random.default_rng(515)
    checked = 0
    for _ in range(50):
        r = rng.uniform(3.5, 5.5)
        theta = rng.uniform(0, 2 * math.pi)
        z = r * complex(math.cos(theta), math.sin(theta))
        rep = decompose(mu6, ETA, DELTA_EXP, z)
        got = v1_via_parts(mu6, DELTA_EXP, z)
        assert got == pytest.approx(rep.v1, abs=1e-9 * max(1.0, abs(rep.v1)))
        checked += 1
    assert checked == 50


def test_v1_via_parts_atom_at_z_is_neg_inf():
    mu = PointMeasure([(3.0 + 0j, 3.0)], 10.0)
    assert v1_via_parts(mu, 1.0, 3.0 + 0j) == float("-inf")


# ---------------------------------------------------------------------------
# local annulus / middle region bounds
# ---------------------------------------------------------------------------

def test_middle_region_log_bound(mu6):
    # atoms in C(0,r) off the local disk: |log|1-z/xi|| <= 2(loglog n(r)+log r)
    rng = np.random.default_rng(66)
    from concidx import n_of_r

    for _ in range(20):
        r = rng.uniform(4.2, 5.5)
        z = r * np.exp(1j * rng.uniform(0, 2 * math.pi))
        rep = decompose(mu6, ETA, DELTA_EXP, complex(z))
        n_r = n_of_r(mu6, r)
        assert n_r >= 16.0
        cap = 2.0 * (math.log(math.log(n_r)) + math.log(r))
        _, a3, _, _ = region_masks(mu6, complex(z), rep.delta, rep.bigR)
        for loc in mu6.locations[a3]:
            assert abs(math.log(abs(1.0 - z / loc))) <= cap


def test_outer_annulus_log_bound(mu6):
    rng = np.random.default_rng(67)
    for _ in range(20):
        r = rng.uniform(4.0, 5.5)
        z = r * np.exp(1j * rng.uniform(0, 2 * math.pi))
        rep = decompose(mu6, ETA, DELTA_EXP, complex(z))
        cap = abs(math.log(rep.delta / rep.bigR))
        _, _, a4, _ = region_masks(mu6, complex(z), rep.delta, rep.bigR)
        for loc in mu6.locations[a4]:
            assert abs(math.log(abs(1.0 - z / loc))) <= cap


# ---------------------------------------------------------------------------
# Jensen consistency (small scale; the full criterion runs in acceptance)
# ---------------------------------------------------------------------------

def test_circle_average_matches_integrated_counting(mu5):
    field = product_field(mu5, ETA)
    r = midgap_radius(mu5, 3.5)
    avg = circle_average(field, r, 4096)
    big_n = integrated_counting(mu5, r)
    assert avg == pytest.approx(big_n, rel=1e-4)


def test_eval_v_many_matches_scalar(mu5):
    zs = np.array([2.0 + 1j, -0.5 + 0.25j, 3.3 - 2.2j])
    many = eval_v_many(mu5, ETA, zs)
    for z, val in zip(zs, many):
        assert eval_v(mu5, ETA, complex(z)) == val
