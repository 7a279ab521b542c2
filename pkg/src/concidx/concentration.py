"""Concentration index, circle functionals, and the residual diagnostics.

The index at z is the (negated) integral of n(z,t)/t up to the schedule
radius Delta = r / (log n(r))^delta_exp; for atomic measures it has the
exact closed form -sum m_k log(Delta / |xi_k - z|) over atoms within
Delta of z.  The sweep machinery samples circles, reports the residual
between the product value and the index, and flags radii where the two
exceptional-set inequalities fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .measure import IntervalSet, PointMeasure, integrated_counting, n_of_r

# Euler's number, the exponent base arising from the Borel-Nevanlinna step
EULER_E = math.e

NEG_INF = float("-inf")

DEFAULT_CIRCLE_SAMPLES = 4096
ATOM_COLLISION_MARGIN = 1e-6
SAMPLE_SKIP_MARGIN = 1e-9


def delta_of_r(mu: PointMeasure, delta_exp: float, r: float) -> float:
    """Schedule radius Delta = r / (log n(r))^delta_exp.

    Defined only where n(r) >= 3 (so log n(r) > 1 and Delta < r);
    smaller radii raise ``DomainError``.
    """
    if delta_exp <= 0.0:
        raise ValueError("delta_exp must be positive")
    n_r = n_of_r(mu, r)
    if n_r < 3.0:
        raise DomainError(
            f"n({r}) = {n_r} < 3: the delta schedule needs more mass; use a larger r"
        )
    return r / math.log(n_r) ** delta_exp


def conc_index(mu: PointMeasure, delta_exp: float, z: complex) -> float:
    """Concentration index at z, exact atomic closed form; always <= 0.

    Equals 0 iff no atom lies within Delta of z; -inf when an atom sits
    exactly at z.
    """
    z = complex(z)
    delta = delta_of_r(mu, delta_exp, abs(z))
    dists = np.abs(mu.locations - z)
    mask = dists <= delta
    if not mask.any():
        return 0.0
    d = dists[mask]
    if np.any(d == 0.0):
        return NEG_INF
    return float(-math.fsum(mu.masses[mask] * np.log(delta / d)))


def circle_points(r: float, samples: int) -> np.ndarray:
    theta = 2.0 * math.pi * np.arange(samples) / samples
    return r * np.exp(1j * theta)


def _field_values(f, zs: np.ndarray) -> np.ndarray:
    vals = f(zs)
    vals = np.asarray(vals, dtype=np.float64)
    if vals.shape != zs.shape:
        vals = np.array([float(f(z)) for z in zs], dtype=np.float64)
    return vals


def max_on_circle(f, r: float, samples: int = DEFAULT_CIRCLE_SAMPLES) -> float:
    """Max of f over equispaced points on |z| = r (a lower approximation
    of the true circle maximum).  -inf samples are skipped."""
    if samples < 64:
        raise ValueError("need at least 64 samples")
    vals = _field_values(f, circle_points(r, samples))
    finite = vals[vals != NEG_INF]
    if finite.size == 0:
        return NEG_INF
    return float(finite.max())


def nevanlinna_T(f, r: float, samples: int = DEFAULT_CIRCLE_SAMPLES) -> float:
    """Trapezoidal circle mean of the positive part of f."""
    if samples < 64:
        raise ValueError("need at least 64 samples")
    vals = _field_values(f, circle_points(r, samples))
    return float(np.mean(np.maximum(vals, 0.0)))


def circle_average(f, r: float, samples: int = DEFAULT_CIRCLE_SAMPLES) -> float:
    """Trapezoidal circle mean of f (Jensen-type average)."""
    vals = _field_values(f, circle_points(r, samples))
    return float(np.mean(vals))


def bn_holds_at(mu: PointMeasure, delta_exp: float, big_m: float, r: float) -> bool:
    """Growth-regularity inequality n(r (1 + M / log^d n(r))) <= n(r)^e."""
    if big_m <= 0.0:
        raise ValueError("M must be positive")
    n_r = n_of_r(mu, r)
    if n_r < 3.0:
        raise DomainError(f"n({r}) = {n_r} < 3")
    rr = r * (1.0 + big_m / math.log(n_r) ** delta_exp)
    if rr > mu.rmax:
        raise DomainError(f"inflated radius {rr} exceeds rmax={mu.rmax}")
    return n_of_r(mu, rr) <= n_r**EULER_E


def lemma11_holds_at(mu: PointMeasure, r: float) -> bool:
    """Counting-vs-integrated inequality n(r) <= N(r)^2."""
    return n_of_r(mu, r) <= integrated_counting(mu, r) ** 2


def _violation_hull(radii, violated) -> IntervalSet:
    """Merge adjacent violating grid radii into intervals.

    A run of violating grid points [r_i .. r_j] becomes the interval
    [r_i, r_{j+1}] (extended one grid step right, or by the trailing
    spacing at the grid end) so the reported set is a grid-resolution
    superset that shrinks with the spacing.
    """
    radii = list(radii)
    intervals = []
    i = 0
    n = len(radii)
    while i < n:
        if not violated[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and violated[j + 1]:
            j += 1
        if j + 1 < n:
            b = radii[j + 1]
        elif n >= 2:
            b = radii[j] + (radii[j] - radii[j - 1])
        else:
            b = radii[j] * (1.0 + 1e-6)
        intervals.append((radii[i], b))
        i = j + 1
    return IntervalSet(intervals)


def bn_check(mu: PointMeasure, delta_exp: float, big_m: float, radii) -> IntervalSet:
    """Evaluate the growth-regularity inequality on a radius grid and
    return the interval hull of the violating radii."""
    flags = [not bn_holds_at(mu, delta_exp, big_m, r) for r in radii]
    return _violation_hull(radii, flags)


def lemma11_check(mu: PointMeasure, radii) -> IntervalSet:
    """Grid version of n(r) <= N(r)^2; returns the violation hull."""
    flags = [not lemma11_holds_at(mu, r) for r in radii]
    return _violation_hull(radii, flags)


@dataclass
class ResidualRow:
    """Per-radius diagnostic record for the residual sweep."""

    r: float
    n_r: float
    N_r: float
    delta: float
    z_samples: list
    I_vals: list
    v_vals: list
    residuals: list
    B_r_v: float
    T_r_v: float
    ratio1: float
    bn_ok: bool
    lemma_ok: bool
    skipped: int = 0

    CSV_COLUMNS = (
        "r", "n_r", "N_r", "delta", "B_r", "T_r",
        "I_mean", "I_min", "v_mean", "resid_max", "ratio1", "bn_ok", "lemma_ok",
    )

    def csv_row(self):
        i_arr = np.array(self.I_vals, dtype=np.float64)
        v_arr = np.array(self.v_vals, dtype=np.float64)
        resid = np.array(self.residuals, dtype=np.float64)
        return (
            self.r, self.n_r, self.N_r, self.delta, self.B_r_v, self.T_r_v,
            float(i_arr.mean()) if i_arr.size else 0.0,
            float(i_arr.min()) if i_arr.size else 0.0,
            float(v_arr.mean()) if v_arr.size else 0.0,
            float(np.abs(resid).max()) if resid.size else 0.0,
            self.ratio1, self.bn_ok, self.lemma_ok,
        )


def nudge_radius(mu: PointMeasure, r: float, rel_margin: float = ATOM_COLLISION_MARGIN) -> float:
    """Push r off atom moduli until the relative margin clears."""
    if len(mu) == 0:
        return r
    for _ in range(1000):
        if np.min(np.abs(mu.moduli - r)) >= rel_margin * r:
            return r
        r *= 1.0 + 2.0 * rel_margin
    raise DomainError(f"could not clear atom moduli near r={r}")


def residual_sweep(
    mu: PointMeasure,
    delta_exp: float,
    eta: float,
    radii,
    angles_per_radius: int,
    seed: int,
    big_m: float = 1.0,
    circle_samples: int = DEFAULT_CIRCLE_SAMPLES,
    harmonic_coeffs=None,
) -> list:
    """Sample circles, compute index/value residuals and growth flags.

    Deterministic given (mu, parameters, seed): each radius draws its
    angles from a generator seeded with (seed, radius index).  Sample
    points landing within 1e-9 r of an atom are skipped and counted in
    the row's ``skipped`` field.  The evaluated field is the canonical
    product plus the optional harmonic polynomial addend.
    """
    from .product import product_field  # deferred: product imports this module

    field_fn = product_field(mu, eta, harmonic_coeffs)
    rows = []
    for idx, r0 in enumerate(radii):
        r = nudge_radius(mu, float(r0))
        delta = delta_of_r(mu, delta_exp, r)
        n_r = n_of_r(mu, r)
        big_n = integrated_counting(mu, r)
        rng = np.random.default_rng([int(seed), idx])
        thetas = rng.uniform(0.0, 2.0 * math.pi, int(angles_per_radius))
        zs = r * np.exp(1j * thetas)
        keep = []
        skipped = 0
        for z in zs:
            if len(mu) and np.min(np.abs(mu.locations - z)) < SAMPLE_SKIP_MARGIN * r:
                skipped += 1
            else:
                keep.append(z)
        zs = np.array(keep, dtype=np.complex128)
        v_vals = _field_values(field_fn, zs)
        i_vals = np.array([conc_index(mu, delta_exp, z) for z in zs])
        resid = v_vals - i_vals
        b_r = max_on_circle(field_fn, r, circle_samples)
        t_r = nevanlinna_T(field_fn, r, circle_samples)
        resid_max = float(np.abs(resid).max()) if resid.size else 0.0
        ratio1 = math.log1p(resid_max) / big_n if big_n > 0 else 0.0
        rows.append(
            ResidualRow(
                r=r, n_r=n_r, N_r=big_n, delta=delta,
                z_samples=list(zs), I_vals=list(i_vals), v_vals=list(v_vals),
                residuals=list(resid),
                B_r_v=b_r, T_r_v=t_r, ratio1=ratio1,
                bn_ok=bn_holds_at(mu, delta_exp, big_m, r),
                lemma_ok=lemma11_holds_at(mu, r),
                skipped=skipped,
            )
        )
    return rows
