"""Canonical product evaluation and its exact five-region decomposition.

The product value at z is the mass-weighted sum of log|E(z/xi, p(xi))|
over the atoms, with per-atom genus p(xi) driven by the counting function
at the atom's modulus.  The decomposition splits that sum by region:

* A1 = C(z, Delta): local log term (v1) plus the genus polynomial (v2);
* A3 = C(0, r) \\ A1, A4 = C(0, R) \\ (C(0, r) u A1), A5 = outside C(0, R):
  full primary-factor terms (v3, v4, v5), R = r + Delta.

With the per-atom genus used in v2, v1+...+v5 equals the direct value
identically (up to summation order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .concentration import conc_index, delta_of_r
from .measure import PointMeasure
from .primary import GENUS_CAP, genus_schedule, tail_polynomial

NEG_INF = float("-inf")


def atom_genera(mu: PointMeasure, eta: float) -> np.ndarray:
    """Per-atom genus p(xi) = genus_schedule(n(|xi|), eta), cached on mu.

    n(|xi|) uses closed-disk counting, so each atom counts itself and
    every atom tied at the same modulus.
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    key = ("genera", float(eta))
    hit = mu._cache.get(key)
    if hit is not None:
        return hit
    if len(mu) == 0:
        g = np.zeros(0, dtype=np.int64)
    else:
        idx = np.searchsorted(mu.moduli, mu.moduli, side="right")
        n_at = mu._mass_prefix[idx - 1]
        logs = np.log(np.maximum(n_at, 1.0))
        g = np.floor(logs ** (1.0 + eta)).astype(np.int64)
        if g.max(initial=0) > GENUS_CAP:
            raise ValueError(f"genus schedule exceeds the cap {GENUS_CAP}")
    g.setflags(write=False)
    mu._cache[key] = g
    return g


def eval_v(mu: PointMeasure, eta: float, z: complex) -> float:
    """Direct product value at z; -inf exactly on atom locations."""
    return float(eval_v_many(mu, eta, np.array([complex(z)]))[0])


def eval_v_many(mu: PointMeasure, eta: float, zs) -> np.ndarray:
    """Vectorized ``eval_v`` over an array of points."""
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    genera = atom_genera(mu, eta)
    return kernels.eval_sum_many(zs, mu.locations, mu.masses, genera)


def product_field(mu: PointMeasure, eta: float, harmonic_coeffs=None):
    """Callable field z -> v(z) (+ Re h(z) for optional polynomial h).

    Accepts scalars or arrays; the harmonic addend is the real part of
    the polynomial with the given coefficients (constant term first) and
    carries no mass, so it exercises the u != v case of the residual
    diagnostics without touching the measure.
    """
    coeffs = None
    if harmonic_coeffs:
        coeffs = np.array(list(harmonic_coeffs), dtype=np.complex128)

    def field(z):
        scalar = np.isscalar(z) or isinstance(z, complex)
        zs = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        vals = eval_v_many(mu, eta, zs)
        if coeffs is not None:
            h = np.zeros(zs.shape, dtype=np.complex128)
            for c in coeffs[::-1]:
                h = h * zs + c
            vals = vals + h.real
        return float(vals[0]) if scalar else vals

    return field


@dataclass
class DecompositionReport:
    """Five-region split of the product value at one point.

    ``v_sum = v1 + ... + v5`` should match ``v_direct`` to 1e-9 relative
    (or both be -inf); the region masses partition the total mass.
    ``v2_frozen`` is the diagnostic variant of v2 with the genus frozen
    at the central value p(n(r)) across the whole local disk.
    """

    z: complex
    r: float
    delta: float
    bigR: float
    v1: float
    v2: float
    v3: float
    v4: float
    v5: float
    v_direct: float
    v2_frozen: float
    mass_A1: float
    mass_A3: float
    mass_A4: float
    mass_A5: float

    @property
    def v_sum(self) -> float:
        parts = (self.v1, self.v2, self.v3, self.v4, self.v5)
        if any(p == NEG_INF for p in parts):
            return NEG_INF
        return math.fsum(parts)

    CSV_COLUMNS = (
        "z_re", "z_im", "r", "delta", "bigR",
        "v1", "v2", "v3", "v4", "v5", "v_sum", "v_direct",
        "mass_A1", "mass_A3", "mass_A4", "mass_A5",
    )

    def csv_row(self):
        return (
            self.z.real, self.z.imag, self.r, self.delta, self.bigR,
            self.v1, self.v2, self.v3, self.v4, self.v5,
            self.v_sum, self.v_direct,
            self.mass_A1, self.mass_A3, self.mass_A4, self.mass_A5,
        )


def region_masks(mu: PointMeasure, z: complex, delta: float, bigR: float):
    """Boolean masks for the four bounded regions plus the tail; exact set
    logic, every atom lands in exactly one region."""
    z = complex(z)
    r = abs(z)
    dist_z = np.abs(mu.locations - z)
    a1 = dist_z <= delta
    inside_r = mu.moduli <= r
    inside_R = mu.moduli <= bigR
    a3 = inside_r & ~a1
    a4 = inside_R & ~inside_r & ~a1
    a5 = ~inside_R & ~a1
    return a1, a3, a4, a5


def decompose(
    mu: PointMeasure, eta: float, delta_exp: float, z: complex, delta: float | None = None
) -> DecompositionReport:
    """Split v(z) into the five region-restricted sums.

    Requires n(r) >= 3 (so the delta schedule is defined) and r > Delta.
    An explicit ``delta`` bypasses the schedule for hand-built degenerate
    scenarios (e.g. all mass in one region) where the gate cannot hold.
    """
    z = complex(z)
    r = abs(z)
    if delta is None:
        delta = delta_of_r(mu, delta_exp, r)
    elif delta <= 0.0:
        raise ValueError("delta override must be positive")
    bigR = r + delta
    genera = atom_genera(mu, eta)
    a1, a3, a4, a5 = region_masks(mu, z, delta, bigR)

    v1 = _local_log_sum(mu, z, a1)
    v2 = _tail_poly_sum(mu, z, a1, genera[a1])
    from .measure import n_of_r  # local import to avoid cycle at module load

    p_frozen = genus_schedule(n_of_r(mu, r), eta)
    v2_frozen = _tail_poly_sum(mu, z, a1, np.full(int(a1.sum()), p_frozen, dtype=np.int64))
    v3 = _region_sum(mu, z, a3, genera)
    v4 = _region_sum(mu, z, a4, genera)
    v5 = _region_sum(mu, z, a5, genera)
    v_direct = float(eval_v_many(mu, eta, np.array([z]))[0])

    return DecompositionReport(
        z=z, r=r, delta=delta, bigR=bigR,
        v1=v1, v2=v2, v3=v3, v4=v4, v5=v5,
        v_direct=v_direct, v2_frozen=v2_frozen,
        mass_A1=float(mu.masses[a1].sum()),
        mass_A3=float(mu.masses[a3].sum()),
        mass_A4=float(mu.masses[a4].sum()),
        mass_A5=float(mu.masses[a5].sum()),
    )


def _local_log_sum(mu, z, mask):
    if not mask.any():
        return 0.0
    d = np.abs(1.0 - z / mu.locations[mask])
    if np.any(d == 0.0):
        return NEG_INF
    return float(math.fsum(mu.masses[mask] * np.log(d)))


def _tail_poly_sum(mu, z, mask, genera):
    if not mask.any():
        return 0.0
    terms = [
        m * tail_polynomial(z / loc, int(p))
        for loc, m, p in zip(mu.locations[mask], mu.masses[mask], genera)
    ]
    return float(math.fsum(terms))


def _region_sum(mu, z, mask, genera):
    if not mask.any():
        return 0.0
    vals = kernels.eval_sum_many(
        np.array([z], dtype=np.complex128),
        mu.locations[mask], mu.masses[mask], genera[mask],
    )
    return float(vals[0])


def v1_via_parts(mu: PointMeasure, delta_exp: float, z: complex) -> float:
    """The local log term recovered from counting functions alone.

    Writing v1 as Stieltjes integrals in t = |xi - z| and t = |xi| and
    integrating by parts gives

        v1 = I(z) + log(Delta) n(z,Delta) + sum_{xi in C(z,Delta)} m log(R/|xi|)
             - log(R) n(z,Delta),

    where I is the concentration index and the middle sum is the exact
    atomic form of the capped-intersection integral of nu(z,t)/t.
    Agrees with ``decompose(...).v1`` to roundoff; -inf if an atom sits
    exactly at z.
    """
    z = complex(z)
    r = abs(z)
    delta = delta_of_r(mu, delta_exp, r)
    bigR = r + delta
    local = np.abs(mu.locations - z) <= delta
    if not local.any():
        return 0.0
    dists = np.abs(mu.locations[local] - z)
    if np.any(dists == 0.0):
        return NEG_INF
    n_local = float(mu.masses[local].sum())
    index = conc_index(mu, delta_exp, z)
    mid = math.fsum(mu.masses[local] * np.log(bigR / mu.moduli[local]))
    return float(index + math.log(delta) * n_local + mid - math.log(bigR) * n_local)
