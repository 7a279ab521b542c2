"""NumPy reference backend for the primary-factor kernels.

Same numerical contract as the compiled backend in ``_fast.pyx``:

* ``log|E(w,p)| = log|1-w| + Re sum_{j<=p} w^j/j`` evaluated directly for
  |w| > 1/2, and through the convergent tail series
  ``-Re sum_{j>p} w^j/j`` for |w| <= 1/2 (avoids the cancellation between
  the log and the partial sum that ruins the direct form at high genus).
* The tail series is truncated once the next term drops below 1e-18
  relative to the accumulated value.
* ``w = 1`` (an evaluation point sitting on an atom) yields -inf.
"""

from __future__ import annotations

import math

import numpy as np

SERIES_RADIUS = 0.5
TAIL_REL_TOL = 1e-18
TAIL_MAX_EXTRA = 256

BACKEND_NAME = "pure"


def log_abs_primary_scalar(w: complex, p: int) -> float:
    """log|E(w,p)| for a single point, scalar reference path."""
    w = complex(w)
    if w.real == 1.0 and w.imag == 0.0:
        return float("-inf")
    if abs(w) <= SERIES_RADIUS:
        return _series_tail_scalar(w, int(p))
    return _direct_scalar(w, int(p))


def _direct_scalar(w: complex, p: int) -> float:
    s = 0j
    for j in range(p, 0, -1):
        s = (s + 1.0 / j) * w
    d = abs(1.0 - w)
    if d == 0.0:
        return float("-inf")
    return math.log(d) + s.real


def _series_tail_scalar(w: complex, p: int) -> float:
    # -sum_{j>p} w^j / j; geometric decay since |w| <= 1/2.
    t = 1.0 + 0j
    for _ in range(p + 1):
        t *= w
        if abs(t.real) < 1e-320 and abs(t.imag) < 1e-320:
            return 0.0
    j = p + 1
    acc = 0j
    lead = abs(t) / j
    scale = lead
    while j <= p + 1 + TAIL_MAX_EXTRA:
        term = t / j
        acc += term
        if abs(term) <= TAIL_REL_TOL * scale:
            break
        scale = max(scale, abs(acc))
        t *= w
        j += 1
    return -acc.real


def eval_sum_many(zs, xi, mass, genus):
    """Weighted sums  sum_k mass[k] * log|E(z/xi[k], genus[k])|  per z.

    Parameters are 1-d arrays: ``zs`` complex evaluation points, ``xi``
    complex atom locations, ``mass`` positive weights, ``genus``
    nonnegative integers.  Returns a float array aligned with ``zs``;
    entries are -inf where z coincides with an atom.
    """
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    xi = np.ascontiguousarray(xi, dtype=np.complex128)
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    genus = np.ascontiguousarray(genus, dtype=np.int64)
    out = np.empty(zs.shape[0], dtype=np.float64)
    if xi.shape[0] == 0:
        out.fill(0.0)
        return out
    for i in range(zs.shape[0]):
        out[i] = _eval_sum_one(zs[i], xi, mass, genus)
    return out


def _eval_sum_one(z: complex, xi, mass, genus) -> float:
    if np.any(xi == z):
        return float("-inf")
    w = z / xi
    aw = np.abs(w)
    terms = np.zeros(xi.shape[0], dtype=np.float64)

    direct = aw > SERIES_RADIUS
    if direct.any():
        wd = w[direct]
        pd = genus[direct]
        s = np.zeros(wd.shape[0], dtype=np.complex128)
        for j in range(int(pd.max()), 0, -1):
            coeff = (pd >= j) / float(j)
            s = (s + coeff) * wd
        with np.errstate(divide="ignore"):
            terms[direct] = np.log(np.abs(1.0 - wd)) + s.real

    small = ~direct
    if small.any():
        ws = w[small]
        ps = genus[small]
        vals = np.empty(ws.shape[0], dtype=np.float64)
        for pv in np.unique(ps):
            grp = ps == pv
            vals[grp] = _series_tail_group(ws[grp], int(pv))
        terms[small] = vals

    if np.isneginf(terms).any():
        return float("-inf")
    return math.fsum(mass * terms)


def _series_tail_group(w, p: int):
    t = w ** (p + 1)
    acc = np.zeros(w.shape[0], dtype=np.complex128)
    lead = np.abs(t) / (p + 1)
    scale = lead.copy()
    active = lead > 0.0
    j = p + 1
    while active.any() and j <= p + 1 + TAIL_MAX_EXTRA:
        term = np.where(active, t, 0.0) / j
        acc += term
        tm = np.abs(term)
        active &= tm > TAIL_REL_TOL * scale
        np.maximum(scale, np.abs(acc), out=scale)
        t = t * w
        j += 1
    return -acc.real
