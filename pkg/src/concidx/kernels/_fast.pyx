# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the primary-factor kernels.

Numerical contract matches ``_pure.py``: direct log + Horner partial sum
for |w| > 1/2, convergent tail series for |w| <= 1/2 truncated at 1e-18
relative, -inf at w = 1.  Per-point sums over atoms use Kahan compensation
so results do not depend on how callers batch the atom arrays.
"""

import numpy as np

from libc.math cimport log, sqrt, fabs, INFINITY

DEF SERIES_RADIUS2 = 0.25
DEF TAIL_REL_TOL = 1e-18
DEF TAIL_MAX_EXTRA = 256

BACKEND_NAME = "compiled"


cdef double _log_abs_primary(double wre, double wim, long p,
                             const double* recip) noexcept nogil:
    cdef double sre, sim, a, d2
    cdef double tre, tim, accre, accim, termre, termim, tm2, am2, lead2, scale2
    cdef long j, k, e
    cdef double bre, bim
    cdef double aw2 = wre * wre + wim * wim
    if wre == 1.0 and wim == 0.0:
        return -INFINITY
    if aw2 > SERIES_RADIUS2:
        # direct: log|1-w| + Re Horner(sum_{j<=p} w^j/j)
        sre = 0.0
        sim = 0.0
        for j in range(p, 0, -1):
            a = (sre + recip[j]) * wre - sim * wim
            sim = (sre + recip[j]) * wim + sim * wre
            sre = a
        d2 = (1.0 - wre) * (1.0 - wre) + wim * wim
        if d2 == 0.0:
            return -INFINITY
        return 0.5 * log(d2) + sre
    # series: -Re sum_{j>p} w^j/j, leading power by binary exponentiation
    if aw2 == 0.0:
        return 0.0
    if (p + 1) * 0.5 * log(aw2) < -745.0:
        return 0.0  # w^(p+1) underflows: the whole tail is zero at double precision
    tre = 1.0
    tim = 0.0
    bre = wre
    bim = wim
    e = p + 1
    while e:
        if e & 1:
            a = tre * bre - tim * bim
            tim = tre * bim + tim * bre
            tre = a
        e >>= 1
        if e:
            a = bre * bre - bim * bim
            bim = 2.0 * bre * bim
            bre = a
    j = p + 1
    accre = 0.0
    accim = 0.0
    lead2 = (tre * tre + tim * tim) / (<double> j * j)
    scale2 = lead2
    while j <= p + 1 + TAIL_MAX_EXTRA:
        termre = tre / j
        termim = tim / j
        accre += termre
        accim += termim
        tm2 = termre * termre + termim * termim
        if tm2 <= TAIL_REL_TOL * TAIL_REL_TOL * scale2:
            break
        am2 = accre * accre + accim * accim
        if am2 > scale2:
            scale2 = am2
        a = tre * wre - tim * wim
        tim = tre * wim + tim * wre
        tre = a
        j += 1
    return -accre


cdef object _recip_table(long pmax):
    cdef long size = pmax + 2
    out = np.empty(size, dtype=np.float64)
    cdef double[::1] ov = out
    cdef long j
    ov[0] = 0.0
    for j in range(1, size):
        ov[j] = 1.0 / j
    return out


def log_abs_primary_scalar(w, p):
    """log|E(w,p)| for a single point."""
    w = complex(w)
    cdef long pp = p
    recip = _recip_table(pp)
    cdef const double[::1] rv = recip
    return _log_abs_primary(w.real, w.imag, pp, &rv[0])


def eval_sum_many(zs, xi, mass, genus):
    """Weighted sums  sum_k mass[k] * log|E(z/xi[k], genus[k])|  per z."""
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    xi = np.ascontiguousarray(xi, dtype=np.complex128)
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    genus = np.ascontiguousarray(genus, dtype=np.int64)
    out = np.empty(zs.shape[0], dtype=np.float64)

    cdef const double complex[::1] zv = zs
    cdef const double complex[::1] xv = xi
    cdef const double[::1] mv = mass
    cdef const long[::1] gv = genus
    cdef double[::1] ov = out

    cdef Py_ssize_t i, k, nz = zv.shape[0], nx = xv.shape[0]
    cdef long pmax = 0
    for k in range(nx):
        if gv[k] > pmax:
            pmax = gv[k]
    recip = _recip_table(pmax)
    cdef const double[::1] rv = recip
    cdef const double* rp = &rv[0]

    cdef double zre, zim, xre, xim, d2, wre, wim, term
    cdef double s, comp, y, t
    cdef bint hit
    with nogil:
        for i in range(nz):
            zre = zv[i].real
            zim = zv[i].imag
            s = 0.0
            comp = 0.0
            hit = False
            for k in range(nx):
                xre = xv[k].real
                xim = xv[k].imag
                if xre == zre and xim == zim:
                    hit = True
                    break
                d2 = xre * xre + xim * xim
                wre = (zre * xre + zim * xim) / d2
                wim = (zim * xre - zre * xim) / d2
                term = _log_abs_primary(wre, wim, gv[k], rp)
                if term == -INFINITY:
                    hit = True
                    break
                term = term * mv[k]
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
            ov[i] = -INFINITY if hit else s
    return out
