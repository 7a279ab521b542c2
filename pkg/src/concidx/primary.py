"""Weierstrass primary factors of arbitrary genus.

``log|E(w,p)| = log|1-w| + Re sum_{j<=p} w^j/j`` with the genus chosen by
the floor-of-log-power schedule, plus the two elementary inequalities the
decomposition estimates rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels

GENUS_CAP = 10**6


def genus_schedule(n_value: float, eta: float) -> int:
    """Genus floor(max(log n, 0)^(1+eta)); 0 whenever n <= 1."""
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if n_value < 0.0:
        raise ValueError("n_value must be nonnegative")
    if n_value <= 1.0:
        return 0
    p = int(math.floor(math.log(n_value) ** (1.0 + eta)))
    if p > GENUS_CAP:
        raise ValueError(f"genus {p} exceeds the cap {GENUS_CAP}")
    return p


def log_abs_primary(w: complex, p: int) -> float:
    """log|E(w,p)|; -inf at the zero w = 1.

    For |w| <= 1/2 the value is computed through the convergent tail
    series (the direct form cancels catastrophically at high genus),
    otherwise directly.
    """
    if p < 0:
        raise ValueError("genus must be nonnegative")
    if p > GENUS_CAP:
        raise ValueError(f"genus {p} exceeds the cap {GENUS_CAP}")
    return float(kernels.log_abs_primary_scalar(complex(w), int(p)))


def tail_polynomial(w: complex, p: int) -> float:
    """Re sum_{j=1..p} w^j / j, Horner evaluation; 0 for p = 0."""
    if p < 0:
        raise ValueError("genus must be nonnegative")
    w = complex(w)
    s = 0j
    for j in range(int(p), 0, -1):
        s = (s + 1.0 / j) * w
    return s.real


def log_abs_primary_series(w: complex, p: int, max_terms: int = 200000) -> float:
    """Tail-series evaluation -Re sum_{j>p} w^j/j, valid for any |w| < 1.

    Slower than the shipping path but free of cancellation; used by the
    inequality witnesses where the value being certified can sit far
    below the roundoff floor of the direct form.
    """
    w = complex(w)
    if abs(w) >= 1.0:
        raise ValueError("series evaluation requires |w| < 1")
    t = w ** (p + 1)
    acc = 0j
    j = p + 1
    scale = abs(t) / j if t != 0 else 0.0
    for _ in range(max_terms):
        term = t / j
        acc += term
        if abs(term) <= 1e-18 * max(scale, abs(acc)):
            break
        t *= w
        j += 1
    return -acc.real


@dataclass(frozen=True)
class BoundWitness:
    """Outcome of one elementary-inequality check."""

    holds: bool
    lhs: float
    rhs: float


def bound13_holds(w: complex, a: float, p: int) -> BoundWitness:
    """sum_{j<=p} |w|^j / j  <=  a^p (2 + log p), for |w| < a, a > 1, p >= 1."""
    aw = abs(complex(w))
    a = float(a)
    if not (a > 1.0):
        raise ValueError("a must exceed 1")
    if not (aw < a):
        raise ValueError("|w| must be below a")
    if p < 1:
        raise ValueError("p must be >= 1")
    lhs = math.fsum(aw**j / j for j in range(1, int(p) + 1))
    rhs = a**p * (2.0 + math.log(p))
    return BoundWitness(lhs <= rhs, lhs, rhs)


def bound19_holds(w: complex, p: int) -> BoundWitness:
    """|log|E(w,p)||  <=  |w|^(p+1), for |w| <= p/(p+1), p >= 1.

    The left side is evaluated through the cancellation-free tail series:
    near |w| ~ 1/2 at large genus the certified value sits below the
    roundoff floor of the direct log-plus-partial-sum form.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    w = complex(w)
    aw = abs(w)
    if aw > p / (p + 1.0):
        raise ValueError("|w| must be at most p/(p+1)")
    lhs = abs(log_abs_primary_series(w, int(p)))
    rhs = aw ** (p + 1)
    return BoundWitness(lhs <= rhs, lhs, rhs)
