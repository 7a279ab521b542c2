"""Discrete mass distributions in the plane and their counting functions.

A ``PointMeasure`` is a finite multiset of weighted atoms, truncated at a
radius ``rmax``.  All atoms live strictly outside the unit circle so that
``n(1) = 0`` holds exactly, and all disk counts use closed-disk semantics
(boundary atoms count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AtomBudgetError

ATOM_BUDGET = 10**6


class PointMeasure:
    """Immutable finite atomic measure.

    Atoms are stored sorted by modulus ascending, ties broken by angle and
    then insertion order.  ``rmax`` is the truncation radius; every atom
    satisfies ``1 < |location| <= rmax``.
    """

    def __init__(self, atoms, rmax, description="", seed=None):
        rmax = float(rmax)
        if rmax <= 1.0:
            raise ValueError("rmax must exceed 1")
        locs = []
        masses = []
        for loc, m in atoms:
            loc = complex(loc)
            m = float(m)
            if m <= 0.0:
                raise ValueError(f"atom mass must be positive, got {m}")
            r = abs(loc)
            if r <= 1.0:
                raise ValueError(f"atom at |location|={r} <= 1 is forbidden")
            if r > rmax:
                raise ValueError(f"atom at |location|={r} exceeds rmax={rmax}")
            locs.append(loc)
            masses.append(m)
        if len(locs) > ATOM_BUDGET:
            raise AtomBudgetError(f"{len(locs)} atoms exceed the {ATOM_BUDGET} budget")
        order = sorted(
            range(len(locs)),
            key=lambda i: (abs(locs[i]), math.atan2(locs[i].imag, locs[i].real), i),
        )
        self.locations = np.array([locs[i] for i in order], dtype=np.complex128)
        self.masses = np.array([masses[i] for i in order], dtype=np.float64)
        self.moduli = np.abs(self.locations)
        self._mass_prefix = np.cumsum(self.masses)
        self.rmax = rmax
        self.description = str(description)
        self.seed = seed
        self.locations.setflags(write=False)
        self.masses.setflags(write=False)
        self.moduli.setflags(write=False)
        self._cache = {}

    def __len__(self):
        return int(self.locations.shape[0])

    @property
    def total_mass(self):
        return float(self._mass_prefix[-1]) if len(self) else 0.0

    def __repr__(self):
        return (
            f"PointMeasure(atoms={len(self)}, rmax={self.rmax}, "
            f"description={self.description!r})"
        )


def count_disk(mu: PointMeasure, center: complex, radius: float) -> float:
    """Mass inside the closed disk of the given center and radius."""
    if radius < 0.0:
        raise ValueError("radius must be nonnegative")
    if len(mu) == 0:
        return 0.0
    mask = np.abs(mu.locations - complex(center)) <= radius
    return float(mu.masses[mask].sum())


def n_of_r(mu: PointMeasure, r: float) -> float:
    """Central counting function n(r): mass inside the closed disk |w| <= r."""
    if len(mu) == 0 or r < mu.moduli[0]:
        return 0.0
    idx = int(np.searchsorted(mu.moduli, r, side="right"))
    return float(mu._mass_prefix[idx - 1]) if idx else 0.0


def integrated_counting(mu: PointMeasure, r: float) -> float:
    """N(r) = integral of n(t)/t over [1, r], in atomic closed form.

    For an atomic measure this is exactly sum of m_k * log(r / |a_k|)
    over atoms with |a_k| <= r.
    """
    if r < 1.0:
        raise ValueError("r must be >= 1")
    if len(mu) == 0:
        return 0.0
    idx = int(np.searchsorted(mu.moduli, r, side="right"))
    if idx == 0:
        return 0.0
    return float(math.fsum(mu.masses[:idx] * np.log(r / mu.moduli[:idx])))


def nu_mixed(mu: PointMeasure, z: complex, dcap: float, t: float) -> float:
    """Mass in C(0,t) intersected with C(z,dcap), closed disks.

    The cap radius ``dcap`` stays fixed while ``t`` sweeps; this is the
    variant that makes the integration-by-parts identity for the local
    log term exact (see ``canonical_product.v1_via_parts``).
    """
    if dcap <= 0.0:
        raise ValueError("dcap must be positive")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if len(mu) == 0:
        return 0.0
    mask = (mu.moduli <= t) & (np.abs(mu.locations - complex(z)) <= dcap)
    return float(mu.masses[mask].sum())


def generate_profile(profile, rmax, seed, description=""):
    """Place unit atoms so that n(r) tracks a nondecreasing target profile.

    ``profile`` is a callable with profile(1) = 0, nondecreasing on
    [1, rmax].  The k-th atom sits at modulus inf{r : profile(r) >= k}
    with a pseudorandom angle from the seeded generator, so
    |n(r) - profile(r)| <= 1 at continuity points.  Deterministic:
    identical (profile, rmax, seed) give bit-identical atom lists.
    """
    rmax = float(rmax)
    if rmax <= 1.0:
        raise ValueError("rmax must exceed 1")
    p1 = float(profile(1.0))
    if abs(p1) > 1e-12:
        raise ValueError(f"profile(1) must be 0, got {p1}")
    grid = np.linspace(1.0, rmax, 1024)
    vals = np.array([float(profile(g)) for g in grid])
    if np.any(np.diff(vals) < -1e-12):
        raise ValueError("profile must be nondecreasing on [1, rmax]")
    total = math.ceil(float(profile(rmax)))
    if total > ATOM_BUDGET:
        raise AtomBudgetError(f"profile needs {total} atoms, budget is {ATOM_BUDGET}")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, total)
    atoms = []
    for k in range(1, total + 1):
        m = _profile_inverse(profile, float(k), rmax)
        theta = angles[k - 1]
        atoms.append((m * complex(math.cos(theta), math.sin(theta)), 1.0))
    return PointMeasure(atoms, rmax, description=description, seed=seed)


def _profile_inverse(profile, level, rmax):
    # inf{r in [1, rmax] : profile(r) >= level} by bisection
    lo, hi = 1.0, rmax
    if float(profile(rmax)) < level:
        return rmax
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(profile(mid)) >= level:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return hi


@dataclass(frozen=True)
class IntervalSet:
    """Finite disjoint union of intervals [a, b] in [1, inf), sorted.

    Construction canonicalizes: intervals are sorted and adjacent or
    overlapping intervals are merged.
    """

    intervals: tuple

    def __init__(self, intervals=()):
        cleaned = []
        for a, b in sorted((float(a), float(b)) for a, b in intervals):
            if a < 1.0:
                raise ValueError(f"interval endpoint {a} below 1")
            if b <= a:
                raise ValueError(f"empty interval [{a}, {b}]")
            if cleaned and a <= cleaned[-1][1]:
                cleaned[-1][1] = max(cleaned[-1][1], b)
            else:
                cleaned.append([a, b])
        object.__setattr__(self, "intervals", tuple((a, b) for a, b in cleaned))

    def __bool__(self):
        return bool(self.intervals)


def log_measure(s: IntervalSet) -> float:
    """Logarithmic measure: sum of log(b/a) over the intervals."""
    return float(math.fsum(math.log(b / a) for a, b in s.intervals))


# ---------------------------------------------------------------------------
# text serialization: `# rmax=<value> seed=<value> profile=<text>` header,
# then one `re im mass` line per atom, round-trip exact via repr
# ---------------------------------------------------------------------------

def save_measure(mu: PointMeasure, path) -> None:
    seed = mu.seed if mu.seed is not None else "none"
    lines = [f"# rmax={mu.rmax!r} seed={seed} profile={mu.description}"]
    for loc, m in zip(mu.locations, mu.masses):
        lines.append(f"{float(loc.real)!r} {float(loc.imag)!r} {float(m)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_measure(path) -> PointMeasure:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# rmax="):
            raise ValueError(f"bad measure header: {header!r}")
        body = header[2:]
        rmax_part, seed_part = body.split(" seed=", 1)
        seed_part, profile = seed_part.split(" profile=", 1)
        rmax = float(rmax_part[len("rmax="):])
        seed = None if seed_part == "none" else int(seed_part)
        atoms = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            re_s, im_s, m_s = line.split()
            atoms.append((complex(float(re_s), float(im_s)), float(m_s)))
    return PointMeasure(atoms, rmax, description=profile, seed=seed)


def midgap_radius(mu: PointMeasure, target: float) -> float:
    """Midpoint of the atom-moduli gap containing ``target``.

    Convenient for picking evaluation radii that keep a relative margin
    from every atom modulus (circle averages near atoms converge slowly).
    """
    if len(mu) == 0:
        return float(target)
    mods = np.unique(mu.moduli)
    idx = int(np.searchsorted(mods, target))
    if idx == 0:
        return 0.5 * (1.0 + mods[0])
    if idx >= mods.shape[0]:
        return float(target)
    return float(0.5 * (mods[idx - 1] + mods[idx]))
