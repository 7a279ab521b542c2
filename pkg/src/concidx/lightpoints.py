"""Light/heavy point classification and covering diagnostics.

A point is (beta, s)-light when n(z,t) < beta t for every t in (0, s).
Since n(z, .) is a right-continuous step function jumping at the
distances to the atoms, the classification reduces to an exact scan of
those jump radii.  Heavy points carry a witness radius at which the mass
condition fails; the witness disks form a cover whose greedy subcover is
measured for overlap multiplicity and radii sum.

Any qualifying jump radius d satisfies beta d <= total mass, so the scan
only ever needs atoms within min(s, total_mass / beta) of the point; a
KD-tree over the atom coordinates makes that lookup cheap even for
tens of thousands of samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .concentration import EULER_E, bn_holds_at, delta_of_r
from .errors import DomainError
from .measure import PointMeasure, integrated_counting

ATOM_WITNESS_EPS = 1e-6


def _atom_tree(mu: PointMeasure) -> cKDTree:
    tree = mu._cache.get("kdtree")
    if tree is None:
        pts = np.column_stack((mu.locations.real, mu.locations.imag))
        tree = cKDTree(pts)
        mu._cache["kdtree"] = tree
    return tree


@dataclass(frozen=True)
class Classification:
    heavy: bool
    witness_radius: float | None = None


def classify_point(mu: PointMeasure, beta: float, s: float, z: complex) -> Classification:
    """Exact (beta, s) light/heavy classification via the jump radii.

    With distances d_1 <= d_2 <= ... to the atoms inside C(z, s) and
    cumulative masses c_k, the point is heavy iff c_k >= beta d_k for
    some k (the ratio n(z,t)/t peaks at the jumps); the witness is the
    smallest such d_k.  A sample sitting exactly on an atom is heavy for
    every beta; its witness falls back to min(1e-6 s, mass/beta) so the
    emitted disk has positive radius while keeping the witness-mass
    inequality  n(z, witness) >= beta * witness  intact.
    """
    if beta <= 0.0 or s <= 0.0:
        raise ValueError("beta and s must be positive")
    if len(mu) == 0:
        return Classification(False)
    z = complex(z)
    cap = min(s, mu.total_mass / beta)
    idx = _atom_tree(mu).query_ball_point([z.real, z.imag], cap)
    return _classify_from_neighbors(mu, np.asarray(idx, dtype=np.intp), beta, s, z)


def _classify_from_neighbors(mu, idx, beta, s, z) -> Classification:
    if idx.size == 0:
        return Classification(False)
    d = np.abs(mu.locations[idx] - z)
    inside = d < s
    if not inside.any():
        return Classification(False)
    d = d[inside]
    m = mu.masses[idx][inside]
    order = np.argsort(d, kind="stable")
    d = d[order]
    cum = np.cumsum(m[order])
    # collapse ties so each jump radius carries its full cumulative mass
    jumps = np.unique(d)
    cum_at = cum[np.searchsorted(d, jumps, side="right") - 1]
    qualifies = (jumps == 0.0) | (cum_at >= beta * jumps)
    if not qualifies.any():
        return Classification(False)
    first = int(np.argmax(qualifies))
    if jumps[first] > 0.0:
        return Classification(True, float(jumps[first]))
    # atom exactly at the sample: prefer the smallest positive qualifying jump
    positive = qualifies & (jumps > 0.0)
    if positive.any():
        return Classification(True, float(jumps[np.argmax(positive)]))
    mass_here = float(cum_at[0])
    witness = min(ATOM_WITNESS_EPS * s, 0.99 * mass_here / beta)
    return Classification(True, witness)


def default_envelope(big_n: float) -> float:
    """Residual envelope V(N) = exp(sqrt(N)); dominates N^(2e) eventually
    while staying subexponential in N."""
    return math.exp(math.sqrt(big_n))


def clamped_envelope(big_n: float) -> float:
    """exp(sqrt(N)) clamped from below by N^(2e).

    The plain exponential envelope only overtakes N^(2e) around N ~ 1700,
    far beyond desk-scale grids; the clamp keeps the schedule defined
    there (the boundary V = N^(2e) is accepted) without changing the
    asymptotics."""
    return max(math.exp(math.sqrt(big_n)), big_n ** (2.0 * EULER_E))


def beta_schedule(mu: PointMeasure, delta_exp: float, r: float, envelope=None) -> float:
    """beta(r) with beta(r) s(r) = sqrt(V(r) N(r)^(2e)), s(r) = Delta(r).

    ``envelope`` maps N(r) to V(r); the default is exp(sqrt(N)).  The
    envelope must dominate N^(2e) at the requested radius, otherwise the
    geometric mean would undershoot the lower schedule bound.
    """
    s = delta_of_r(mu, delta_exp, r)
    big_n = integrated_counting(mu, r)
    env = envelope if envelope is not None else default_envelope
    v_r = float(env(big_n))
    n2e = big_n ** (2.0 * EULER_E)
    if v_r < n2e:
        raise DomainError(
            f"envelope V={v_r} below N^(2e)={n2e} at r={r}; schedule undefined"
        )
    return math.sqrt(v_r * n2e) / s


@dataclass(frozen=True)
class CoverDisk:
    center: complex
    radius: float
    witness_mass: float


@dataclass
class CoverReport:
    """Witness disks over one annulus plus the selected subcover stats."""

    annulus: tuple
    beta: float
    s: float
    disks_selected: list
    multiplicity_measured: int
    radii_sum: float
    radii_sum_over_delta: float
    heavy_samples_total: int
    heavy_samples_covered: int
    disks_all: list = field(default_factory=list)

    def to_dict(self):
        return {
            "annulus": list(self.annulus),
            "beta": self.beta,
            "s": self.s,
            "multiplicity_measured": self.multiplicity_measured,
            "radii_sum": self.radii_sum,
            "radii_sum_over_delta": self.radii_sum_over_delta,
            "heavy_samples_total": self.heavy_samples_total,
            "heavy_samples_covered": self.heavy_samples_covered,
            "disks_selected": [
                {
                    "center_re": d.center.real,
                    "center_im": d.center.imag,
                    "radius": d.radius,
                    "witness_mass": d.witness_mass,
                }
                for d in self.disks_selected
            ],
        }


def heavy_cover(mu: PointMeasure, beta: float, s: float, annulus, grid_density: int, seed: int):
    """Witness disks for every heavy sample over the annulus.

    The sample set is deterministic: all atom locations in the fattened
    annulus [r - s, R + s] (the worst offenders are always probed) plus
    ``grid_density`` seeded points drawn area-uniformly over the annulus.
    """
    r_lo, r_hi = float(annulus[0]), float(annulus[1])
    if not (r_hi > r_lo > 0.0):
        raise ValueError("annulus must satisfy 0 < r < R")
    samples = []
    if len(mu):
        band = (mu.moduli >= max(0.0, r_lo - s)) & (mu.moduli <= r_hi + s)
        samples.extend(complex(c) for c in mu.locations[band])
    rng = np.random.default_rng(seed)
    radii = np.sqrt(rng.uniform(r_lo**2, r_hi**2, int(grid_density)))
    thetas = rng.uniform(0.0, 2.0 * math.pi, int(grid_density))
    samples.extend(complex(rr * math.cos(th), rr * math.sin(th)) for rr, th in zip(radii, thetas))
    if len(mu) == 0 or not samples:
        return []
    cap = min(s, mu.total_mass / beta)
    pts = np.array([[z.real, z.imag] for z in samples])
    tree = _atom_tree(mu)
    neighborhoods = tree.query_ball_point(pts, cap)
    disks = []
    for z, idx in zip(samples, neighborhoods):
        cls = _classify_from_neighbors(
            mu, np.asarray(idx, dtype=np.intp), beta, s, z
        )
        if cls.heavy:
            wmass = _mass_in_disk(mu, tree, z, cls.witness_radius)
            disks.append(CoverDisk(z, cls.witness_radius, wmass))
    return disks


def _mass_in_disk(mu, tree, z, radius) -> float:
    # inflate the tree query a hair: its metric can round the boundary atom
    # out by an ulp; the exact closed-disk filter below stays authoritative
    idx = tree.query_ball_point([z.real, z.imag], radius * (1.0 + 1e-9) + 1e-300)
    if not idx:
        return 0.0
    idx = np.asarray(idx, dtype=np.intp)
    keep = np.abs(mu.locations[idx] - z) <= radius
    return float(mu.masses[idx][keep].sum())


def besicovitch_select(disks):
    """Greedy bounded-overlap subcover of a finite disk family.

    Repeatedly keep the largest-radius disk whose center no selected disk
    contains (ties by center modulus, then angle); every input center
    ends up inside some selected disk.  The overlap multiplicity is
    measured over the selected centers plus 10^4 seeded probe points in
    the bounding box, not proved.
    """
    pool = sorted(
        disks,
        key=lambda d: (-d.radius, abs(d.center), math.atan2(d.center.imag, d.center.real)),
    )
    selected = []
    if pool:
        # cell hash at the largest radius: a disk can only contain centers
        # in its own or adjacent cells
        h = pool[0].radius
        cells = {}
        for d in pool:
            cx = math.floor(d.center.real / h)
            cy = math.floor(d.center.imag / h)
            contained = False
            for nx in (cx - 1, cx, cx + 1):
                row = cells.get(nx)
                if row is None:
                    continue
                for ny in (cy - 1, cy, cy + 1):
                    for sd in row.get(ny, ()):
                        if abs(d.center - sd.center) <= sd.radius:
                            contained = True
                            break
                    if contained:
                        break
                if contained:
                    break
            if not contained:
                selected.append(d)
                cells.setdefault(cx, {}).setdefault(cy, []).append(d)
    return selected, measure_multiplicity(selected)


def measure_multiplicity(selected, probe_count: int = 10000, probe_seed: int = 987654321):
    """Max number of selected disks containing any probe point.

    Probes are the selected centers plus seeded random points in the
    bounding box of the family.
    """
    if not selected:
        return 0
    centers = np.array([d.center for d in selected], dtype=np.complex128)
    radii = np.array([d.radius for d in selected], dtype=np.float64)
    h = float(radii.max())
    tree = cKDTree(np.column_stack((centers.real, centers.imag)))
    lo_x = (centers.real - radii).min()
    hi_x = (centers.real + radii).max()
    lo_y = (centers.imag - radii).min()
    hi_y = (centers.imag + radii).max()
    rng = np.random.default_rng(probe_seed)
    probes = np.concatenate(
        [
            centers,
            rng.uniform(lo_x, hi_x, probe_count) + 1j * rng.uniform(lo_y, hi_y, probe_count),
        ]
    )
    best = 0
    hoods = tree.query_ball_point(np.column_stack((probes.real, probes.imag)), h)
    for z, idx in zip(probes, hoods):
        if not idx:
            continue
        idx = np.asarray(idx, dtype=np.intp)
        count = int(np.count_nonzero(np.abs(z - centers[idx]) <= radii[idx]))
        best = max(best, count)
    return best


def covered_by(disks, selected) -> int:
    """Number of disk centers lying inside at least one selected disk."""
    if not disks:
        return 0
    if not selected:
        return 0
    centers = np.array([d.center for d in selected], dtype=np.complex128)
    radii = np.array([d.radius for d in selected], dtype=np.float64)
    h = float(radii.max())
    tree = cKDTree(np.column_stack((centers.real, centers.imag)))
    pts = np.array([d.center for d in disks], dtype=np.complex128)
    hoods = tree.query_ball_point(np.column_stack((pts.real, pts.imag)), h)
    covered = 0
    for z, idx in zip(pts, hoods):
        if not idx:
            continue
        idx = np.asarray(idx, dtype=np.intp)
        if np.any(np.abs(z - centers[idx]) <= radii[idx]):
            covered += 1
    return covered


def build_cover_report(
    mu: PointMeasure,
    delta_exp: float,
    r: float,
    grid_density: int = 200,
    seed: int = 0,
    envelope=None,
    beta: float | None = None,
    s: float | None = None,
) -> CoverReport:
    """Classify, cover, and select over the annulus [r, r + Delta].

    By default beta comes from the schedule (with the clamped envelope,
    so the gate is satisfiable at desk scale) and s = Delta; both can be
    pinned for hand-built scenarios.
    """
    delta = delta_of_r(mu, delta_exp, r)
    if s is None:
        s = delta
    if beta is None:
        beta = beta_schedule(mu, delta_exp, r, envelope or clamped_envelope)
    annulus = (r, r + delta)
    disks = heavy_cover(mu, beta, s, annulus, grid_density, seed)
    selected, mult = besicovitch_select(disks)
    covered = covered_by(disks, selected)
    in_annulus = [d for d in selected if annulus[0] <= abs(d.center) <= annulus[1]]
    radii_sum = float(math.fsum(d.radius for d in in_annulus))
    return CoverReport(
        annulus=annulus,
        beta=beta,
        s=s,
        disks_selected=selected,
        multiplicity_measured=mult,
        radii_sum=radii_sum,
        radii_sum_over_delta=radii_sum / delta,
        heavy_samples_total=len(disks),
        heavy_samples_covered=covered,
        disks_all=disks,
    )


@dataclass(frozen=True)
class RadiiSumDiagnostic:
    radii_sum: float
    bound: float
    ratio_to_delta: float
    holds: bool
    bn_ok: bool


def radii_sum_check(
    cover: CoverReport, mu: PointMeasure, delta_exp: float, r: float, big_m: float = 1.0
) -> RadiiSumDiagnostic:
    """Finite form of the radii-sum bound: sum r_j <= 6 N(r)^(2e) / beta.

    The bound is a counting consequence of the multiplicity-6 subcover
    whenever the growth inequality holds at r; the bn flag records
    whether the radius is in that regime.
    """
    big_n = integrated_counting(mu, r)
    bound = 6.0 * big_n ** (2.0 * EULER_E) / cover.beta
    delta = cover.annulus[1] - cover.annulus[0]
    try:
        bn_ok = bn_holds_at(mu, delta_exp, big_m, r)
    except DomainError:
        bn_ok = False
    return RadiiSumDiagnostic(
        radii_sum=cover.radii_sum,
        bound=bound,
        ratio_to_delta=cover.radii_sum / delta,
        holds=cover.radii_sum <= bound,
        bn_ok=bn_ok,
    )
