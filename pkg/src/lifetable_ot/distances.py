"""One-dimensional distances between age-at-death distributions.

Every integral here is evaluated exactly on the merged breakpoint grid of the
two step CDFs, so identities such as ``W1 == |e0_A - e0_B|`` for non-crossing
survivorship hold to rounding error rather than to quadrature error.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .lifetable import AgeAtDeathDistribution, LifeTable, _atoms_of, require_valid

DEFAULT_CROSSING_TOLERANCE = 1e-10


class OverlapVariant(str, enum.Enum):
    ONE_MINUS_MIN_SUM = "one_minus_min_sum"
    JACCARD = "jaccard"


DEFAULT_OVERLAP_VARIANT = OverlapVariant.ONE_MINUS_MIN_SUM


class Dominance(str, enum.Enum):
    A_DOMINATES = "A_dominates"
    B_DOMINATES = "B_dominates"
    CROSSING = "crossing"


def _cdfs_on_grid(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution, extra=None):
    grid = np.union1d(a.locations, b.locations)
    if extra is not None:
        grid = np.union1d(grid, np.asarray(extra, dtype=float))
    fa = a.cdf()(grid)
    fb = b.cdf()(grid)
    return grid, fa, fb


def w1_distance(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution) -> float:
    """Area between the two CDFs."""
    grid, fa, fb = _cdfs_on_grid(a, b)
    return float(np.sum(np.abs(fa[:-1] - fb[:-1]) * np.diff(grid)))


def _quantile_segments(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution):
    ca = np.cumsum(a.masses)
    cb = np.cumsum(b.masses)
    ca[-1] = cb[-1] = 1.0
    u = np.union1d(ca, cb)
    u = u[u > 0]
    lo = np.concatenate(([0.0], u[:-1]))
    widths = u - lo
    keep = widths > 0
    mid = 0.5 * (lo + u)[keep]
    ia = np.minimum(np.searchsorted(ca, mid, side="left"), len(a) - 1)
    ib = np.minimum(np.searchsorted(cb, mid, side="left"), len(b) - 1)
    return widths[keep], a.locations[ia], b.locations[ib]


def wp_distance(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution, p: float = 2.0) -> float:
    """Wasserstein-p distance via the quantile (monotone) coupling."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    w, qa, qb = _quantile_segments(a, b)
    cost = float(np.sum(w * np.abs(qa - qb) ** p))
    return cost ** (1.0 / p)


def e0_gap(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution) -> float:
    """Signed life-expectancy gap ``e0(a) - e0(b)``."""
    return a.mean() - b.mean()


def e0_gap_integral(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution) -> float:
    """The same gap as the net area between survivorship curves."""
    grid, fa, fb = _cdfs_on_grid(a, b)
    return float(np.sum((fb[:-1] - fa[:-1]) * np.diff(grid)))


def age_histograms(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution):
    """Masses of both distributions summed per single-year age on a shared grid.

    Atoms carrying an interval age are binned by it; others by ``floor(location)``.
    """
    ka = a.ages if a.ages is not None else np.floor(a.locations).astype(np.int64)
    kb = b.ages if b.ages is not None else np.floor(b.locations).astype(np.int64)
    bins = np.union1d(ka, kb)
    p = np.zeros(bins.size)
    q = np.zeros(bins.size)
    np.add.at(p, np.searchsorted(bins, ka), a.masses)
    np.add.at(q, np.searchsorted(bins, kb), b.masses)
    return bins, p, q


def _kl(p, q):
    support = p > 0
    if np.any(q[support] == 0):
        return math.inf
    val = float(np.sum(p[support] * np.log(p[support] / q[support])))
    return max(val, 0.0)


def kl_divergence(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution,
                  smoothing: float = 0.0) -> float:
    """KL(a || b) in nats on single-year age histograms.

    With ``smoothing > 0`` both histograms are floored at that value and
    renormalised first; with 0 the result is ``inf`` when ``b`` misses mass
    that ``a`` has.
    """
    if smoothing < 0:
        raise DomainError("smoothing must be >= 0")
    _, p, q = age_histograms(a, b)
    if smoothing > 0:
        p = np.maximum(p, smoothing)
        q = np.maximum(q, smoothing)
        p, q = p / p.sum(), q / q.sum()
    return _kl(p, q)


def non_overlap_index(a: AgeAtDeathDistribution, b: AgeAtDeathDistribution,
                      variant=DEFAULT_OVERLAP_VARIANT) -> float:
    variant = OverlapVariant(variant)
    _, p, q = age_histograms(a, b)
    lo = np.minimum(p, q).sum()
    if variant is OverlapVariant.ONE_MINUS_MIN_SUM:
        val = 1.0 - lo
    else:
        val = 1.0 - lo / np.maximum(p, q).sum()
    return float(min(max(val, 0.0), 1.0))


class Crossing(NamedTuple):
    crossing_count: int
    dominance: Dominance


def _sign_runs(diff, tol):
    signs = np.sign(np.where(np.abs(diff) <= tol, 0.0, diff))
    nz = signs[signs != 0]
    count = int(np.count_nonzero(nz[1:] != nz[:-1]))
    if not np.any(nz < 0):
        dom = Dominance.A_DOMINATES
    elif not np.any(nz > 0):
        dom = Dominance.B_DOMINATES
    else:
        dom = Dominance.CROSSING
    return Crossing(count, dom)


def crossing_diagnostics(a: LifeTable, b: LifeTable, tolerance: float = DEFAULT_CROSSING_TOLERANCE,
                         within_interval: bool = True) -> Crossing:
    """Sign changes of ``l_A - l_B`` and which table (if any) dominates.

    Differences are compared on the radix-normalised scale; magnitudes at or
    below ``tolerance`` count as ties and never break a dominance run. With
    ``within_interval`` the survivorship step functions of the two
    distributions are also compared between integer ages, where differing
    separation factors can make them cross even when ``l(x)`` does not.
    """
    _same_grid(a, b)
    require_valid(a)
    require_valid(b)
    return _crossing(a, b, _atoms_of(a), _atoms_of(b), tolerance, within_interval)


def _same_grid(a: LifeTable, b: LifeTable):
    if len(a) != len(b) or np.any(a.ages != b.ages):
        raise DomainError("life tables must share the same age grid")


def _crossing(a, b, da, db, tolerance, within_interval=True):
    diff = a.lx / a.radix - b.lx / b.radix
    if within_interval:
        grid, fa, fb = _cdfs_on_grid(da, db, extra=a.ages)
        ints = np.isin(grid, a.ages)
        step = fb - fa
        # exact integer-age values come from the tables, not the atoms
        step[ints] = diff[np.searchsorted(a.ages, grid[ints])]
        diff = step
    return _sign_runs(diff, tolerance)


@dataclass(frozen=True)
class CompareOptions:
    p: float = 2.0
    kl_smoothing: float = 0.0
    overlap_variant: OverlapVariant = DEFAULT_OVERLAP_VARIANT
    crossing_tolerance: float = DEFAULT_CROSSING_TOLERANCE

    def __post_init__(self):
        if not self.p >= 1:
            raise DomainError(f"p must be >= 1, got {self.p}")
        if self.kl_smoothing < 0:
            raise DomainError("kl_smoothing must be >= 0")
        object.__setattr__(self, "overlap_variant", OverlapVariant(self.overlap_variant))


@dataclass(frozen=True)
class PairReport:
    label_a: str
    label_b: str
    e0_a: float
    e0_b: float
    w1: float
    wp: float
    p: float
    e0_gap_signed: float
    e0_gap_abs: float
    kl_ab: float
    kl_ba: float
    non_overlap: float
    overlap_variant: str
    crossing_count: int
    dominance: Dominance

    @property
    def kl_symmetric(self) -> float:
        return 0.5 * (self.kl_ab + self.kl_ba)

    @property
    def w1_minus_gap(self) -> float:
        return self.w1 - self.e0_gap_abs

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dominance"] = self.dominance.value
        d["kl_sym"] = self.kl_symmetric
        return d


def compare(a: LifeTable, b: LifeTable, options: CompareOptions | None = None) -> PairReport:
    """All pairwise measures for two tables on the same age grid."""
    options = options or CompareOptions()
    _same_grid(a, b)
    require_valid(a)
    require_valid(b)
    da, db = _atoms_of(a), _atoms_of(b)
    gap = e0_gap(da, db)
    crossing = _crossing(a, b, da, db, options.crossing_tolerance)
    return PairReport(
        label_a=a.label,
        label_b=b.label,
        e0_a=da.mean(),
        e0_b=db.mean(),
        w1=w1_distance(da, db),
        wp=wp_distance(da, db, options.p),
        p=float(options.p),
        e0_gap_signed=gap,
        e0_gap_abs=abs(gap),
        kl_ab=kl_divergence(da, db, options.kl_smoothing),
        kl_ba=kl_divergence(db, da, options.kl_smoothing),
        non_overlap=non_overlap_index(da, db, options.overlap_variant),
        overlap_variant=options.overlap_variant.value,
        crossing_count=crossing.crossing_count,
        dominance=crossing.dominance,
    )
