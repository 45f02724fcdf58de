"""Single-year life tables and their age-at-death distribution views.

A table is built either from central death rates (``build_from_mx``) or from
survivors and separation factors (``from_survivors``, used for published HMD
tables). Deaths in the interval starting at age ``x`` are placed as one atom at
``x + ax``; with that placement the mean age at death and the area under the
survival curve agree as an exact discrete identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

DEFAULT_RADIX = 100_000.0
DEFAULT_A0 = 0.14
DEFAULT_AX = 0.5
MASS_TOL = 1e-12


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LifeTable:
    """Complete single-year life table with an open terminal interval.

    All columns are read-only numpy arrays of equal length. ``mx`` and ``qx``
    may contain NaN when a source did not publish them; every other column is
    required.
    """

    ages: np.ndarray
    mx: np.ndarray
    qx: np.ndarray
    ax: np.ndarray
    lx: np.ndarray
    dx: np.ndarray
    Lx: np.ndarray
    Tx: np.ndarray
    ex: np.ndarray
    radix: float = DEFAULT_RADIX
    label: str = field(default="", compare=False)

    def __post_init__(self):
        n = len(self.ages)
        object.__setattr__(self, "ages", _frozen(self.ages, dtype=np.int64))
        for name in ("mx", "qx", "ax", "lx", "dx", "Lx", "Tx", "ex"):
            col = _frozen(getattr(self, name))
            if col.shape != (n,):
                raise DomainError(f"column {name} has shape {col.shape}, expected ({n},)")
            object.__setattr__(self, name, col)
        object.__setattr__(self, "radix", float(self.radix))

    def __len__(self):
        return len(self.ages)

    @property
    def open_age(self) -> int:
        """Start of the open terminal interval (omega)."""
        return int(self.ages[-1])

    @property
    def e0(self) -> float:
        return e0_survival_area(self)

    def survivorship(self) -> np.ndarray:
        """l(x) / radix at each exact age."""
        return self.lx / self.radix

    def rescaled(self, radix: float) -> "LifeTable":
        """Same table with a different initial cohort size."""
        k = radix / self.radix
        return LifeTable(self.ages, self.mx, self.qx, self.ax, self.lx * k, self.dx * k,
                         self.Lx * k, self.Tx * k, self.ex, radix, self.label)


def _complete_columns(ages, mx, qx, ax, lx, dx, radix, label=""):
    Lx = np.empty_like(lx)
    Lx[:-1] = lx[1:] + ax[:-1] * dx[:-1]
    Lx[-1] = ax[-1] * dx[-1]
    Tx = np.cumsum(Lx[::-1])[::-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ex = np.where(lx > 0, Tx / np.where(lx > 0, lx, 1.0), np.nan)
    return LifeTable(ages, mx, qx, ax, lx, dx, Lx, Tx, ex, radix, label)


def _check_ax(ax, n):
    if ax.shape != (n,):
        raise DomainError(f"ax has {ax.size} entries, expected {n}")
    if not np.all(np.isfinite(ax)):
        raise DomainError("ax contains non-finite values")
    bad = np.flatnonzero((ax[:-1] < 0) | (ax[:-1] > 1))
    if bad.size:
        raise DomainError(f"ax out of [0, 1] at age {int(bad[0])}: {ax[bad[0]]}")
    if ax[-1] <= 0:
        raise DomainError(f"terminal ax must be positive, got {ax[-1]}")


def default_ax(mx, a0=DEFAULT_A0):
    """Separation factors used when none are supplied: a0, then 0.5, then 1/m at the open age."""
    mx = np.asarray(mx, dtype=float)
    ax = np.full(mx.shape, DEFAULT_AX)
    ax[0] = a0
    if mx[-1] <= 0:
        raise DomainError("terminal mx must be positive to derive the open-interval ax = 1/mx")
    ax[-1] = 1.0 / mx[-1]
    return ax


def build_from_mx(mx, ax=None, radix=DEFAULT_RADIX, *, a0=DEFAULT_A0, label="") -> LifeTable:
    """Life table from single-year central death rates.

    Non-terminal probabilities of dying use ``q = m / (1 + (1 - a) m)``,
    clamped to 1; the open interval has ``q = 1``. When ``ax`` is omitted the
    defaults of :func:`default_ax` apply.
    """
    mx = np.asarray(mx, dtype=float)
    if mx.ndim != 1 or mx.size == 0:
        raise DomainError("mx must be a non-empty 1-d sequence")
    if mx.size < 2:
        raise DomainError("at least two age groups are required")
    if not np.all(np.isfinite(mx)):
        raise DomainError("mx contains non-finite values")
    neg = np.flatnonzero(mx < 0)
    if neg.size:
        raise DomainError(f"negative mx at age {int(neg[0])}: {mx[neg[0]]}")
    if radix <= 0:
        raise DomainError("radix must be positive")
    ax = default_ax(mx, a0) if ax is None else np.asarray(ax, dtype=float)
    _check_ax(ax, mx.size)

    qx = np.minimum(mx / (1.0 + (1.0 - ax) * mx), 1.0)
    qx[-1] = 1.0
    lx = np.empty_like(mx)
    dx = np.empty_like(mx)
    lx[0] = radix
    for i in range(mx.size - 1):
        dx[i] = lx[i] * qx[i]
        lx[i + 1] = lx[i] - dx[i]
    dx[-1] = lx[-1]
    return _complete_columns(np.arange(mx.size), mx, qx, ax, lx, dx, radix, label)


def from_survivors(lx, ax, mx=None, qx=None, label="") -> LifeTable:
    """Life table from survivors at exact ages and separation factors.

    Deaths are taken as first differences of ``lx`` (the open interval holds
    the last survivors), so the result conserves mass exactly. ``mx``/``qx``
    are carried through when given; otherwise ``qx`` is derived and ``mx``
    left as NaN.
    """
    lx = np.asarray(lx, dtype=float)
    ax = np.asarray(ax, dtype=float)
    n = lx.size
    if n < 2:
        raise DomainError("at least two age groups are required")
    if not np.all(np.isfinite(lx)):
        raise DomainError("lx contains non-finite values")
    _check_ax(ax, n)
    radix = float(lx[0])
    if radix <= 0:
        raise DomainError("l(0) must be positive")
    dx = np.empty_like(lx)
    dx[:-1] = lx[:-1] - lx[1:]
    dx[-1] = lx[-1]
    if qx is None:
        with np.errstate(divide="ignore", invalid="ignore"):
            qx = np.where(lx > 0, dx / np.where(lx > 0, lx, 1.0), 1.0)
        qx[-1] = 1.0
    mx = np.full(n, np.nan) if mx is None else np.asarray(mx, dtype=float)
    return _complete_columns(np.arange(n), mx, np.asarray(qx, dtype=float), ax, lx, dx,
                             radix, label)


@dataclass(frozen=True)
class Violation:
    column: str
    age: int | None
    magnitude: float
    message: str

    def __str__(self):
        where = "" if self.age is None else f" at age {self.age}"
        return f"{self.column}{where}: {self.message} (magnitude {self.magnitude:.6g})"


def validate(table: LifeTable, rtol: float = 1e-9) -> list[Violation]:
    """Check every structural invariant; return one violation per failure.

    Person-count tolerances are ``rtol * radix``; year tolerances are ``rtol``
    scaled by the largest magnitude involved.
    """
    out: list[Violation] = []
    radix = table.radix
    tol = rtol * max(radix, 1.0)
    n = len(table)

    def add(column, idx, magnitude, message):
        age = None if idx is None else int(table.ages[idx])
        out.append(Violation(column, age, float(magnitude), message))

    if n < 2:
        add("ages", None, n, "fewer than two age groups")
        return out
    if table.ages[0] != 0 or np.any(np.diff(table.ages) != 1):
        add("ages", None, 0.0, "ages must be 0, 1, 2, ... in steps of 1")
    if not radix > 0:
        add("radix", None, radix, "radix must be positive")
        return out

    lx, dx, ax = table.lx, table.dx, table.ax
    if abs(lx[0] - radix) > tol:
        add("lx", 0, lx[0] - radix, "l(0) differs from radix")
    for i in np.flatnonzero(np.diff(lx) > tol):
        add("lx", i + 1, lx[i + 1] - lx[i], "lx increases")
    for i in np.flatnonzero(dx < -tol):
        add("dx", i, dx[i], "negative deaths")
    step = lx[:-1] - dx[:-1] - lx[1:]
    for i in np.flatnonzero(np.abs(step) > tol):
        add("lx", i + 1, step[i], "l(x+1) != l(x) - d(x)")
    total = dx.sum() - radix
    if abs(total) > tol:
        add("dx", None, total, "deaths do not sum to radix")
    if abs(dx[-1] - lx[-1]) > tol:
        add("dx", n - 1, dx[-1] - lx[-1], "open interval deaths differ from survivors")

    if not np.all(np.isfinite(ax)):
        for i in np.flatnonzero(~np.isfinite(ax)):
            add("ax", i, np.nan, "missing ax")
    else:
        for i in np.flatnonzero((ax[:-1] < 0) | (ax[:-1] > 1)):
            add("ax", i, ax[i], "ax outside [0, 1]")
        if ax[-1] <= 0:
            add("ax", n - 1, ax[-1], "terminal ax must be positive")

    qx = table.qx
    fin = np.isfinite(qx)
    for i in np.flatnonzero(fin & ((qx < -rtol) | (qx > 1 + rtol))):
        add("qx", i, qx[i], "qx outside [0, 1]")
    if fin[-1] and abs(qx[-1] - 1.0) > rtol:
        add("qx", n - 1, qx[-1] - 1.0, "terminal qx must be 1")
    mx = table.mx
    for i in np.flatnonzero(np.isfinite(mx) & (mx < 0)):
        add("mx", i, mx[i], "negative mx")

    expect_L = np.append(lx[1:] + ax[:-1] * dx[:-1], ax[-1] * dx[-1])
    for i in np.flatnonzero(np.abs(table.Lx - expect_L) > tol):
        add("Lx", i, table.Lx[i] - expect_L[i], "Lx inconsistent with lx, dx, ax")
    expect_T = np.cumsum(table.Lx[::-1])[::-1]
    ttol = rtol * max(float(np.nanmax(np.abs(expect_T))), 1.0) if n else tol
    for i in np.flatnonzero(np.abs(table.Tx - expect_T) > ttol):
        add("Tx", i, table.Tx[i] - expect_T[i], "Tx is not the tail sum of Lx")
    alive = lx > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        expect_e = table.Tx / lx
    bad_e = alive & ~(np.abs(table.ex - expect_e) <= rtol * np.maximum(np.abs(expect_e), 1.0))
    for i in np.flatnonzero(bad_e):
        add("ex", i, table.ex[i] - expect_e[i], "ex != Tx / lx")
    return out


def require_valid(table: LifeTable, rtol: float = 1e-9) -> LifeTable:
    problems = validate(table, rtol)
    if problems:
        listed = "; ".join(str(p) for p in problems[:5])
        more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
        raise DomainError(f"invalid life table {table.label!r}: {listed}{more}")
    return table


@dataclass(frozen=True, eq=False)
class AgeAtDeathDistribution:
    """Discrete probability measure over ages at death.

    ``ages`` optionally records the single-year interval each atom came from;
    histogram-based measures use it for binning.
    """

    locations: np.ndarray
    masses: np.ndarray
    ages: np.ndarray | None = None

    def __post_init__(self):
        loc = _frozen(self.locations)
        m = _frozen(self.masses)
        if loc.ndim != 1 or loc.shape != m.shape or loc.size == 0:
            raise DomainError("locations and masses must be equal-length non-empty 1-d arrays")
        if not (np.all(np.isfinite(loc)) and np.all(np.isfinite(m))):
            raise DomainError("non-finite location or mass")
        if np.any(np.diff(loc) <= 0):
            raise DomainError("locations must be strictly increasing")
        if np.any(m < 0):
            raise DomainError("negative mass")
        if abs(m.sum() - 1.0) > MASS_TOL:
            raise DomainError(f"masses sum to {m.sum()!r}, not 1")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", m)
        if self.ages is not None:
            ages = _frozen(self.ages, dtype=np.int64)
            if ages.shape != loc.shape:
                raise DomainError("ages must align with locations")
            object.__setattr__(self, "ages", ages)

    @classmethod
    def from_weights(cls, locations, weights, ages=None):
        """Normalise nonnegative weights and sort by location; equal locations are merged."""
        loc = np.asarray(locations, dtype=float)
        w = np.asarray(weights, dtype=float)
        if loc.shape != w.shape or loc.ndim != 1:
            raise DomainError("locations and weights must be equal-length 1-d arrays")
        if np.any(w < 0) or w.sum() <= 0:
            raise DomainError("weights must be nonnegative with positive total")
        uniq, inv = np.unique(loc, return_inverse=True)
        merged = np.bincount(inv, weights=w, minlength=uniq.size)
        if ages is not None and uniq.size != loc.size:
            raise DomainError("cannot merge atoms that carry interval ages")
        if ages is not None:
            ages = np.asarray(ages)[np.argsort(loc, kind="stable")]
        return cls(uniq, merged / merged.sum(), ages)

    def __len__(self):
        return self.locations.size

    def mean(self) -> float:
        return e0_mean(self)

    def shifted(self, c: float) -> "AgeAtDeathDistribution":
        return AgeAtDeathDistribution(self.locations + c, self.masses)

    def cdf(self) -> "StepCdf":
        return step_cdf(self)


@dataclass(frozen=True, eq=False)
class StepCdf:
    """Right-continuous step CDF: ``F(t) = values[k]`` for ``breakpoints[k] <= t < breakpoints[k+1]``."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = _frozen(self.breakpoints)
        v = _frozen(self.values)
        if bp.shape != v.shape or bp.size == 0:
            raise DomainError("breakpoints and values must be equal-length and non-empty")
        if np.any(np.diff(v) < 0):
            raise DomainError("CDF values must be non-decreasing")
        if abs(v[-1] - 1.0) > MASS_TOL:
            raise DomainError("CDF must end at 1")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        out = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], 0.0)
        return out if out.ndim else float(out)

    def survival(self, t):
        return 1.0 - self(t)


def step_cdf(dist: AgeAtDeathDistribution) -> StepCdf:
    values = np.cumsum(dist.masses)
    values[-1] = 1.0
    return StepCdf(dist.locations, np.minimum(values, 1.0))


def to_distribution(table: LifeTable) -> AgeAtDeathDistribution:
    """Deaths as atoms of mass ``d(x)/radix`` at ``x + a(x)``."""
    require_valid(table)
    return _atoms_of(table)


def _atoms_of(table: LifeTable) -> AgeAtDeathDistribution:
    masses = np.clip(table.dx / table.radix, 0.0, None)
    masses = masses / masses.sum()
    return AgeAtDeathDistribution(table.ages + table.ax, masses, table.ages)


def e0_mean(dist: AgeAtDeathDistribution) -> float:
    """Life expectancy as the mean age at death."""
    return float(np.dot(dist.locations, dist.masses))


def e0_survival_area(table: LifeTable) -> float:
    """Life expectancy as the area under the survival curve, ``sum(Lx) / radix``."""
    require_valid(table)
    return float(table.Lx.sum() / table.radix)
