"""Exact discrete optimal transport, used as ground truth for the closed forms.

``solve_exact`` solves the Kantorovich transportation LP with HiGHS and knows
nothing about one-dimensional structure. ``northwest_corner_plan`` builds the
monotone coupling that is optimal in 1-d; comparing the two certifies the
quantile formula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .errors import CapacityError, DomainError
from .lifetable import AgeAtDeathDistribution

DEFAULT_MAX_ATOMS = 64
MARGINAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Coupling matrix; rows are source atoms, columns target atoms."""

    matrix: np.ndarray
    source: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        for name in ("matrix", "source", "target"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.matrix.shape != (self.source.size, self.target.size):
            raise DomainError("plan shape does not match atom counts")

    @property
    def row_sums(self):
        return self.matrix.sum(axis=1)

    @property
    def col_sums(self):
        return self.matrix.sum(axis=0)

    def cost(self, p: float = 1.0) -> float:
        """``(sum J_ij |x_i - y_j|^p)^(1/p)`` for this plan."""
        c = np.abs(self.source[:, None] - self.target[None, :]) ** p
        return float(np.sum(self.matrix * c)) ** (1.0 / p)

    def marginal_error(self, source_masses, target_masses) -> float:
        return float(max(np.max(np.abs(self.row_sums - source_masses)),
                         np.max(np.abs(self.col_sums - target_masses))))

    def is_monotone(self, atol: float = 0.0) -> bool:
        """True if no two used cells (i, j), (k, l) have i < k and j > l."""
        used = np.argwhere(self.matrix > atol)
        for (i, j), (k, l) in zip(used[:-1], used[1:]):
            if k < i or l < j:
                return False
        return True


def _atoms(d):
    if isinstance(d, AgeAtDeathDistribution):
        return d.locations, d.masses
    loc, mass = (np.asarray(v, dtype=float) for v in d)
    if loc.shape != mass.shape or loc.ndim != 1 or loc.size == 0:
        raise DomainError("atoms must be equal-length non-empty 1-d arrays")
    if np.any(mass < 0):
        raise DomainError("negative mass")
    return loc, mass


def solve_exact(a, b, p: float = 1.0, max_atoms: int = DEFAULT_MAX_ATOMS):
    """Optimal transport cost and plan between two discrete measures.

    ``a`` and ``b`` are distributions or ``(locations, masses)`` pairs; the
    locations need not be sorted. Returns ``(cost, plan)`` where cost is
    already raised to ``1/p``.
    """
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    xa, ma = _atoms(a)
    xb, mb = _atoms(b)
    for m, side in ((ma, "source"), (mb, "target")):
        if abs(m.sum() - 1.0) > MARGINAL_TOL:
            raise DomainError(f"{side} masses sum to {m.sum()!r}, not 1")
    ka, kb = np.flatnonzero(ma > 0), np.flatnonzero(mb > 0)
    if ka.size > max_atoms or kb.size > max_atoms:
        raise CapacityError(f"{max(ka.size, kb.size)} atoms exceeds the cap of {max_atoms}")

    n, m = ka.size, kb.size
    cost = (np.abs(xa[ka][:, None] - xb[kb][None, :]) ** p).ravel()
    rows = np.concatenate([np.repeat(np.arange(n), m), n + np.tile(np.arange(m), n)])
    cols = np.concatenate([np.arange(n * m), np.arange(n * m)])
    A_eq = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n + m, n * m)).tocsr()
    b_eq = np.concatenate([ma[ka], mb[kb]])
    # one marginal constraint is redundant; dropping it keeps the LP full rank
    res = linprog(cost, A_eq=A_eq[:-1], b_eq=b_eq[:-1], bounds=(0, None), method="highs-ds",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise DomainError(f"transport LP failed: {res.message}")

    sub = np.clip(res.x.reshape(n, m), 0.0, None)
    full = np.zeros((xa.size, xb.size))
    full[np.ix_(ka, kb)] = sub
    plan = TransportPlan(full, xa, xb)
    return plan.cost(p), plan


def northwest_corner_plan(a, b) -> TransportPlan:
    """Monotone coupling that fills mass greedily in sorted order."""
    xa, ma = _atoms(a)
    xb, mb = _atoms(b)
    if np.any(np.diff(xa) < 0) or np.any(np.diff(xb) < 0):
        raise DomainError("northwest-corner coupling needs atoms sorted by location")
    ca, cb = np.cumsum(ma), np.cumsum(mb)
    ca[-1] = cb[-1] = 1.0
    u = np.union1d(ca, cb)
    lo = np.concatenate(([0.0], u[:-1]))
    plan = np.zeros((xa.size, xb.size))
    for left, right in zip(lo, u):
        if right <= left:
            continue
        mid = 0.5 * (left + right)
        i = min(np.searchsorted(ca, mid, side="left"), xa.size - 1)
        j = min(np.searchsorted(cb, mid, side="left"), xb.size - 1)
        plan[i, j] += right - left
    return TransportPlan(plan, xa, xb)
