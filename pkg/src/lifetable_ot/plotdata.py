"""Tidy tables behind the usual figures: histograms, scatter plots and overlays.

Nothing is rendered; each function returns a list of flat dict rows.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping

import numpy as np

from .errors import DomainError
from .lifetable import LifeTable, to_distribution

DEFAULT_BIN_WIDTH = 0.5


class PlotKind(str, enum.Enum):
    HISTOGRAM = "histogram"
    SCATTER = "scatter"
    CDF_OVERLAY = "cdf_overlay"
    DISTRIBUTION_OVERLAY = "distribution_overlay"


def _get(item, name):
    if isinstance(item, Mapping):
        return item[name]
    report = getattr(item, "report", item)
    if name == "kl_sym":
        return report.kl_symmetric
    return getattr(report, name)


def histogram_rows(reports, bin_width=DEFAULT_BIN_WIDTH, measures=("w1", "e0_gap_abs")):
    """Counts per bin of width ``bin_width`` starting at 0, one block per measure."""
    if bin_width <= 0:
        raise DomainError("bin width must be positive")
    vals = {m: np.array([_get(r, m) for r in reports], dtype=float) for m in measures}
    top = max(float(v.max()) for v in vals.values())
    nbins = max(int(math.floor(top / bin_width)) + 1, 1)
    edges = np.arange(nbins + 1) * bin_width
    rows = []
    for m, v in vals.items():
        idx = np.clip(np.floor(v / bin_width).astype(int), 0, nbins - 1)
        counts = np.bincount(idx, minlength=nbins)
        rows += [{"measure": m, "bin_left": float(edges[k]), "bin_right": float(edges[k + 1]),
                  "count": int(counts[k])} for k in range(nbins)]
    return rows


def scatter_rows(reports):
    return [{"w1": float(_get(r, "w1")), "e0_gap_abs": float(_get(r, "e0_gap_abs")),
             "kl_sym": float(_get(r, "kl_sym")), "non_overlap": float(_get(r, "non_overlap"))}
            for r in reports]


def _check_pair(pair):
    try:
        a, b = pair
    except (TypeError, ValueError):
        raise DomainError("overlays need exactly one pair of life tables") from None
    if not (isinstance(a, LifeTable) and isinstance(b, LifeTable)):
        raise DomainError("overlays need exactly one pair of life tables")
    if len(a) != len(b) or np.any(a.ages != b.ages):
        raise DomainError("life tables must share the same age grid")
    return a, b


def cdf_overlay_rows(pair):
    """CDF and survivorship of both tables at every exact age."""
    a, b = _check_pair(pair)
    sa, sb = a.survivorship(), b.survivorship()
    return [{"age": int(x), "cdf_a": float(1 - sa[i]), "cdf_b": float(1 - sb[i]),
             "surv_a": float(sa[i]), "surv_b": float(sb[i])} for i, x in enumerate(a.ages)]


def distribution_overlay_rows(pair):
    """Age-at-death masses and atom locations of both tables."""
    a, b = _check_pair(pair)
    da, db = to_distribution(a), to_distribution(b)
    return [{"age": int(x), "location_a": float(da.locations[i]), "mass_a": float(da.masses[i]),
             "location_b": float(db.locations[i]), "mass_b": float(db.masses[i])}
            for i, x in enumerate(a.ages)]


def emit_plot_data(source, kind, bin_width=DEFAULT_BIN_WIDTH):
    """Rows for one plot kind.

    ``source`` is a sequence of reports (``PairReport``, study records or
    dict rows) for histogram/scatter, or a ``(table_a, table_b)`` pair for the
    overlays.
    """
    kind = PlotKind(kind)
    if source is None or len(source) == 0:
        raise DomainError("no data to plot")
    if kind is PlotKind.HISTOGRAM:
        return histogram_rows(source, bin_width)
    if kind is PlotKind.SCATTER:
        return scatter_rows(source)
    if kind is PlotKind.CDF_OVERLAY:
        return cdf_overlay_rows(source)
    return distribution_overlay_rows(source)
