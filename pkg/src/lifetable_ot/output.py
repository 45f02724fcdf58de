"""Serialisation of study results and plot data (CSV or JSON lines).

Distances are written with 4 decimals and summary statistics with 2. Infinite
KL values appear as ``inf`` in CSV and as ``null`` plus an ``*_infinite`` flag
in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .studies import StudyResult, SummaryStats

PAIR_COLUMNS = ("index", "group", "country_a", "year_a", "country_b", "year_b", "e0_a", "e0_b",
                "w1", "wp", "p", "e0_gap_signed", "e0_gap_abs", "w1_minus_gap", "kl_ab", "kl_ba",
                "kl_sym", "non_overlap", "overlap_variant", "crossing_count", "dominance")
FLOAT_DIGITS = 4
STAT_DIGITS = 2


def _round(x, digits):
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return x
        r = round(x, digits)
        return 0.0 if r == 0 else r
    return x


def _csv_cell(x, digits=FLOAT_DIGITS):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return f"{_round(x, digits):.{digits}f}"
    return str(x)


def _json_value(x):
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return None
    return x


def pair_row(rec) -> dict:
    r = rec.report
    d = r.to_dict()
    row = {"index": rec.index, "group": rec.group, "country_a": rec.country_a,
           "year_a": rec.year_a, "country_b": rec.country_b, "year_b": rec.year_b,
           "w1_minus_gap": r.w1_minus_gap}
    row.update({k: d[k] for k in PAIR_COLUMNS if k in d})
    return {k: row[k] for k in PAIR_COLUMNS}


def summary_rows(s: SummaryStats) -> list[dict]:
    rows = [{"group": s.group, "measure": name, "min": lo, "mean": mean, "max": hi}
            for name, (lo, mean, hi) in s.measures.items()]
    return rows


def _header(result: StudyResult) -> dict:
    c = result.config
    return {"study": c.study.value, "seed": c.seed, "n": c.n,
            "years": list(c.years) if c.years else None,
            "sexes": [s.value for s in c.sexes], "year_mode": c.year_mode.value,
            "p": c.options.p, "kl_smoothing": c.options.kl_smoothing,
            "overlap_variant": c.options.overlap_variant.value,
            "rng": "numpy PCG64"}


def write_study(result: StudyResult, stream, fmt: str | None = None) -> None:
    fmt = fmt or result.config.output_format
    if fmt == "json":
        _write_json(result, stream)
    else:
        _write_csv(result, stream)


def _write_csv(result, stream):
    head = " ".join(f"{k}={json.dumps(v, separators=(',', ':'))}"
                    for k, v in _header(result).items())
    stream.write(f"# {head}\n")
    for note in result.notes:
        stream.write(f"# note: {note}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(PAIR_COLUMNS)
    for rec in result.records:
        w.writerow([_csv_cell(v) for v in pair_row(rec).values()])
    for s in result.summaries:
        stream.write(f"# summary group={s.group} n_pairs={s.n_pairs} "
                     f"pearson_r={_csv_cell(s.pearson_r, STAT_DIGITS)} "
                     f"non_crossing={s.non_crossing} kl_infinite={s.kl_infinite}\n")
        for row in summary_rows(s):
            stream.write(f"# summary group={s.group} measure={row['measure']} "
                         + " ".join(f"{k}={_csv_cell(row[k], STAT_DIGITS)}"
                                    for k in ("min", "mean", "max")) + "\n")
        for year, (mean, mx) in s.per_year.items():
            stream.write(f"# summary group={s.group} year={year} "
                         f"mean_abs_w1_minus_gap={_csv_cell(mean, FLOAT_DIGITS)} "
                         f"max_abs_w1_minus_gap={_csv_cell(mx, FLOAT_DIGITS)}\n")


def _dump(obj, stream):
    stream.write(json.dumps(obj, sort_keys=False, separators=(",", ":"), allow_nan=False))
    stream.write("\n")


def _write_json(result, stream):
    _dump({"type": "header", **_header(result), "notes": result.notes}, stream)
    for rec in result.records:
        row = pair_row(rec)
        out = {"type": "pair"}
        for k, v in row.items():
            v = _round(v, FLOAT_DIGITS)
            if isinstance(v, float) and math.isinf(v):
                out[f"{k}_infinite"] = True
            out[k] = _json_value(v)
        _dump(out, stream)
    for s in result.summaries:
        _dump({"type": "summary", "group": s.group, "n_pairs": s.n_pairs,
               "pearson_r": _json_value(_round(s.pearson_r, STAT_DIGITS)),
               "non_crossing": s.non_crossing, "kl_infinite": s.kl_infinite,
               "measures": {k: [_json_value(_round(v, STAT_DIGITS)) for v in t]
                            for k, t in s.measures.items()},
               "per_year": {str(y): [_round(v, FLOAT_DIGITS) for v in t]
                            for y, t in s.per_year.items()}}, stream)


def study_to_string(result: StudyResult, fmt: str | None = None) -> str:
    buf = io.StringIO()
    write_study(result, buf, fmt)
    return buf.getvalue()


def read_pair_rows(text: str) -> list[dict]:
    """Pair rows from a study file written by :func:`write_study` (either format)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].lstrip().startswith("{"):
        rows = [json.loads(ln) for ln in lines]
        out = []
        for r in rows:
            if r.get("type", "pair") != "pair":
                continue
            for k in list(r):
                if k.endswith("_infinite"):
                    r[k[: -len("_infinite")]] = math.inf
            out.append(r)
        return out
    body = [ln for ln in lines if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(body):
        parsed = {}
        for k, v in row.items():
            try:
                parsed[k] = int(v) if k in ("index", "year_a", "year_b", "crossing_count") \
                    else float(v)
            except ValueError:
                parsed[k] = v
        out.append(parsed)
    return out


def write_rows(rows: list[dict], stream, fmt: str = "csv", digits: int = FLOAT_DIGITS) -> None:
    """Tidy table output used for plot data."""
    if not rows:
        return
    if fmt == "json":
        for r in rows:
            _dump({k: _json_value(_round(v, digits)) for k, v in r.items()}, stream)
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(list(rows[0]))
    for r in rows:
        w.writerow([_csv_cell(v, digits) for v in r.values()])
