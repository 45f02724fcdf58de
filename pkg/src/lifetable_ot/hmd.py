"""Reader and writer for Human Mortality Database 1x1 life-table text files.

Layout::

    Denmark, Life tables (period 1x1), Total  Last modified: ...
    <blank>
       Year      Age        mx       qx    ax      lx      dx      Lx       Tx     ex
       1887        0   0.16184  0.14371  0.30  100000   14371   ...
       ...
       1887     110+   0.75000  1.00000  1.33       0       0   ...

Parsing is token based. Missing values (``.``) become NaN and are tracked in a
mask, never replaced by zero.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CompletenessError, DomainError, FormatError, NotFoundError
from .lifetable import LifeTable, from_survivors, require_valid

COLUMNS = ("Year", "Age", "mx", "qx", "ax", "lx", "dx", "Lx", "Tx", "ex")
VALUE_COLUMNS = COLUMNS[2:]
# a year missing any published column except mx is treated as unpublished
REQUIRED = ("ax", "lx", "dx", "qx", "Lx", "Tx", "ex")
OPEN_AGE = 110
# published decimals per column; None means integer
PRECISION = {"mx": 5, "qx": 5, "ax": 2, "lx": None, "dx": None, "Lx": None, "Tx": None, "ex": 2}
DX_TOLERANCE = 1.5


class Sex(str, enum.Enum):
    FEMALE = "female"
    MALE = "male"
    TOTAL = "total"

    @classmethod
    def parse(cls, text: str) -> "Sex":
        t = text.strip().lower()
        aliases = {"f": cls.FEMALE, "females": cls.FEMALE, "women": cls.FEMALE,
                   "m": cls.MALE, "males": cls.MALE, "men": cls.MALE,
                   "b": cls.TOTAL, "both": cls.TOTAL, "t": cls.TOTAL}
        return aliases.get(t) or cls(t)


class TableKind(str, enum.Enum):
    PERIOD = "period"
    COHORT = "cohort"


@dataclass(frozen=True)
class ParseIssue:
    year: str
    line: int
    message: str

    def __str__(self):
        return f"line {self.line} (year {self.year}): {self.message}"


@dataclass(eq=False)
class HmdFile:
    """Parsed rows of one HMD life-table file, column-wise."""

    country: str
    sex: Sex | None
    kind: TableKind | None
    title: str
    year_labels: np.ndarray
    years: np.ndarray
    ages: np.ndarray
    open_interval: np.ndarray
    values: dict
    lines: np.ndarray
    issues: list = field(default_factory=list)

    def __len__(self):
        return self.ages.size

    def labels(self) -> list[str]:
        """Distinct year (or cohort) labels in file order."""
        seen = dict.fromkeys(self.year_labels.tolist())
        return list(seen)

    def available_years(self) -> list[int]:
        return sorted({int(y) for y in self.years})

    def _rows(self, year) -> np.ndarray:
        label = _resolve_label(self, year)
        return np.flatnonzero(self.year_labels == label)

    def _missing_in(self, idx, columns) -> tuple[str, ...]:
        # ex is undefined once nobody survives, so a blank there is not a gap
        extinct = self.values["lx"][idx] == 0
        out = []
        for c in columns:
            gap = np.isnan(self.values[c][idx])
            if c == "ex":
                gap &= ~extinct
            if gap.any():
                out.append(c)
        return tuple(out)

    def missing(self, year) -> tuple[str, ...]:
        """Columns with at least one missing value in the given year."""
        return self._missing_in(self._rows(year), VALUE_COLUMNS)

    def is_complete(self, year, columns=REQUIRED) -> bool:
        try:
            idx = self._rows(year)
        except NotFoundError:
            return False
        if not _consecutive(self.ages[idx], self.open_interval[idx]):
            return False
        return not self._missing_in(idx, columns)

    def complete_years(self, columns=REQUIRED) -> list[int]:
        return [y for y in self.available_years() if self.is_complete(y, columns)]

    def column(self, name: str, year) -> np.ndarray:
        return self.values[name][self._rows(year)]


def _resolve_label(f: HmdFile, year) -> str:
    label = str(year)
    if np.any(f.year_labels == label):
        return label
    # territorial-change years are published as "1921-" / "1921+"; prefer the later boundary
    if np.any(f.year_labels == label + "+"):
        return label + "+"
    raise NotFoundError(f"{f.country or 'file'}: year {year} not present")


def _full_grid(ages, open_flags):
    n = ages.size
    return (n == OPEN_AGE + 1 and np.array_equal(ages, np.arange(n))
            and open_flags[-1] and not open_flags[:-1].any())


def _consecutive(ages, open_flags):
    return (ages.size >= 2 and np.array_equal(ages, np.arange(ages.size))
            and open_flags[-1] and not open_flags[:-1].any())


def _is_header(tokens):
    return [t.lower() for t in tokens] == [c.lower() for c in COLUMNS]


def _parse_title(title: str):
    country = title.split(",")[0].strip()
    low = title.lower()
    sex = None
    for word, s in (("female", Sex.FEMALE), ("male", Sex.MALE), ("total", Sex.TOTAL),
                    ("both", Sex.TOTAL)):
        if re.search(rf"\b{word}s?\b", low):
            sex = s
            break
    kind = None
    if "cohort" in low:
        kind = TableKind.COHORT
    elif "period" in low:
        kind = TableKind.PERIOD
    return country, sex, kind


def parse_hmd(text: str, *, strict: bool = True, source=None, country: str | None = None,
              sex: Sex | str | None = None, kind: TableKind | str | None = None) -> HmdFile:
    """Parse the contents of an HMD 1x1 life-table file.

    In strict mode every year must carry the full 0..110+ grid. Lenient mode
    accepts any increasing age list ending in an open ``N+`` row, which is
    what small test fixtures use. Decreasing-``lx`` anomalies are recorded in
    ``issues`` rather than raised.
    """
    lines = text.splitlines()
    i = 0
    while i < len(lines) and not lines[i].strip():
        i += 1
    if i == len(lines):
        raise FormatError("empty file", source=source)
    title = lines[i].strip()
    if _is_header(lines[i].split()):
        raise FormatError("missing title line before the column header", i + 1, source)
    i += 1
    while i < len(lines) and not lines[i].strip():
        i += 1
    if i == len(lines) or not _is_header(lines[i].split()):
        got = lines[i].strip() if i < len(lines) else "<end of file>"
        raise FormatError(f"expected column header {' '.join(COLUMNS)!r}, got {got!r}",
                          min(i + 1, len(lines)), source)
    header_line = i + 1

    labels, ages, opens, nums, lineno = [], [], [], [], []
    seen = set()
    for j in range(header_line, len(lines)):
        toks = lines[j].split()
        if not toks:
            continue
        ln = j + 1
        if len(toks) != len(COLUMNS):
            raise FormatError(f"expected {len(COLUMNS)} fields, found {len(toks)}", ln, source)
        year_tok, age_tok = toks[0], toks[1]
        if not re.fullmatch(r"\d{3,4}[+-]?", year_tok):
            raise FormatError(f"bad Year field {year_tok!r}", ln, source)
        m = re.fullmatch(r"(\d+)(\+?)", age_tok)
        if not m:
            raise FormatError(f"bad Age field {age_tok!r}", ln, source)
        key = (year_tok, int(m.group(1)))
        if key in seen:
            raise FormatError(f"duplicate row for year {year_tok}, age {age_tok}", ln, source)
        seen.add(key)
        row = []
        for name, tok in zip(VALUE_COLUMNS, toks[2:]):
            if tok == ".":
                row.append(np.nan)
                continue
            try:
                row.append(float(tok))
            except ValueError:
                raise FormatError(f"non-numeric {name} value {tok!r}", ln, source) from None
        labels.append(year_tok)
        ages.append(key[1])
        opens.append(bool(m.group(2)))
        nums.append(row)
        lineno.append(ln)
    if not labels:
        raise FormatError("no data rows", header_line, source)

    arr = np.array(nums, dtype=float).reshape(len(nums), len(VALUE_COLUMNS))
    t_country, t_sex, t_kind = _parse_title(title)
    f = HmdFile(
        country=country or t_country,
        sex=Sex.parse(sex) if isinstance(sex, str) else (sex or t_sex),
        kind=TableKind(kind) if kind is not None else t_kind,
        title=title,
        year_labels=np.array(labels),
        years=np.array([int(y.rstrip("+-")) for y in labels], dtype=np.int64),
        ages=np.array(ages, dtype=np.int64),
        open_interval=np.array(opens, dtype=bool),
        values={c: arr[:, k] for k, c in enumerate(VALUE_COLUMNS)},
        lines=np.array(lineno, dtype=np.int64),
    )
    _check_years(f, strict, source)
    return f


def _check_years(f: HmdFile, strict: bool, source):
    for label in f.labels():
        idx = np.flatnonzero(f.year_labels == label)
        a, o, ln = f.ages[idx], f.open_interval[idx], f.lines[idx]
        if np.any(np.diff(a) <= 0):
            raise FormatError(f"ages not increasing in year {label}", int(ln[0]), source)
        if o[:-1].any() or not o[-1]:
            msg = f"year {label} must end with exactly one open age row (e.g. 110+)"
            raise FormatError(msg, int(ln[-1]), source)
        if strict and not _full_grid(a, o):
            msg = f"year {label} has {a.size} rows, expected ages 0..{OPEN_AGE}+ ({OPEN_AGE + 1} rows)"
            raise FormatError(msg, int(ln[0]), source)
        if a[0] != 0:
            raise FormatError(f"year {label} does not start at age 0", int(ln[0]), source)
        lx = f.values["lx"][idx]
        fin = np.flatnonzero(np.isfinite(lx))
        for k in np.flatnonzero(np.diff(lx[fin]) > 0):
            f.issues.append(ParseIssue(label, int(ln[fin[k + 1]]), "lx increases"))


def extract_table(f: HmdFile, year) -> LifeTable:
    """Life table for one year (or birth cohort).

    Survivors and separation factors are taken as published; deaths and the
    person-year columns are recomputed from them so the result is exactly
    consistent. Published deaths are cross-checked against the survivor
    differences to within rounding.
    """
    idx = f._rows(year)
    missing = f._missing_in(idx, REQUIRED)
    if missing:
        raise CompletenessError(
            f"{f.country} {year}: missing values in required column(s) {', '.join(missing)}",
            missing)
    ages = f.ages[idx]
    if not np.array_equal(ages, np.arange(ages.size)):
        raise DomainError(f"{f.country} {year}: ages are not a consecutive single-year grid")
    v = {c: f.values[c][idx] for c in VALUE_COLUMNS}
    label = f"{f.country} {year}" + (f" {f.sex.value}" if f.sex else "")
    table = from_survivors(v["lx"], v["ax"], mx=v["mx"], qx=v["qx"], label=label)
    off = np.abs(table.dx - v["dx"])
    if np.any(off > DX_TOLERANCE):
        k = int(np.argmax(off))
        raise DomainError(f"{label}: published dx at age {k} differs from lx differences "
                          f"by {off[k]:.3g} persons")
    return require_valid(table)


def _fmt(value, name):
    if np.isnan(value):
        return "."
    digits = PRECISION[name]
    if digits is None:
        return str(int(round(value)))
    return f"{value:.{digits}f}"


def serialize_hmd(f: HmdFile) -> str:
    """Render an :class:`HmdFile` back to HMD layout at published precision."""
    widths = (7, 12, 11, 9, 6, 8, 8, 8, 9, 7)
    out = [f.title, "", "".join(c.rjust(w) for c, w in zip(COLUMNS, widths))]
    for r in range(len(f)):
        age = f"{f.ages[r]}+" if f.open_interval[r] else str(f.ages[r])
        fields = [f.year_labels[r], age] + [_fmt(f.values[c][r], c) for c in VALUE_COLUMNS]
        out.append("".join(t.rjust(w) for t, w in zip(fields, widths)))
    return "\n".join(out) + "\n"


_FILE_RE = re.compile(r"(?:(?P<code>[A-Z_]+)\.)?(?P<sex>[fmb])lt(?P<kind>per|coh)_1x1", re.I)


def describe_path(path) -> tuple[str | None, Sex | None, TableKind | None]:
    """Country code, sex and kind implied by an HMD file name, where present.

    Handles both ``DNK.fltper_1x1.txt`` and ``DNK/STATS/fltper_1x1.txt``.
    """
    p = Path(path)
    m = _FILE_RE.search(p.name)
    if not m:
        return None, None, None
    code = m.group("code")
    if not code:
        parents = [q.name for q in p.parents]
        if parents and parents[0].upper() == "STATS" and len(parents) > 1:
            code = parents[1]
    sex = {"f": Sex.FEMALE, "m": Sex.MALE, "b": Sex.TOTAL}[m.group("sex").lower()]
    kind = TableKind.PERIOD if m.group("kind").lower() == "per" else TableKind.COHORT
    return code, sex, kind


def load_hmd(path, *, strict: bool = True) -> HmdFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise NotFoundError(f"cannot read {path}: {exc.strerror}") from exc
    code, sex, kind = describe_path(path)
    f = parse_hmd(text, strict=strict, source=path, country=code)
    if f.sex is None:
        f.sex = sex
    if f.kind is None:
        f.kind = kind
    return f


def tables_to_hmd(tables: dict, title: str) -> str:
    """HMD-layout text for ``{year: LifeTable}``; the open age is written as ``N+``."""
    labels, ages, opens, rows = [], [], [], []
    for year, t in tables.items():
        n = len(t)
        labels += [str(year)] * n
        ages += list(t.ages)
        opens += [False] * (n - 1) + [True]
        rows.append(np.column_stack([getattr(t, c) for c in VALUE_COLUMNS]))
    arr = np.vstack(rows)
    f = HmdFile(country="", sex=None, kind=None, title=title,
                year_labels=np.array(labels), years=np.array([int(y) for y in labels]),
                ages=np.array(ages), open_interval=np.array(opens),
                values={c: arr[:, k] for k, c in enumerate(VALUE_COLUMNS)},
                lines=np.zeros(len(labels), dtype=np.int64))
    return serialize_hmd(f)
