"""Batch comparisons over a directory of HMD life-table files.

Four designs are supported: a seeded random sample of country pairs in a
single year each, every country pair in every year of a range (by sex),
women against men within each country-year, and all cross-population pairs of
birth-cohort tables. Each produces an ordered list of :class:`PairRecord` and
one :class:`SummaryStats` per group; the output is a pure function of the
:class:`StudyConfig`.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .distances import CompareOptions, Dominance, PairReport, compare
from .errors import FormatError, LifeTableOTError, SetupError
from .hmd import HmdFile, Sex, TableKind, describe_path, extract_table, load_hmd

log = logging.getLogger(__name__)

DATA_DIR_ENV = "HMD_DATA_DIR"
COHORT_COUNTRIES = ("DNK", "FIN", "FRATNP", "ISL", "ITA", "NLD", "NOR", "ESP", "SWE", "CHE",
                    "GBRTENW")
COHORT_PAIR_COUNT = 100_730


class StudyKind(str, enum.Enum):
    SAMPLE_PAIRS = "sample_pairs"
    ALL_PAIRS_BY_YEAR = "all_pairs_by_year"
    SEX_GAP = "sex_gap"
    COHORT_PAIRS = "cohort_pairs"


class YearMode(str, enum.Enum):
    PER_PAIR = "per_pair"
    GLOBAL = "global"


@dataclass(frozen=True)
class StudyConfig:
    data_dir: Path | None = None
    study: StudyKind = StudyKind.SAMPLE_PAIRS
    n: int = 5000
    years: tuple[int, int] | None = None
    sexes: tuple[Sex, ...] | None = None
    seed: int = 20231
    options: CompareOptions = field(default_factory=CompareOptions)
    output_format: str = "csv"
    year_mode: YearMode = YearMode.PER_PAIR
    countries: tuple[str, ...] | None = None
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "study", StudyKind(self.study))
        object.__setattr__(self, "year_mode", YearMode(self.year_mode))
        sexes = self.sexes
        if sexes is None:
            sexes = ((Sex.TOTAL,) if self.study is StudyKind.SAMPLE_PAIRS
                     else (Sex.FEMALE, Sex.MALE))
        object.__setattr__(self, "sexes", tuple(Sex.parse(s) if isinstance(s, str) else s
                                                for s in sexes))
        if self.data_dir is None:
            env = os.environ.get(DATA_DIR_ENV)
            if env:
                object.__setattr__(self, "data_dir", Path(env))
        elif not isinstance(self.data_dir, Path):
            object.__setattr__(self, "data_dir", Path(self.data_dir))
        if self.n < 1:
            raise SetupError("sample size must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise SetupError("seed must be a 64-bit unsigned integer")
        if self.output_format not in ("csv", "json"):
            raise SetupError(f"unknown output format {self.output_format!r}")

    def in_range(self, year: int) -> bool:
        return self.years is None or self.years[0] <= year <= self.years[1]


@dataclass(frozen=True)
class PairRecord:
    index: int
    group: str
    country_a: str
    year_a: int
    country_b: str
    year_b: int
    report: PairReport


@dataclass(frozen=True)
class SummaryStats:
    group: str
    n_pairs: int
    measures: dict
    pearson_r: float
    per_year: dict
    non_crossing: int
    kl_infinite: int = 0


@dataclass
class StudyResult:
    config: StudyConfig
    records: list
    summaries: list
    notes: list = field(default_factory=list)


class HmdCorpus:
    """Every parseable HMD 1x1 life-table file under a directory.

    Any file that matches the HMD naming pattern but fails to parse aborts
    loading with an error naming the file.
    """

    def __init__(self, data_dir, kind: TableKind = TableKind.PERIOD, sexes=None):
        if data_dir is None:
            raise SetupError(f"no data directory given and ${DATA_DIR_ENV} is not set")
        self.root = Path(data_dir)
        if not self.root.is_dir():
            raise SetupError(f"data directory {self.root} does not exist")
        self.kind = kind
        self.files: dict[tuple[str, Sex], HmdFile] = {}
        for path in sorted(self.root.rglob("*")):
            if not path.is_file():
                continue
            code, sex, k = describe_path(path)
            if k is not kind or sex is None or (sexes and sex not in sexes):
                continue
            try:
                f = load_hmd(path)
            except FormatError:
                raise
            except LifeTableOTError as exc:
                raise type(exc)(f"{path}: {exc}") from exc
            code = code or f.country
            key = (code, sex)
            if key in self.files:
                raise SetupError(f"duplicate file for {code} {sex.value}: {path}")
            f.country = code
            self.files[key] = f
        self._complete = {key: frozenset(f.complete_years()) for key, f in self.files.items()}
        self._tables = lru_cache(maxsize=None)(self._extract)

    def countries(self, sex: Sex) -> list[str]:
        return sorted(c for (c, s) in self.files if s is sex)

    def complete_years(self, country: str, sex: Sex) -> frozenset:
        return self._complete.get((country, sex), frozenset())

    def _extract(self, country, sex, year):
        return extract_table(self.files[(country, sex)], year)

    def table(self, country: str, sex: Sex, year: int):
        return self._tables(country, sex, year)


def _compare_one(args):
    a, b, options = args
    return compare(a, b, options)


def _evaluate(pairs, corpus: HmdCorpus, config: StudyConfig, group_of):
    """Compare each (country_a, sex_a, year_a, country_b, sex_b, year_b) in order."""
    jobs = [(corpus.table(ca, sa, ya), corpus.table(cb, sb, yb), config.options)
            for ca, sa, ya, cb, sb, yb in pairs]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            reports = list(pool.map(_compare_one, jobs, chunksize=64))
    else:
        reports = [_compare_one(j) for j in jobs]
    return [PairRecord(i, group_of(p), p[0], p[2], p[3], p[5], r)
            for i, (p, r) in enumerate(zip(pairs, reports))]


def _pearson(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2 or np.std(x) == 0 or np.std(y) == 0:
        return math.nan
    return float(np.clip(np.corrcoef(x, y)[0, 1], -1.0, 1.0))


MEASURES = ("w1", "e0_gap_abs", "wp", "kl_sym", "non_overlap", "abs_w1_minus_gap")


def _measure(rec: PairRecord, name: str) -> float:
    r = rec.report
    if name == "kl_sym":
        return r.kl_symmetric
    if name == "abs_w1_minus_gap":
        return abs(r.w1 - r.e0_gap_abs)
    return getattr(r, name)


def summarize(records, group: str) -> SummaryStats:
    """Min/mean/max per measure, Pearson r(W1, |gap|), and per-year discrepancy."""
    recs = [r for r in records if r.group == group]
    if not recs:
        raise SetupError(f"no pairs in group {group!r}")
    measures = {}
    kl_inf = 0
    for name in MEASURES:
        vals = np.array([_measure(r, name) for r in recs], dtype=float)
        if name == "kl_sym":
            kl_inf = int(np.count_nonzero(np.isinf(vals)))
            vals = vals[np.isfinite(vals)]
        if vals.size:
            measures[name] = (float(vals.min()), float(vals.mean()), float(vals.max()))
        else:
            measures[name] = (math.nan, math.nan, math.nan)
    per_year = {}
    for year in sorted({r.year_a for r in recs}):
        d = np.array([abs(r.report.w1 - r.report.e0_gap_abs) for r in recs if r.year_a == year])
        per_year[year] = (float(d.mean()), float(d.max()))
    return SummaryStats(
        group=group,
        n_pairs=len(recs),
        measures=measures,
        pearson_r=_pearson([r.report.w1 for r in recs], [r.report.e0_gap_abs for r in recs]),
        per_year=per_year,
        non_crossing=sum(r.report.dominance is not Dominance.CROSSING for r in recs),
        kl_infinite=kl_inf,
    )


def _result(config, records, notes=()):
    groups = list(dict.fromkeys(r.group for r in records))
    return StudyResult(config, records, [summarize(records, g) for g in groups], list(notes))


def run_sample_study(config: StudyConfig) -> StudyResult:
    """Random country pairs, each compared in one year where both are complete."""
    (sex,) = config.sexes[:1] or (Sex.TOTAL,)
    corpus = HmdCorpus(config.data_dir, TableKind.PERIOD, {sex})
    countries = [c for c in corpus.countries(sex)
                 if config.countries is None or c in config.countries]
    if len(countries) < 2:
        raise SetupError(f"need at least two {sex.value} period files, found {len(countries)}")
    rng = np.random.default_rng(config.seed)
    by_year: dict[int, list[str]] = {}
    for c in countries:
        for y in corpus.complete_years(c, sex):
            if config.in_range(y):
                by_year.setdefault(y, []).append(c)
    years = sorted(y for y, cs in by_year.items() if len(cs) >= 2)
    if not years:
        raise SetupError("no year has complete tables for two countries")

    if config.year_mode is YearMode.GLOBAL:
        year = years[int(rng.integers(len(years)))]
        triples = [(a, b, year) for a, b in itertools.combinations(sorted(by_year[year]), 2)]
    else:
        triples = [(a, b, y) for y in years
                   for a, b in itertools.combinations(sorted(by_year[y]), 2)]
    notes = []
    k = min(config.n, len(triples))
    if k < config.n:
        notes.append(f"only {len(triples)} distinct pairs available; using all of them")
        log.warning(notes[-1])
    picks = rng.choice(len(triples), size=k, replace=False)
    pairs = [(triples[i][0], sex, triples[i][2], triples[i][1], sex, triples[i][2])
             for i in picks]
    records = _evaluate(pairs, corpus, config, lambda p: sex.value)
    return _result(config, records, notes)


def run_all_pairs_study(config: StudyConfig) -> StudyResult:
    """Every unordered country pair in every year of the range, per sex."""
    sexes = config.sexes
    corpus = HmdCorpus(config.data_dir, TableKind.PERIOD, set(sexes))
    pairs = []
    for sex in sexes:
        countries = [c for c in corpus.countries(sex)
                     if config.countries is None or c in config.countries]
        years = sorted({y for c in countries for y in corpus.complete_years(c, sex)
                        if config.in_range(y)})
        for y in years:
            have = [c for c in countries if y in corpus.complete_years(c, sex)]
            pairs += [(a, sex, y, b, sex, y) for a, b in itertools.combinations(have, 2)]
    if not pairs:
        raise SetupError("no country pairs with complete tables in the requested years")
    return _result(config, _evaluate(pairs, corpus, config, lambda p: p[1].value))


def run_sex_gap_study(config: StudyConfig) -> StudyResult:
    """Women (A) against men (B) for every country-year with both tables."""
    corpus = HmdCorpus(config.data_dir, TableKind.PERIOD, {Sex.FEMALE, Sex.MALE})
    pairs = []
    for c in corpus.countries(Sex.FEMALE):
        if config.countries is not None and c not in config.countries:
            continue
        both = corpus.complete_years(c, Sex.FEMALE) & corpus.complete_years(c, Sex.MALE)
        pairs += [(c, Sex.FEMALE, y, c, Sex.MALE, y) for y in sorted(both) if config.in_range(y)]
    if not pairs:
        raise SetupError("no country-year has both female and male tables")
    pairs.sort(key=lambda p: (p[2], p[0]))
    return _result(config, _evaluate(pairs, corpus, config, lambda p: "female-male"))


def run_cohort_study(config: StudyConfig) -> StudyResult:
    """All unordered pairs of distinct (country, cohort) populations, per sex.

    Same-country pairs of different cohorts are included; a population is
    never paired with itself.
    """
    sexes = config.sexes
    corpus = HmdCorpus(config.data_dir, TableKind.COHORT, set(sexes))
    pairs = []
    notes = []
    for sex in sexes:
        countries = [c for c in corpus.countries(sex)
                     if config.countries is None or c in config.countries]
        pops = [(c, y) for c in countries for y in sorted(corpus.complete_years(c, sex))
                if config.in_range(y)]
        pairs += [(a[0], sex, a[1], b[0], sex, b[1]) for a, b in itertools.combinations(pops, 2)]
    if not pairs:
        raise SetupError("no cohort populations with complete tables")
    if set(COHORT_COUNTRIES) <= {c for c, _ in corpus.files} and len(pairs) != COHORT_PAIR_COUNT:
        notes.append(f"{len(pairs)} cohort pairs enumerated; the reference count is "
                     f"{COHORT_PAIR_COUNT} and depends on data availability")
        log.info(notes[-1])
    return _result(config, _evaluate(pairs, corpus, config, lambda p: p[1].value), notes)


RUNNERS = {
    StudyKind.SAMPLE_PAIRS: run_sample_study,
    StudyKind.ALL_PAIRS_BY_YEAR: run_all_pairs_study,
    StudyKind.SEX_GAP: run_sex_gap_study,
    StudyKind.COHORT_PAIRS: run_cohort_study,
}


def run_study(config: StudyConfig) -> StudyResult:
    return RUNNERS[config.study](config)
