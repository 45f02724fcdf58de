"""Command-line entry point: ``lifetable-ot <subcommand> ...``.

Exit codes: 0 success, 2 usage, 3 format, 4 domain/validation, 5 missing or
incomplete data, 6 capacity, 7 study setup, 1 anything else.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

from . import __version__
from .distances import CompareOptions, OverlapVariant, compare
from .errors import DomainError, LifeTableOTError
from .hmd import Sex, extract_table, load_hmd
from .lifetable import validate
from .output import read_pair_rows, write_rows, write_study
from .plotdata import PlotKind, emit_plot_data
from .studies import DATA_DIR_ENV, StudyConfig, StudyKind, YearMode, run_study


def _years(text: str) -> tuple[int, int]:
    for sep in (":", "-", ","):
        if sep in text:
            lo, hi = text.split(sep, 1)
            break
    else:
        lo = hi = text
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad year range {text!r}; use e.g. 1990-2020") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty year range {text!r}")
    return lo, hi


def _sexes(text: str) -> tuple[Sex, ...]:
    try:
        return tuple(Sex.parse(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sex {text!r}; use female, male or both") from None


def _metric_flags(p):
    p.add_argument("--p", type=float, default=2.0, help="exponent for the Wp column (default 2)")
    p.add_argument("--kl-smoothing", type=float, default=0.0, metavar="EPS")
    p.add_argument("--overlap-variant", choices=[v.value for v in OverlapVariant],
                   default=CompareOptions().overlap_variant.value)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, help="write here instead of stdout")


def _study_flags(p, default_sex=None, default_years=None):
    p.add_argument("--data-dir", type=Path, help=f"HMD files (default ${DATA_DIR_ENV})")
    p.add_argument("--seed", type=int, default=StudyConfig().seed)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--sex", type=_sexes, default=default_sex)
    p.add_argument("--years", type=_years, default=default_years, metavar="FROM-TO")
    p.add_argument("--countries", type=lambda s: tuple(s.split(",")), default=None)
    p.add_argument("--jobs", type=int, default=1)
    _metric_flags(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lifetable-ot",
                                 description="Wasserstein distances between life tables.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse an HMD file and check every table in it")
    p.add_argument("file", type=Path)
    p.add_argument("--year", type=int)
    p.add_argument("--lenient", action="store_true", help="allow truncated age grids")

    p = sub.add_parser("compare", help="compare two tables")
    p.add_argument("file_a", type=Path)
    p.add_argument("year_a", type=int)
    p.add_argument("file_b", type=Path)
    p.add_argument("year_b", type=int)
    p.add_argument("--lenient", action="store_true")
    _metric_flags(p)

    p = sub.add_parser("sample", help="random country pairs, one year each")
    _study_flags(p)
    p.add_argument("--year-mode", choices=[m.value for m in YearMode], default="per_pair")
    p = sub.add_parser("allpairs", help="all country pairs per year and sex")
    _study_flags(p, default_years=(1990, 2020))
    p = sub.add_parser("sexgap", help="women vs men per country-year")
    _study_flags(p, default_years=(1990, 2020))
    p = sub.add_parser("cohort", help="all cross-population cohort pairs")
    _study_flags(p, default_years=(1890, 1920))

    p = sub.add_parser("plotdata", help="tidy data for histograms, scatters and overlays")
    p.add_argument("kind", choices=[k.value for k in PlotKind])
    p.add_argument("--reports", type=Path, help="study output (csv or json) for histogram/scatter")
    p.add_argument("--pair", nargs=4, metavar=("FILE_A", "YEAR_A", "FILE_B", "YEAR_B"))
    p.add_argument("--bin-width", type=float, default=0.5)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path)
    return ap


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _options(args) -> CompareOptions:
    return CompareOptions(p=args.p, kl_smoothing=args.kl_smoothing,
                          overlap_variant=args.overlap_variant)


def _cmd_validate(args):
    f = load_hmd(args.file, strict=not args.lenient)
    for issue in f.issues:
        print(f"warning: {issue}")
    years = [args.year] if args.year is not None else f.available_years()
    bad = 0
    for y in years:
        if not f.is_complete(y):
            print(f"{y}: not convertible (missing: {', '.join(f.missing(y)) or 'age grid'})")
            continue
        try:
            problems = validate(extract_table(f, y))
        except DomainError as exc:
            problems = [exc]
        for prob in problems:
            print(f"{y}: {prob}")
        bad += bool(problems)
    print(f"{f.country} {f.sex.value if f.sex else '?'} {f.kind.value if f.kind else '?'}: "
          f"{len(years)} year(s), {bad} with violations")
    if bad:
        raise DomainError(f"{bad} table(s) failed validation")


def _cmd_compare(args):
    strict = not args.lenient
    a = extract_table(load_hmd(args.file_a, strict=strict), args.year_a)
    b = extract_table(load_hmd(args.file_b, strict=strict), args.year_b)
    report = compare(a, b, _options(args))
    with _output(args.out) as out:
        write_rows([report.to_dict()], out, args.format)


STUDIES = {"sample": StudyKind.SAMPLE_PAIRS, "allpairs": StudyKind.ALL_PAIRS_BY_YEAR,
           "sexgap": StudyKind.SEX_GAP, "cohort": StudyKind.COHORT_PAIRS}


def _cmd_study(args):
    config = StudyConfig(
        data_dir=args.data_dir, study=STUDIES[args.command], n=args.n, years=args.years,
        sexes=args.sex, seed=args.seed, options=_options(args), output_format=args.format,
        year_mode=getattr(args, "year_mode", "per_pair"), countries=args.countries,
        jobs=args.jobs)
    result = run_study(config)
    with _output(args.out) as out:
        write_study(result, out)


def _cmd_plotdata(args):
    kind = PlotKind(args.kind)
    if kind in (PlotKind.HISTOGRAM, PlotKind.SCATTER):
        if args.reports is None:
            raise DomainError(f"{kind.value} needs --reports")
        source = read_pair_rows(args.reports.read_text(encoding="utf-8"))
    else:
        if args.pair is None:
            raise DomainError(f"{kind.value} needs --pair FILE_A YEAR_A FILE_B YEAR_B")
        fa, ya, fb, yb = args.pair
        source = (extract_table(load_hmd(fa), int(ya)), extract_table(load_hmd(fb), int(yb)))
    rows = emit_plot_data(source, kind, args.bin_width)
    with _output(args.out) as out:
        write_rows(rows, out, args.format)


COMMANDS = {"validate": _cmd_validate, "compare": _cmd_compare, "plotdata": _cmd_plotdata,
            **{k: _cmd_study for k in STUDIES}}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except LifeTableOTError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
