import numpy as np
import pytest

from conftest import FIXTURES, gompertz_table, write_country
from lifetable_ot.errors import CompletenessError, FormatError, NotFoundError
from lifetable_ot.hmd import (
    PRECISION,
    VALUE_COLUMNS,
    Sex,
    TableKind,
    describe_path,
    extract_table,
    load_hmd,
    parse_hmd,
    serialize_hmd,
    tables_to_hmd,
)
from lifetable_ot.lifetable import e0_mean, to_distribution, validate

HEADER = "   Year          Age         mx       qx    ax      lx      dx      Lx       Tx     ex"


def test_tiny_fixture_round_trip():
    text = (FIXTURES / "tiny_lenient.txt").read_text()
    with pytest.raises(FormatError, match="expected ages 0..110"):
        parse_hmd(text)
    f = parse_hmd(text, strict=False)
    assert (f.country, f.sex, f.kind) == ("Testland", Sex.TOTAL, TableKind.PERIOD)
    assert list(f.ages) == [0, 1, 110]
    assert list(f.open_interval) == [False, False, True]
    assert f.values["mx"][0] == 0.05 and f.values["Tx"][0] == 6806160 and f.values["ex"][2] == 1.67
    g = parse_hmd(serialize_hmd(f), strict=False)
    for c in VALUE_COLUMNS:
        np.testing.assert_array_equal(g.values[c], f.values[c])
    np.testing.assert_array_equal(g.year_labels, f.year_labels)
    np.testing.assert_array_equal(g.open_interval, f.open_interval)
    assert serialize_hmd(g) == serialize_hmd(f)


def test_missing_value_marked_not_zeroed():
    f = parse_hmd((FIXTURES / "missing_Lx.txt").read_text(), strict=False)
    assert f.kind is TableKind.COHORT and f.sex is Sex.FEMALE
    assert np.isnan(f.column("Lx", 1900)[1])
    assert f.missing(1900) == ("Lx",)
    assert not f.is_complete(1900)
    assert f.is_complete(1901)
    assert f.complete_years() == [1901]
    with pytest.raises(CompletenessError) as err:
        extract_table(f, 1900)
    assert err.value.columns == ("Lx",)
    t = extract_table(f, 1901)
    assert validate(t) == []
    assert "." in serialize_hmd(f)


def test_missing_terminal_ax_names_column():
    f = parse_hmd((FIXTURES / "missing_ax.txt").read_text(), strict=False)
    with pytest.raises(CompletenessError, match="ax") as err:
        extract_table(f, 2000)
    assert "ax" in err.value.columns


def test_lenient_consecutive_fixture_extracts():
    f = parse_hmd((FIXTURES / "missing_Lx.txt").read_text(), strict=False)
    t = extract_table(f, 1901)
    np.testing.assert_array_equal(t.lx, [100000, 96120, 96024])
    np.testing.assert_array_equal(t.dx, [3880, 96, 96024])
    assert t.radix == 100000


def test_year_not_found():
    f = parse_hmd((FIXTURES / "tiny_lenient.txt").read_text(), strict=False)
    with pytest.raises(NotFoundError):
        extract_table(f, 1999)


@pytest.mark.parametrize("mutate, match", [
    (lambda L: L[:2] + ["Year Age mx qx ax lx dx Lx Tx"] + L[3:], "expected column header"),
    (lambda L: [HEADER] + L[3:], "missing title"),
    (lambda L: L[:3] + [L[3].replace("0.04800", "abc")] + L[4:], "line 4"),
    (lambda L: L[:3] + [L[3].replace("0.04800", "abc")] + L[4:], "non-numeric qx"),
    (lambda L: L[:4] + [L[3]] + L[4:], "duplicate"),
    (lambda L: L[:3] + [L[3] + " 7"] + L[4:], "expected 10 fields"),
    (lambda L: L[:3] + [L[3].replace(" 0 ", " x ")] + L[4:], "bad Age"),
    (lambda L: L[:5], "open age"),
    (lambda L: L[:3], "no data rows"),
    (lambda L: [], "empty file"),
])
def test_format_errors(mutate, match):
    lines = (FIXTURES / "tiny_lenient.txt").read_text().splitlines()
    with pytest.raises(FormatError, match=match):
        parse_hmd("\n".join(mutate(lines)), strict=False)


def test_line_number_reported():
    lines = (FIXTURES / "tiny_lenient.txt").read_text().splitlines()
    lines[4] = lines[4].replace("95153", "9x5153")
    with pytest.raises(FormatError) as err:
        parse_hmd("\n".join(lines), strict=False)
    assert err.value.line == 5


def test_increasing_lx_recorded_as_issue():
    lines = (FIXTURES / "tiny_lenient.txt").read_text().splitlines()
    lines[5] = lines[5].replace("95105   95105", "95300   95300")
    f = parse_hmd("\n".join(lines), strict=False)
    assert len(f.issues) == 1 and f.issues[0].line == 6


def test_full_grid_round_trip_and_extract(tmp_path):
    tables = {1990: gompertz_table(), 1991: gompertz_table(level=8e-5)}
    path = write_country(tmp_path, "ZZZ", "f", tables)
    f = load_hmd(path)
    assert (f.country, f.sex, f.kind) == ("ZZZ", Sex.FEMALE, TableKind.PERIOD)
    assert f.complete_years() == [1990, 1991]
    for year, src in tables.items():
        t = extract_table(f, year)
        assert validate(t) == []
        # published precision: integers for counts, 2 decimals for ex
        assert np.max(np.abs(t.lx - src.lx)) <= 0.5
        published_e0 = f.column("ex", year)[0]
        assert abs(e0_mean(to_distribution(t)) - published_e0) < 0.01
    text = path.read_text()
    g = parse_hmd(serialize_hmd(f))
    for c in VALUE_COLUMNS:
        np.testing.assert_array_equal(g.values[c], f.values[c])
    assert serialize_hmd(g) == serialize_hmd(f)
    assert serialize_hmd(parse_hmd(text)) == text


def test_serialize_precision():
    t = gompertz_table()
    f = parse_hmd(tables_to_hmd({2000: t}, "X, Life tables (period 1x1), Males"))
    for c, digits in PRECISION.items():
        scale = 1 if digits is None else 10 ** digits
        v = f.values[c]
        np.testing.assert_allclose(v * scale, np.round(v * scale), atol=1e-6)
        np.testing.assert_allclose(v, np.round(getattr(t, c) * scale) / scale, atol=1e-9)


def test_territorial_year_labels():
    text = (FIXTURES / "tiny_lenient.txt").read_text()
    text2 = text.replace("   2000  ", "  2000+  ")
    f = parse_hmd(text2, strict=False)
    assert f.available_years() == [2000]
    assert f.column("lx", 2000)[0] == 100000


@pytest.mark.parametrize("name, expect", [
    ("DNK.bltper_1x1.txt", ("DNK", Sex.TOTAL, TableKind.PERIOD)),
    ("GBRTENW.fltcoh_1x1.txt", ("GBRTENW", Sex.FEMALE, TableKind.COHORT)),
    ("ITA/STATS/mltper_1x1.txt", ("ITA", Sex.MALE, TableKind.PERIOD)),
    ("Deaths_1x1.txt", (None, None, None)),
])
def test_describe_path(name, expect):
    assert describe_path(name) == expect
