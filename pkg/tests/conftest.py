import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from lifetable_ot.hmd import tables_to_hmd
from lifetable_ot.lifetable import AgeAtDeathDistribution, build_from_mx

FIXTURES = Path(__file__).parent / "fixtures"
AGES = np.arange(111)


def gompertz_mx(level=5e-5, slope=0.09, infant=0.02, ages=AGES):
    """Gompertz hazard with an extra infant/childhood term that decays with age."""
    return level * np.exp(slope * ages) + infant * np.exp(-1.5 * ages)


def gompertz_table(level=5e-5, slope=0.09, infant=0.02, scale=1.0, **kw):
    return build_from_mx(scale * gompertz_mx(level, slope, infant), **kw)


def random_table(rng, n_ages=None):
    """Random but valid table: lognormal-ish rates, random separation factors."""
    n = int(n_ages or rng.integers(2, 112))
    mx = np.exp(rng.uniform(-9, 0.5, n))
    mx[rng.random(n) < 0.05] = 0.0
    mx[-1] = rng.uniform(0.2, 2.0)
    ax = rng.uniform(0.01, 1.0, n)
    ax[-1] = rng.uniform(0.1, 5.0)
    return build_from_mx(mx, ax, radix=float(rng.choice([1.0, 100_000.0])))


def random_distribution(rng, max_atoms=8, span=100.0, grid=0.25):
    n = int(rng.integers(1, max_atoms + 1))
    locs = np.sort(rng.choice(np.arange(0, span, grid), n, replace=False))
    masses = rng.dirichlet(np.ones(n))
    return AgeAtDeathDistribution.from_weights(locs, masses)


@st.composite
def distributions(draw, max_atoms=8):
    n = draw(st.integers(1, max_atoms))
    locs = draw(st.lists(st.integers(0, 440), min_size=n, max_size=n, unique=True))
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    return AgeAtDeathDistribution.from_weights(np.array(locs) / 4.0, w)


def write_country(root, code, sex_letter, tables, kind="per"):
    """Write ``{year: LifeTable}`` as ``<root>/<code>.<s>lt<kind>_1x1.txt``."""
    sex_word = {"f": "Females", "m": "Males", "b": "Total"}[sex_letter]
    kind_word = "period" if kind == "per" else "cohort"
    text = tables_to_hmd(tables, f"{code}, Life tables ({kind_word} 1x1), {sex_word}")
    path = Path(root) / f"{code}.{sex_letter}lt{kind}_1x1.txt"
    path.write_text(text)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def synthetic_corpus(tmp_path):
    """Three countries, both sexes and total, years 2000-2002; women dominate men."""
    levels = {"AAA": 3e-5, "BBB": 6e-5, "CCC": 1.2e-4}
    for code, level in levels.items():
        for s, scale in (("f", 1.0), ("m", 1.6), ("b", 1.25)):
            tables = {y: gompertz_table(level * (1 - 0.02 * (y - 2000)), scale=scale)
                      for y in (2000, 2001, 2002)}
            write_country(tmp_path, code, s, tables)
    return tmp_path


@pytest.fixture(scope="session")
def hmd_dir():
    d = os.environ.get("HMD_DATA_DIR")
    if not d or not Path(d).is_dir():
        pytest.skip("HMD data not supplied: set HMD_DATA_DIR to a directory of HMD 1x1 files")
    return Path(d)


_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.skipped and not rep.failed):
        return
    number, title = mark.args
    if rep.skipped and _CRITERIA.get(number, ("",))[0] != "FAIL":
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
        _CRITERIA[number] = ("SKIP", f"{title} ({reason.removeprefix('Skipped: ')})")
    elif rep.failed:
        _CRITERIA[number] = ("FAIL", title)
    elif number not in _CRITERIA:
        _CRITERIA[number] = ("PASS", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
