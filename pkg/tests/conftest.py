import os
from pathlib import Path

import pytest

from weylwalk.cli import Pipeline, RunConfig

# Chambers, symmetries and generators are expensive; keep them between runs.
CACHE = Path(os.environ.get("WEYLWALK_TEST_CACHE",
                            Path.home() / ".cache" / "weylwalk-tests"))


@pytest.fixture(scope="session")
def cfg():
    return RunConfig(cache=CACHE, jobs=int(os.environ.get("WEYLWALK_JOBS", "1")))


@pytest.fixture(scope="session")
def p15(cfg):
    return Pipeline("s15", cfg)


@pytest.fixture(scope="session")
def p16(cfg):
    return Pipeline("s16", cfg)


@pytest.fixture(scope="session")
def s15(p15):
    return p15.bundle


@pytest.fixture(scope="session")
def s16(p16):
    return p16.bundle


@pytest.fixture(scope="session")
def d15(p15):
    return p15.chamber


@pytest.fixture(scope="session")
def gens(p15):
    g, report = p15.generators()
    assert g is not None, report
    return g


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  "
                                    f"(tolerance: {mod.TOLERANCE})  {detail}")
