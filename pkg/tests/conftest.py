import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cntplate.layup import Layup  # noqa: E402
from cntplate.materials import default_library  # noqa: E402


def make_sandwich(h=0.2, core_to_face=2.0, v_star=0.17, distribution="FG"):
    lib = default_library()
    return Layup.sandwich(h, core_to_face, v_star, lib.cnt["SWCNT-10-10"], lib.matrix["PMMA"],
                          lib.efficiency_for("PMMA", v_star), lib.core["Ti-6Al-4V"],
                          distribution=distribution)


def make_single(grading="UD", h=0.05, v_star=0.14):
    lib = default_library()
    return Layup.single(h, grading, v_star, lib.cnt["SWCNT-10-10"], lib.matrix["PmPV"],
                        lib.efficiency_for("PmPV", v_star))


@pytest.fixture
def sandwich():
    return make_sandwich()


@pytest.fixture
def single():
    return make_single()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        title, ok, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})")
