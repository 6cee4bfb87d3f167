import sys

import numpy as np
import pytest
from hypothesis import settings

from helpers import write_stencil_mtx

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def stencil_cache(tmp_path_factory):
    """A cache directory holding a regenerated ``gr_30_30.mtx``."""
    cache = tmp_path_factory.mktemp("cache")
    write_stencil_mtx(cache / "gr_30_30.mtx")
    return cache


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
