import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from limitlab.core import PAUSE, Text
from limitlab.fixtures import fixture_context, random_bms_table, subset_catalog
from limitlab.hypspace import EvalContext

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL = (0, 1, 2)


@pytest.fixture
def ctx():
    return fixture_context()


@pytest.fixture
def small_ctx():
    return EvalContext(subset_catalog(SMALL))


def data(alphabet=SMALL):
    return st.sampled_from(list(alphabet) + [PAUSE])


def texts(alphabet=SMALL, max_head=6, max_tail=3):
    return st.builds(
        Text,
        st.lists(data(alphabet), max_size=max_head).map(tuple),
        st.lists(data(alphabet), min_size=1, max_size=max_tail).map(tuple),
    )


def bms_tables(max_states=4, p_undefined=0.0):
    hyps = list(subset_catalog(SMALL).languages)
    return st.integers(0, 2**32).map(
        lambda seed: random_bms_table(random.Random(seed), hyps, max_states=max_states, p_undefined=p_undefined)
    )


ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance(request):
    """Record one line per acceptance criterion for the terminal summary."""

    def record(number: int, ok: bool, detail: str):
        ACCEPTANCE[number] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
