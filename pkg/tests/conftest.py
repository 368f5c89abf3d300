import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from racg.fixtures import FIXTURES, fixture  # noqa: E402
from racg.presentation import PresentationGraph  # noqa: E402

settings.register_profile('default', max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile('ci', max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'default'))


@pytest.fixture(scope='session')
def graphs():
    return {name: fixture(name) for name in FIXTURES}


@st.composite
def presentation_graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    gens = [f'v{i}' for i in range(n)]
    pairs = [(gens[i], gens[j]) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return PresentationGraph.from_edges(gens, [p for p, k in zip(pairs, keep) if k])


@st.composite
def graph_and_word(draw, max_n=6, max_len=10):
    g = draw(presentation_graphs(max_n=max_n))
    w = tuple(draw(st.lists(st.integers(0, g.n - 1), max_size=max_len)))
    return g, w


# one summary line per acceptance criterion

_ACCEPTANCE: dict[str, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if not item.nodeid.split('::')[0].endswith('test_acceptance.py'):
        return
    if rep.when == 'call' or (rep.when == 'setup' and not rep.passed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        detail = dict(item.user_properties).get('detail', '')
        status = 'PASS' if rep.passed else ('SKIP' if rep.skipped else 'FAIL')
        _ACCEPTANCE[item.name] = (doc, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for name in sorted(_ACCEPTANCE):
        doc, status, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f'{status}  {doc}' + (f'  [{detail}]' if detail else ''))
