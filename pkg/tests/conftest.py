import hypothesis.strategies as st
from hypothesis import settings

from dirhyp.core import Digraph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def digraphs(draw, max_n: int = 6, parallel: bool = True, loops: bool = True):
    n = draw(st.integers(1, max_n))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    if not loops:
        pair = pair.filter(lambda e: e[0] != e[1])
    edges = draw(st.lists(pair, max_size=3 * n))
    if not parallel:
        edges = sorted(set(edges))
    return Digraph(n, edges)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for name in test_acceptance.CRITERIA:
            if name in test_acceptance.LINES:
                terminalreporter.write_line(test_acceptance.LINES[name])
