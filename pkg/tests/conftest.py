import numpy as np
import pytest

from geocomplexity.graph import EmbeddedGraph


def random_tree(rng: np.random.Generator, n_nodes: int, dim: int = 2, scale: float = 1.0) -> EmbeddedGraph:
    """Random recursive tree: node i attaches to a uniformly chosen earlier node."""
    pos = rng.normal(scale=scale, size=(n_nodes, dim))
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n_nodes)]
    return EmbeddedGraph(pos, edges)


def brute_nonharmonicity(pos, edges, node):
    nb = [j if i == node else i for i, j in edges if node in (i, j)]
    if len(nb) <= 1:
        return 0.0
    c = np.mean([pos[k] for k in nb], axis=0)
    return float(np.sum((pos[node] - c) ** 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def y_tree():
    return EmbeddedGraph([[0, 0], [1, 0], [0, 1], [-1, -1]], [(0, 1), (0, 2), (0, 3)])


# -- acceptance summary ---------------------------------------------------------
# every test marked criterion(n) contributes to that criterion's verdict

_criteria: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    marks = getattr(report, "criterion_ids", None)
    if not marks:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        for n in marks:
            _criteria.setdefault(n, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criterion_ids = [m.args[0] for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok = all(_criteria[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(_criteria[n])} checks)")
