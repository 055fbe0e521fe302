import random
from collections import OrderedDict
from pathlib import Path

import networkx as nx
import pytest

from cognet.ingest import NEGATIVE, NEUTRAL, POSITIVE
from cognet.netbuild import LexicalNetwork

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: "OrderedDict[int, dict]" = OrderedDict()
_node_criterion: dict[str, int] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            num, title = m.args
            _criteria.setdefault(num, {"title": title, "outcomes": []})
            _node_criterion[item.nodeid] = num


def pytest_runtest_logreport(report):
    num = _node_criterion.get(report.nodeid)
    if num is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria[num]["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        entry = _criteria[num]
        outs = entry["outcomes"]
        if not outs:
            status = "NOT RUN"
        elif any(o == "failed" for o in outs):
            status = "FAIL"
        elif all(o == "skipped" for o in outs):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"[{status:>7}] #{num:<2} {entry['title']}")


def random_graph(n, p, seed, kind="CO"):
    g = nx.gnp_random_graph(n, p, seed=seed)
    names = [f"n{i:03d}" for i in range(n)]
    return LexicalNetwork.from_edges(kind, [(names[u], names[v]) for u, v in g.edges()], isolates=names)


def random_valences(nodes, seed):
    rnd = random.Random(seed)
    return {n: rnd.choice((POSITIVE, NEUTRAL, NEGATIVE)) for n in nodes}


@pytest.fixture
def fixtures_dir():
    return FIXTURES
