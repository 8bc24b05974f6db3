import json

import pytest
from hypothesis import settings

from supersat_agent.tools.utils.hypergraph import HostGraph, complete_host

settings.register_profile("repo", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("repo")


@pytest.fixture
def c4() -> HostGraph:
    return HostGraph(4, 2, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def k4() -> HostGraph:
    return complete_host(4)


@pytest.fixture
def k5() -> HostGraph:
    return complete_host(5)


@pytest.fixture
def write_graph(tmp_path):
    def write(host: HostGraph, name: str = "graph.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps({"n": host.n, "r": host.r, "edges": [list(e) for e in host.edges]}))
        return str(path)

    return write
