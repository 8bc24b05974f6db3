import json

import pytest

from main import main
from shared.config import RunConfig, load_config
from supersat_agent.tools import (
    TOOLS_BY_SUBCOMMAND,
    AuditFamily,
    BuildContainers,
    BuildFamily,
    CountFreeGraphs,
    EnumerateCopies,
    OracleFreeCount,
    SupersatTrend,
)
from supersat_agent.tools.count_free_graphs import LEVEL_COLUMNS
from supersat_agent.tools.utils.hypergraph import HostGraph, complete_host
from supersat_agent.tools.utils.reporting import CONFIG_PREFIX


@pytest.fixture
def k5_family(tmp_path, write_graph):
    graph = write_graph(complete_host(5), "k5.json")
    result = BuildFamily(pattern="theta:2,2", graph=graph, delta=0.01, k=10).execute()
    path = tmp_path / "family.json"
    path.write_text(result.output)
    return str(path), graph


def test_registry_covers_every_subcommand():
    assert set(TOOLS_BY_SUBCOMMAND) == {"enum", "build", "audit", "containers", "count", "oracle", "trend"}


def test_enumerate_copies(c4, write_graph):
    result = EnumerateCopies(pattern="theta:2,2", graph=write_graph(c4), oracle=True).execute()
    assert result.exit_code == 0
    document = json.loads(result.output)
    assert document["config"]["subcommand"] == "enum"
    assert document["count"] == document["oracle_count"] == 1
    assert document["copies"] == [{"x": 0, "y": 2, "paths": [[0, 1, 2], [0, 3, 2]]}]


def test_enumerate_count_only(k5, write_graph):
    document = json.loads(EnumerateCopies(pattern="theta:2,2", graph=write_graph(k5), count_only=True).run())
    assert document["count"] == 15
    assert "copies" not in document


def test_tool_errors_become_text(c4, write_graph, tmp_path):
    result = EnumerateCopies(pattern="cycle:4", graph=write_graph(c4)).execute()
    assert result.status == "error"
    assert result.exit_code == 2
    assert result.output.startswith("Error:")
    missing = EnumerateCopies(pattern="theta:2,2", graph=str(tmp_path / "absent.json")).run()
    assert missing.startswith("Error:")


def test_build_family(k5_family):
    path, _ = k5_family
    document = json.loads(open(path).read())
    assert document["size"] == 15
    assert document["stop_reason"] == "exhausted"
    assert document["config"]["subcommand"] == "build"


def test_build_with_vacuous_parameters(k5, write_graph):
    result = BuildFamily(pattern="theta:2,2", graph=write_graph(k5), delta=1.0, k=0.1).execute()
    assert result.exit_code == 2
    assert "vacuous" in result.output


def test_build_on_edgeless_graph(tmp_path, write_graph):
    graph = write_graph(HostGraph(5, 2, []), "empty.json")
    result = BuildFamily(pattern="theta:2,2", graph=graph, delta=1.0).execute()
    assert result.exit_code == 0
    document = json.loads(result.output)
    assert (document["size"], document["stop_reason"], document["params"]["k"]) == (0, "exhausted", 0.0)
    path = tmp_path / "empty-family.json"
    path.write_text(result.output)
    assert AuditFamily(family=str(path)).execute().exit_code == 0


def test_audit_family_csv(k5_family):
    path, _ = k5_family
    result = AuditFamily(family=path).execute()
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0].startswith(CONFIG_PREFIX)
    assert lines[1] == "check,status,detail"
    assert lines[2].startswith("verdict,pass,")
    assert lines[3].startswith("smallest_c,info,")


def test_audit_rejects_member_with_wrong_shape(k5_family):
    path, _ = k5_family
    raw = json.loads(open(path).read())
    raw["members"][0]["paths"][0] = [raw["members"][0]["x"], raw["members"][0]["y"]]
    with open(path, "w") as handle:
        json.dump(raw, handle)
    result = AuditFamily(family=path).execute()
    assert result.exit_code == 2
    assert result.output.startswith("Error:")
    assert "paths have 2 edges" in result.output


def test_audit_family_fails_on_tight_c_bound(k5_family):
    path, _ = k5_family
    result = AuditFamily(family=path, c_bound=0.001, fmt="json").execute()
    assert result.exit_code == 1
    document = json.loads(result.output)
    assert not document["passed"]
    assert document["smallest_c"] > 0.001


def test_build_containers(k5_family):
    path, graph = k5_family
    result = BuildContainers(family=path, eps=0.9, tau=0.85, graph=graph, pattern="theta:2,2").execute()
    assert result.exit_code == 0
    document = json.loads(result.output)
    assert len(document["containers"]) == 4
    assert document["fingerprints"] == [[], [0], [0, 1], [0, 1, 5]]
    assert document["verification"]["passed"]


def test_build_containers_skips_verification(k5_family):
    path, _ = k5_family
    disabled = json.loads(BuildContainers(family=path, eps=0.9, tau=0.85, verify=False).run())
    assert disabled["verification"] == {"skipped": "disabled"}
    guarded = json.loads(BuildContainers(family=path, eps=0.9, tau=0.85, container_max_edges=5).run())
    assert "exceed guard" in guarded["verification"]["skipped"]


def test_build_containers_checks_host_and_pattern(k5_family, k4, write_graph):
    path, _ = k5_family
    wrong_host = BuildContainers(family=path, eps=0.9, tau=0.85, graph=write_graph(k4, "k4.json")).execute()
    assert wrong_host.exit_code == 2
    wrong_pattern = BuildContainers(family=path, eps=0.9, tau=0.85, pattern="theta:2,3").execute()
    assert wrong_pattern.exit_code == 2


def test_build_containers_reports_codegree_failure(k5_family):
    path, _ = k5_family
    result = BuildContainers(family=path, eps=0.5, tau=0.85).execute()
    assert result.exit_code == 2
    assert "codegree" in result.output


def test_count_free_graphs_with_oracle():
    result = CountFreeGraphs(pattern="theta:2,2", n=3, eps=0.5, k0=0.5, oracle=True).execute()
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[1] == ",".join(LEVEL_COLUMNS)
    assert lines[2].startswith("0,")
    assert "# bound: 8" in lines
    assert "# exact: 8" in lines
    assert "# coverage: True" in lines
    assert "# aborted: " in lines


def test_count_free_graphs_aborted_run_fails():
    result = CountFreeGraphs(
        pattern="theta:2,2", n=5, eps=0.9, k0=0.05, delta=0.25, family_k=2.0, tau=0.85, fmt="json",
    ).execute()
    assert result.exit_code == 1
    document = json.loads(result.output)
    assert document["bound"] == 2048
    assert [level["containers"] for level in document["levels"]] == [1, 4, 4]
    assert document["aborted"].startswith("level 2, container 0")


def test_oracle_free_count(monkeypatch):
    document = json.loads(OracleFreeCount(pattern="theta:2,2", n=4).run())
    assert document["count"] == 54
    assert document["config"]["free_count_max_edges"] == 24
    monkeypatch.setenv("SUPERSAT_FREE_COUNT_MAX_EDGES", "3")
    assert OracleFreeCount(pattern="theta:2,2", n=4).execute().exit_code == 2


def test_trend_csv():
    result = SupersatTrend(pattern="theta:2,2", sizes="4..6").execute()
    lines = result.output.splitlines()
    assert lines[1] == "n,m,count,benchmark,ratio,below_threshold"
    assert [line.split(",")[2] for line in lines[2:]] == ["3", "15", "45"]
    assert SupersatTrend(pattern="theta:2,2", sizes="6..4").execute().exit_code == 2


def _rerun_tools(k5_family):
    family, k5_graph = k5_family
    return {
        "enum": EnumerateCopies(pattern="theta:2,2", graph=k5_graph, oracle=True),
        "build": BuildFamily(pattern="theta:2,2", graph=k5_graph, delta=1.0, k=1.12, shuffle=4),
        "audit": AuditFamily(family=family),
        "containers": BuildContainers(family=family, eps=0.9, tau=0.85, graph=k5_graph),
        "count": CountFreeGraphs(pattern="theta:2,2", n=3, eps=0.5, k0=0.5, oracle=True),
        "oracle": OracleFreeCount(pattern="theta:2,2", n=4),
        "trend": SupersatTrend(pattern="theta:2,2", sizes="4,5", hosts="random", density=0.5, seed=9),
    }


@pytest.mark.parametrize("subcommand", ["enum", "build", "audit", "containers", "count", "oracle", "trend"])
def test_rerun_from_echoed_config(tmp_path, k5_family, subcommand):
    tool = _rerun_tools(k5_family)[subcommand]
    first = tool.run()
    assert tool.run() == first
    path = tmp_path / "out.txt"
    path.write_text(first)
    config = load_config(str(path))
    assert config.subcommand == subcommand
    assert TOOLS_BY_SUBCOMMAND[subcommand].from_config(config).run() == first


def test_from_config_rejects_other_subcommands():
    with pytest.raises(ValueError):
        BuildFamily.from_config(RunConfig(subcommand="oracle", pattern="theta:2,2", n=4))


def test_run_config_rejects_unknown_fields_and_bad_eps():
    with pytest.raises(ValueError):
        RunConfig(subcommand="oracle", colour="red")
    with pytest.raises(ValueError):
        RunConfig(subcommand="count", eps=1.0)


def test_env_guard_with_garbage_falls_back(monkeypatch):
    monkeypatch.setenv("SUPERSAT_ORACLE_MAX_VERTICES", "lots")
    assert RunConfig(subcommand="enum").oracle_max_vertices == 12


def test_cli_oracle(capsys):
    assert main(["oracle", "--pattern", "theta:2,2", "--n", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["count"] == 54


def test_cli_usage_errors(capsys):
    assert main([]) == 2
    assert main(["count", "--pattern", "theta:2,2", "--n", "4", "--eps", "1", "--k0", "0.5"]) == 2
    assert "Error:" in capsys.readouterr().err
    with pytest.raises(SystemExit) as excinfo:
        main(["enum", "--pattern", "theta:2,2"])
    assert excinfo.value.code == 2


def test_cli_containers_without_verification(k5_family, capsys):
    path, _ = k5_family
    assert main(["containers", "--family", path, "--eps", "0.9", "--tau", "0.85", "--no-verify"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["verification"] == {"skipped": "disabled"}
    assert document["config"]["verify"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["enum", "--pattern", "theta:2,2", "--graph", "{graph}", "--oracle"],
        ["build", "--pattern", "theta:2,2", "--graph", "{graph}", "--delta", "1.0", "--k", "1.12", "--shuffle", "4"],
        ["audit", "--family", "{family}"],
        ["containers", "--family", "{family}", "--eps", "0.9", "--tau", "0.85"],
        ["count", "--pattern", "theta:2,2", "--n", "3", "--eps", "0.5", "--k0", "0.5"],
        ["oracle", "--pattern", "theta:2,2", "--n", "4"],
        ["trend", "--pattern", "theta:2,2", "--sizes", "4,5", "--format", "json"],
    ],
    ids=lambda argv: argv[0],
)
def test_cli_from_config(tmp_path, k5_family, capsys, argv):
    family, graph = k5_family
    assert main([arg.format(family=family, graph=graph) for arg in argv]) == 0
    first = capsys.readouterr().out
    path = tmp_path / "echo.txt"
    path.write_text(first)
    assert main(["--from-config", str(path)]) == 0
    assert capsys.readouterr().out == first


def test_cli_from_missing_config(tmp_path):
    assert main(["--from-config", str(tmp_path / "absent.json")]) == 2
