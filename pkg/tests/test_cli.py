import json

import pytest

from ik_lab.cli import main
from ik_lab.config import parse_config
from ik_lab.convergence import decide
from ik_lab.points import Semantics, cluster_points

E_INSTANCE = {
    "space": "sierpinski",
    "ideals": {"I": "principal:[0,1]", "K": "principal:[2]"},
    "function": ["b", "a", "b", "a"],
    "point": "a",
    "mode": "I^K",
}
PADDED = {
    "space": "sierpinski",
    "ideals": {"I": "principal:[0]", "K": "principal:[1]"},
    "function": ["b", "a"],
}


@pytest.fixture
def write(tmp_path):
    def _write(data, name="cfg.json"):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data, indent=2))
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_exit_codes(capsys, write):
    cfg = write(E_INSTANCE)
    code, out, _ = run(capsys, "check", "--config", cfg)
    body = json.loads(out)
    assert code == 0 and body["schema"] == "ik-lab/1" and body["witnesses"] == [[2, 3]]
    code, out, _ = run(capsys, "check", "--config", cfg, "--mode", "I")
    assert code == 1 and json.loads(out)["failing_neighborhood"] == ["a"]
    code, out, _ = run(capsys, "check", "--config", cfg, "--oracle")
    assert code == 0 and json.loads(out)["method"] == "oracle"


def test_check_config_errors_exit_2(capsys, write):
    code, _, err = run(capsys, "check", "--config", write('{"space": "sierpinski",\n "point": }'))
    assert code == 2 and ":2:" in err
    code, _, err = run(capsys, "check", "--config", write({**E_INSTANCE, "mode": "I^^K"}))
    assert code == 2
    code, _, err = run(capsys, "check")
    assert code == 2 and "--config" in err


def test_report_file_matches_stdout(capsys, write, tmp_path):
    rep = tmp_path / "r.json"
    code, out, _ = run(capsys, "check", "--config", write(E_INSTANCE), "--report", str(rep))
    assert rep.read_text() == out


def test_limits_and_cluster(capsys, write):
    code, out, _ = run(capsys, "limits", "--config", write(E_INSTANCE))
    assert code == 0 and json.loads(out)["limits"] == ["a", "b"]
    cfg = write(PADDED)
    code, out, _ = run(capsys, "cluster", "--config", cfg, "--semantics", "padded", "--oracle")
    body = json.loads(out)
    assert code == 0 and body["cluster_set"] == ["a", "b"] == body["search_cluster_set"]
    code, out, _ = run(capsys, "cluster", "--config", cfg)
    assert json.loads(out)["cluster_set"] == ["b"]


def test_cluster_realizes_targets(capsys, write):
    data = {"space": "chain:3", "ideals": {"I": "Fin", "K": "Fin"}, "target": ["b", "c"]}
    code, out, _ = run(capsys, "cluster", "--config", write(data))
    body = json.loads(out)
    assert code == 0 and body["cluster_set"] == ["b", "c"] and "realized" in body
    code, _, err = run(capsys, "cluster", "--config", write({**data, "target": ["a"]}))
    assert code == 2 and "not closed" in err


def test_open_and_sequential(capsys, write):
    cfg = write({"space": "sierpinski", "ideals": {"I": "Fin", "K": "Fin"}})
    code, out, _ = run(capsys, "open", "--config", cfg, "--set", "[a]")
    assert code == 0 and json.loads(out)["mode_open"]
    code, out, _ = run(capsys, "open", "--config", cfg, "--set", "[b]")
    assert code == 1 and json.loads(out)["counterexample"]["limit"] == "b"
    code, out, _ = run(capsys, "sequential", "--space", "chain:3", "--I", "Fin", "--K", "Fin")
    assert code == 0 and json.loads(out)["sequential"]
    code, _, _ = run(capsys, "sequential", "--space", "chain:3", "--I", "Fin")
    assert code == 2


def test_search_finds_padded_instance_and_hits_replay(capsys):
    code, out, _ = run(capsys, "search", "cluster-set-differs(padded,trace)")
    assert code == 0
    hits = [json.loads(line) for line in out.splitlines()]
    target = {"I": {"gen": [[0]]}, "K": {"gen": [[1]]}}
    found = [h for h in hits if h["config"]["ideals"] == target and h["config"]["function"] == {"values": ["b", "a"]}]
    assert found and found[0]["observed"] == {"padded": ["a", "b"], "trace": ["b"]}
    for h in hits:
        cfg = parse_config(json.dumps(h))
        i, k = cfg.ideals["I"], cfg.ideals["K"]
        for sem in Semantics:
            got = cluster_points(cfg.function, i, k, cfg.space, sem)
            assert cfg.space.to_labels(got) == h["observed"][sem.value]


def test_search_converges_in_hits_reproduce(capsys):
    code, out, _ = run(capsys, "search", "converges-in(I^K)-not-in(I)-not-in(K)", "--limit", "3")
    assert code == 0
    for line in out.splitlines():
        hit = json.loads(line)
        cfg = parse_config(json.dumps(hit))
        assert decide(cfg.function, cfg.point, cfg.mode("I^K"), cfg.space).converges
        for m in ("I", "K"):
            assert not decide(cfg.function, cfg.point, cfg.mode(m), cfg.space).converges


def test_search_exhausted_and_bad_predicate(capsys):
    code, out, _ = run(capsys, "search", "non-unique-limit", "--spaces", "discrete", "--bounds", "k=2,n=3")
    assert code == 3 and json.loads(out)["exhausted"]
    code, _, err = run(capsys, "search", "converges-in(I")
    assert code == 2


def test_enumerate(capsys):
    for k, n in ((2, 4), (3, 29)):
        code, out, _ = run(capsys, "enumerate", "--spaces", str(k))
        body = json.loads(out)
        assert code == 0 and body["count"] == body["axiom_filter"] == n and body["agree"]


def test_verify_small_bounds_deterministic(capsys, tmp_path):
    reports = []
    for idx in range(2):
        rep = tmp_path / f"v{idx}.json"
        code, out, _ = run(capsys, "verify", "s3", "--bounds", "k=2,n=2,p=3,f=6", "--report", str(rep))
        assert code == 0
        reports.append(rep.read_bytes())
    assert reports[0] == reports[1]
    code, out, _ = run(capsys, "verify", "s4", "--bounds", "k=2,p=3,f=6", "--semantics", "padded")
    assert code == 0
    with pytest.raises(SystemExit):
        main(["verify", "s2", "--bounds", "k=9"])
