"""CLI surface tests via the in-process entry point."""

import json

import pytest

from fairspread.cli import main


@pytest.fixture()
def graph_file(tmp_path):
    doc = {
        "n": 10,
        "directed": False,
        "p": 0.5,
        "edges": [[0, 1], [0, 2], [0, 3], [4, 5], [6, 7]],
        "communities": [0, 0, 0, 0, 1, 1, 1, 1, 1, 1],
    }
    path = tmp_path / "g.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture()
def spec_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(
        json.dumps(
            {"community_sizes": [20, 20], "within_prob": 0.1, "between_prob": 0.02}
        )
    )
    return path


def test_gen_sbm_writes_graph_and_metadata(tmp_path, spec_file):
    out = tmp_path / "sbm.json"
    rc = main(["gen-sbm", "--spec", str(spec_file), "--seed", "3", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["n"] == 40
    assert doc["meta"]["seed"] == 3
    meta = json.loads((tmp_path / "sbm.json.meta.json").read_text())
    assert meta["command"] == "gen-sbm"
    assert meta["p"] == 0.25  # defaults are echoed


def test_gen_sbm_byte_identical_reruns(tmp_path, spec_file):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    main(["gen-sbm", "--spec", str(spec_file), "--seed", "5", "--out", str(out1)])
    main(["gen-sbm", "--spec", str(spec_file), "--seed", "5", "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_select_text_output(graph_file, capsys):
    rc = main(
        ["select", "--graph", str(graph_file), "--k", "2", "--alpha", "-2",
         "--sketches", "200", "--seed", "7"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("seeds: [")
    assert "gap:" in out and "total:" in out


def test_select_zero_budget(graph_file, capsys):
    rc = main(["select", "--graph", str(graph_file), "--k", "0", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["seeds"] == []
    assert doc["utilities"] == [0.0, 0.0]


def test_select_every_method(graph_file, capsys):
    for method in ("welfare", "utilitarian", "maximin", "dc"):
        rc = main(
            ["select", "--graph", str(graph_file), "--k", "2", "--method", method,
             "--sketches", "100", "--format", "json"]
        )
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["seeds"]) == 2


def test_select_deterministic_output_files(graph_file, tmp_path):
    args = ["select", "--graph", str(graph_file), "--k", "3", "--sketches", "150",
            "--seed", "9", "--format", "csv"]
    out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    main(args + ["--out", str(out1)])
    main(args + ["--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_exact_seed_utilities(graph_file, capsys):
    rc = main(["exact", "--graph", str(graph_file), "4", "--format", "json"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["utilities_exact"][1] == "1/4"  # (1 + 1/2) / 6


def test_exact_bruteforce_mode(graph_file, capsys):
    rc = main(
        ["exact", "--graph", str(graph_file), "--k", "1", "--method", "utilitarian",
         "--format", "json"]
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["seeds"] == [0]  # star center maximizes total spread


def test_metrics_with_delta(graph_file, capsys):
    rc = main(
        ["metrics", "--graph", str(graph_file), "0", "4", "--alpha", "0",
         "--delta", "0.5", "--sketches", "200"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "welfare:" in out
    assert "dp_satisfied:" in out


def test_sweep_writes_csv_and_metadata(tmp_path, capsys):
    cfg = {
        "experiment": "sweep",
        "sbm": {"community_sizes": [20, 20], "within_prob": [0.1, 0.05],
                "between_prob": 0.02},
        "budgets": [4],
        "alphas": [-2.0],
        "baselines": ["utilitarian"],
        "replications": 2,
        "master_seed": 1,
        "R": 100,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "rows.csv"
    rc = main(["sweep", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("instance,replication,method,k,alpha,gap,pof,total,u_0")
    assert len(lines) > 1
    meta = json.loads((tmp_path / "rows.csv.meta.json").read_text())
    assert meta["master_seed"] == 1 and meta["experiment"] == "sweep"


def test_verify_passes_on_bundled_fixtures(capsys):
    rc = main(["verify"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("PASS") == 6
    assert "FAIL" not in out


def test_missing_file_exit_code(capsys):
    rc = main(["select", "--graph", "nope.json", "--k", "1"])
    assert rc == 3
    assert "error:" in capsys.readouterr().err


def test_infeasible_exit_code(graph_file, capsys):
    rc = main(["select", "--graph", str(graph_file), "--k", "99"])
    assert rc == 4


def test_enumeration_limit_exit_code(tmp_path, capsys):
    doc = {
        "n": 30,
        "directed": False,
        "p": 0.5,
        "edges": [[0, v] for v in range(1, 30)],
        "communities": [0] * 30,
    }
    path = tmp_path / "big.json"
    path.write_text(json.dumps(doc))
    rc = main(["exact", "--graph", str(path), "0"])
    assert rc == 4


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["select", "--bogus"])
    assert exc.value.code == 2


def test_help_available_per_subcommand(capsys):
    for cmd in ("gen-sbm", "select", "sweep", "exact", "verify", "metrics"):
        with pytest.raises(SystemExit) as exc:
            main([cmd, "--help"])
        assert exc.value.code == 0
        assert "--" in capsys.readouterr().out
