import json

import numpy as np
import pytest

from ringbench.cli import main, sweep_ring_count
from ringbench.export import load_bundle
from ringbench.metrics import read_score_file, write_score_file


@pytest.fixture(scope="module")
def cli_bundle(tmp_path_factory):
    # 4 rings per type so every split partition holds at least one ring
    out = tmp_path_factory.mktemp("cli") / "bundle"
    code = main(["generate", "--scale", "toy", "--seed", "13",
                 "--rings-ticketing", "4", "--rings-ghost", "4",
                 "--rings-ato", "4", "--out", str(out)])
    assert code == 0
    return out


def test_generate_writes_bundle(cli_bundle, capsys):
    assert (cli_bundle / "manifest.json").exists()
    assert (cli_bundle / "croissant.json").exists()
    graph, rings, assignment = load_bundle(cli_bundle)
    assert graph.nodes["user"].n == 500


def test_generate_summary_lines(tmp_path, capsys):
    out = tmp_path / "b"
    assert main(["generate", "--scale", "toy", "--seed", "5", "--out", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "fraud rate" in captured
    assert "bundle digest:" in captured
    assert "user" in captured


def test_generate_drop_relation_header_only(tmp_path):
    out = tmp_path / "b"
    code = main(["generate", "--scale", "toy", "--seed", "5",
                 "--drop-relation", "uses_device", "--out", str(out)])
    assert code == 0
    text = (out / "edges_uses_device.csv").read_text(encoding="utf-8")
    assert text == "src_id,dst_id\n"


def test_generate_bad_flag_exits_one(tmp_path, capsys):
    code = main(["generate", "--scale", "toy", "--users", "3",
                 "--out", str(tmp_path / "x")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_analyze_runs(cli_bundle, capsys, tmp_path):
    code = main(["analyze", "--bundle", str(cli_bundle),
                 "--csv-dir", str(tmp_path / "reports")])
    assert code == 0
    out = capsys.readouterr().out
    assert "motif fingerprints" in out
    assert "homophily" in out
    assert (tmp_path / "reports" / "homophily.csv").exists()


def test_split_command(cli_bundle, tmp_path, capsys):
    out = tmp_path / "resplit"
    code = main(["split", "--bundle", str(cli_bundle), "--out", str(out),
                 "--seed", "99"])
    assert code == 0
    lines = (out / "split_users.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "user_id,partition"
    assert len(lines) == 1 + 500


def test_baseline_and_evaluate_round_trip(cli_bundle, tmp_path, capsys):
    scores_path = tmp_path / "scores.tsv"
    assert main(["baseline", "--bundle", str(cli_bundle), "--model", "graph",
                 "--seed", "13", "--out", str(scores_path)]) == 0
    assert main(["evaluate", "--bundle", str(cli_bundle),
                 "--scores", str(scores_path),
                 "--csv", str(tmp_path / "report.csv")]) == 0
    out = capsys.readouterr().out
    assert "auc_roc" in out
    assert "ring recovery" in out
    assert (tmp_path / "report.csv").exists()


def test_evaluate_oracle_scores_are_perfect(cli_bundle, capsys):
    graph, rings, assignment = load_bundle(cli_bundle)
    labels = graph.nodes["user"].labels
    scores = {int(u): float(labels[u]) for u in range(graph.nodes["user"].n)}
    path = cli_bundle.parent / "oracle.tsv"
    write_score_file(path, scores)
    assert main(["evaluate", "--bundle", str(cli_bundle), "--scores", str(path)]) == 0
    out = capsys.readouterr().out
    assert "auc_roc            1.0000" in out
    # every test ring recovered
    for line in out.splitlines():
        parts = line.split()
        if parts and parts[0] in ("ticketing", "ghost_hotel", "ato"):
            assert parts[1] == parts[2]


def test_evaluate_missing_test_user_names_it(cli_bundle, tmp_path, capsys):
    graph, rings, assignment = load_bundle(cli_bundle)
    test_ids = assignment.users_in("test")
    scores = {int(u): 0.5 for u in range(graph.nodes["user"].n)}
    missing = int(test_ids[0])
    del scores[missing]
    path = tmp_path / "partial.tsv"
    write_score_file(path, scores)
    code = main(["evaluate", "--bundle", str(cli_bundle), "--scores", str(path)])
    assert code == 3
    assert str(missing) in capsys.readouterr().err


def test_ablate_command(cli_bundle, tmp_path):
    out = tmp_path / "ablated"
    code = main(["ablate", "--bundle", str(cli_bundle),
                 "--drop-relation", "uses_ip",
                 "--drop-feature", "distinct_device_count",
                 "--out", str(out)])
    assert code == 0
    graph, _rings, _assignment = load_bundle(out)
    assert graph.edges["uses_ip"].m == 0
    assert graph.nodes["user"].dim == 9


def test_sweep_ring_count_formula():
    assert sweep_ring_count(3) == 33
    assert sweep_ring_count(5) == 20
    assert sweep_ring_count(8) == 12
    assert sweep_ring_count(12) == 8
    assert sweep_ring_count(20) == 5
    assert sweep_ring_count(30) == 3


def test_generate_from_config_file(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(
        "scale: toy\nseed: 21\nn_ticketing_rings: 3\n"
        "n_ghost_hotel_rings: 2\nn_ato_rings: 2\n",
        encoding="utf-8",
    )
    out = tmp_path / "bundle"
    assert main(["generate", "--config", str(cfg), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["seed"] == 21
    assert manifest["counts"]["rings"] == 7


def test_missing_scores_file_exits_two(cli_bundle, capsys):
    code = main(["evaluate", "--bundle", str(cli_bundle),
                 "--scores", "/nonexistent/scores.tsv"])
    assert code == 2
    assert "io error" in capsys.readouterr().err
