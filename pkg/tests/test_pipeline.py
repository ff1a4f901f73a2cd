"""Batch pipeline: artifacts, manifest digests, reproducibility."""

import hashlib
import json
import math

import numpy as np
import pytest

import legnet
from legnet import DataError, Pipeline, compare_models, fit_exact_dyad
from legnet.config import config_from_dict
from legnet.ergm import Edges, ErgmSpec, Mutual
from legnet.pipeline import fmt

from conftest import random_digraph, write_toy


def test_fmt_edge_cases():
    assert fmt(None) == ""
    assert fmt(float("nan")) == ""
    assert fmt(float("inf")) == "Inf"
    assert fmt(float("-inf")) == "-Inf"
    assert fmt(0.5) == "0.5"
    assert fmt(2) == "2"
    assert fmt("label") == "label"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(np.float64(0.25)) == "0.25"


def test_compare_models_ranks_and_reductions():
    g = random_digraph(12, 0.25, seed=3, mutual_boost=0.5)
    base = fit_exact_dyad(g, ErgmSpec([Edges()]))
    rich = fit_exact_dyad(g, ErgmSpec([Edges(), Mutual()]))
    rows = compare_models([("null", base), ("recip", rich)])
    assert [r["aic"] for r in rows] == sorted(r["aic"] for r in rows)
    null_row = next(r for r in rows if r["model"] == "null")
    rich_row = next(r for r in rows if r["model"] == "recip")
    assert null_row["aic_reduction_pct"] == 0.0
    expect = 100.0 * (base.aic - rich.aic) / base.aic
    assert rich_row["aic_reduction_pct"] == pytest.approx(expect)
    assert rich_row["terms"] == 2


def test_compare_models_validation():
    g = random_digraph(10, 0.3, seed=1)
    h = random_digraph(10, 0.3, seed=2)
    fit_g = fit_exact_dyad(g, ErgmSpec([Edges()]))
    with pytest.raises(DataError, match="at least 2"):
        compare_models([("only", fit_g)])
    fit_h = fit_exact_dyad(h, ErgmSpec([Edges()]))
    with pytest.raises(DataError, match="different graphs"):
        compare_models([("a", fit_g), ("b", fit_h)])


@pytest.fixture(scope="module")
def toy_run(tmp_path_factory):
    src = tmp_path_factory.mktemp("toy_src")
    epath, apath = write_toy(src)
    out = tmp_path_factory.mktemp("toy_out")
    config = config_from_dict({
        "edges": str(epath), "attrs": str(apath), "out": str(out),
        "seed": 5,
        "models": ["model1", "model2", "model6"],
        "sbm": {"q_range": [1, 4], "restarts": 4},
    })
    manifest = legnet.run(config)
    return epath, apath, out, manifest


EXPECTED_FILES = {
    "graph_summary.json", "edges.csv", "graph.graphml", "graph.dot",
    "centrality.csv", "connectivity.json", "assortativity.csv",
    "ergm_model1.json", "ergm_model2.json", "ergm_model6.json",
    "ergm_coefficients.csv", "ergm_effects.csv", "model_comparison.csv",
    "ergm_lrt_vs_edges.csv", "sbm_icl_curve.csv", "sbm_fit.json",
    "communities.csv", "interaction_matrix.csv", "community_annotations.json",
    "community_summary.csv", "partition_scores.csv", "summary.md",
}


def test_run_emits_expected_artifacts(toy_run):
    _, _, out, manifest = toy_run
    written = {p.name for p in out.iterdir()}
    assert EXPECTED_FILES <= written
    assert "manifest.json" in written
    assert set(manifest["outputs"]) == EXPECTED_FILES


def test_manifest_digests_match_files(toy_run):
    epath, _, out, manifest = toy_run
    for name, digest in manifest["outputs"].items():
        actual = hashlib.sha256((out / name).read_bytes()).hexdigest()
        assert actual == digest, name
    assert manifest["inputs"]["edges"] == hashlib.sha256(
        epath.read_bytes()).hexdigest()
    assert manifest["seed"] == 5
    disk = json.loads((out / "manifest.json").read_text())
    assert disk == manifest


def test_rerun_is_byte_identical(toy_run, tmp_path):
    epath, apath, out, manifest = toy_run
    out2 = tmp_path / "again"
    config = config_from_dict({
        "edges": str(epath), "attrs": str(apath), "out": str(out2),
        "seed": 5,
        "models": ["model1", "model2", "model6"],
        "sbm": {"q_range": [1, 4], "restarts": 4},
    })
    second = legnet.run(config)
    assert second["outputs"] == manifest["outputs"]
    for name in manifest["outputs"]:
        assert (out2 / name).read_bytes() == (out / name).read_bytes(), name


def test_summary_covers_each_stage(toy_run):
    _, _, out, _ = toy_run
    text = (out / "summary.md").read_text()
    for heading in ("# Network analysis summary", "### Top 5 by betweenness",
                    "## Cohesion", "## Assortativity", "## Models",
                    "## Communities"):
        assert heading in text, heading


def test_partition_scores_columns(toy_run):
    _, _, out, _ = toy_run
    lines = (out / "partition_scores.csv").read_text().splitlines()
    assert lines[0] == "partition,rand,adjusted_rand,nmi"
    names = {line.split(",")[0] for line in lines[1:]}
    assert names == {"party", "chamber"}
    for line in lines[1:]:
        for cell in line.split(",")[1:]:
            float(cell)


def test_attrless_run_skips_and_notices(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    epath, _ = write_toy(src)
    out = tmp_path / "out"
    config = config_from_dict({
        "edges": str(epath), "out": str(out), "seed": 1,
        "models": ["model1", "model2", "model4"],
        "sbm": {"q_range": [1, 3], "restarts": 2},
    })
    manifest = legnet.run(config)
    written = set(manifest["outputs"])
    assert "partition_scores.csv" not in written
    assert "ergm_model4.json" not in written
    assert "ergm_model1.json" in written and "sbm_fit.json" in written
    assort = (out / "assortativity.csv").read_text().splitlines()
    variables = {line.split(",")[0] for line in assort[1:]}
    assert "party" not in variables and "chamber" not in variables
    joined = " ".join(manifest["notices"])
    assert "model4" in joined
    assert "attribute" in joined


def test_single_stage_selection(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    epath, apath = write_toy(src)
    out = tmp_path / "out"
    config = config_from_dict({
        "edges": str(epath), "attrs": str(apath), "out": str(out),
        "stages": ["ingest"],
    })
    manifest = legnet.run(config)
    assert set(manifest["outputs"]) == {"graph_summary.json", "edges.csv",
                                        "graph.graphml", "graph.dot"}
    assert manifest["stages"] == ["ingest"]


def test_centrality_models_force_topology_stage(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    epath, _ = write_toy(src)
    out = tmp_path / "out"
    config = config_from_dict({
        "edges": str(epath), "out": str(out), "seed": 2,
        "stages": ["ergm"], "models": ["model3"],
    })
    manifest = legnet.run(config)
    assert "centrality.csv" in manifest["outputs"]
    assert manifest["stages"] == ["topology", "ergm"]
    assert any("forced" in n for n in manifest["notices"])
    # baseline models alone leave topology out
    out2 = tmp_path / "out2"
    config2 = config_from_dict({
        "edges": str(epath), "out": str(out2), "seed": 2,
        "stages": ["ergm"], "models": ["model1", "model2"],
    })
    manifest2 = legnet.run(config2)
    assert "centrality.csv" not in manifest2["outputs"]
    assert manifest2["stages"] == ["ergm"]


def test_score_stage_pulls_in_communities(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    epath, apath = write_toy(src)
    out = tmp_path / "out"
    config = config_from_dict({
        "edges": str(epath), "attrs": str(apath), "out": str(out),
        "stages": ["score"], "seed": 3,
        "sbm": {"q_range": [1, 3], "restarts": 2},
    })
    manifest = legnet.run(config)
    assert "partition_scores.csv" in manifest["outputs"]
    assert "sbm_fit.json" in manifest["outputs"]


def test_ingest_round_trip_preserves_weights(toy_run):
    epath, _, out, _ = toy_run
    graph = legnet.load_edge_list(epath)
    again = legnet.load_edge_list(out / "edges.csv")
    assert list(again.edge_records()) == list(graph.edge_records())


def test_ergm_fit_artifact_content(toy_run):
    _, _, out, _ = toy_run
    fit = json.loads((out / "ergm_model2.json").read_text())
    assert fit["terms"] == ["edges", "mutual"]
    assert len(fit["theta"]) == 2
    assert fit["method"] == "exact-dyad"
    assert fit["converged"] == 1 or fit["converged"] is True
    assert math.isfinite(fit["aic"])
    # reciprocity boost in the toy generator shows up as positive mutuality
    assert fit["theta"][1] > 0


def test_sbm_artifact_coherence(toy_run):
    _, _, out, _ = toy_run
    fit = json.loads((out / "sbm_fit.json").read_text())
    curve_lines = (out / "sbm_icl_curve.csv").read_text().splitlines()
    assert curve_lines[0] == "q,icl"
    curve = {int(r.split(",")[0]): float(r.split(",")[1])
             for r in curve_lines[1:]}
    assert set(curve) == {1, 2, 3, 4}
    assert fit["q"] == max(curve, key=curve.get)
    members = (out / "communities.csv").read_text().splitlines()
    assert members[0] == "node_id,community"
    assert len(members) - 1 == 30
    labels = {int(r.split(",")[1]) for r in members[1:]}
    assert min(labels) == 1
