import os
from pathlib import Path

import numpy as np
import pytest

import climcausal as cc

FIXTURES = Path(os.environ.get("CLIMCAUSAL_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "data" / "fixtures"))


def test_score_of_gaussian_points_toward_mode():
    x = np.random.default_rng(0).standard_normal((300, 1))
    g = cc.stein_score(x, 2.0 * cc.median_bandwidth(x))
    assert g.shape == x.shape
    assert np.polyfit(x[:, 0], g[:, 0], 1)[0] < -0.5


def test_hessian_shape():
    x = np.random.default_rng(1).standard_normal((100, 3))
    assert cc.stein_hessian_diag(x, 1.0).shape == (100, 3)


def test_synthetic_order_prune_evaluate():
    data, labels, truth = cc.synthesize(d=4, edge_prob=0.5, n=500, seed=3)
    assert data.shape == (500, 4)
    order = cc.estimate_order(data, labels)
    assert sorted(order) == sorted(labels)
    edges = cc.prune(data, labels, order)
    pos = {l: k for k, l in enumerate(order)}
    assert all(pos[a] < pos[b] for a, b in edges)
    m = cc.evaluate(labels, truth, edges)
    assert set(m) == {"shd", "sid", "precision", "recall", "f1", "l2"}
    assert cc.evaluate(labels, truth, truth)["shd"] == 0


def test_pipeline_is_deterministic(tmp_path):
    a = cc.run_synthetic(seed=7)
    b = cc.run_synthetic(seed=7, threads=2, out=tmp_path)
    assert a["determinism_hash"] == b["determinism_hash"]
    assert a["metrics"]["shd"] == 0
    assert (tmp_path / "report.txt").exists()


def test_prompts():
    p = cc.build_prompts(["EG.CFT.ACCS.RU.ZS", "EG.CFT.ACCS.UR.ZS", "SP.URB.TOTL.IN.ZS"])
    assert len(p) == 45
    assert {q["category"] for q in p} == {"Direct", "Preventative", "Facilitative", "Resultative", "Influential"}


def test_real_fixture():
    r = cc.run_real(FIXTURES / "mini_wdi.csv", FIXTURES / "emissions.csv", queries=False)
    assert r["complete"]
    assert r["target"] == "CO2E.PC"
    assert r["drivers"]


def test_errors_carry_their_kind():
    with pytest.raises(cc.ClimcausalError, match=r"^\[data\]"):
        cc.run_real(Path("/nonexistent/wdi.csv"), FIXTURES / "emissions.csv")
    with pytest.raises(cc.ClimcausalError, match=r"^\[config\]"):
        cc.stein_score(np.ones((5, 1)) + np.arange(5)[:, None], 0.0)
