import math

import numpy as np
import pytest

import graphtrans as gt


def test_ring_graph_structure():
    g = gt.build_ring_graph(4, True)
    assert g.neighbor_lists() == [[0, 1, 3], [0, 1, 2], [1, 2, 3], [0, 2, 3]]
    assert g.degree(0) == 2
    with pytest.raises(gt.InvalidArgument):
        gt.build_ring_graph(2, True)


def test_circulant_pattern():
    g = gt.build_ring_graph(4, True)
    targets = [[0, 1, 2, 3], [3, 0, 1, 2], [1, 2, 3, 0]]
    m = np.asarray(gt.mode3_product(g, targets, [1.0, 2.0, 3.0]))
    expected = np.array([[1, 3, 0, 2], [2, 1, 3, 0], [0, 2, 1, 3], [3, 0, 2, 1]], dtype=float)
    np.testing.assert_array_equal(m, expected)


def test_soften_and_harden():
    g = gt.build_ring_graph(5, True)
    logits = [0.0] * (2 * 15)
    logits[1] = 4.0  # slice 0, vertex 0, second neighbor
    probs = gt.soften(g, 2, logits, 1.0)
    assert math.isclose(sum(probs[0:3]), 1.0, rel_tol=1e-12)
    assert gt.harden(g, 2, logits)[0][0] == 1
    with pytest.raises(gt.InvalidArgument):
        gt.soften(g, 2, logits, 0.0)


def test_temperature_schedule():
    assert gt.temperature_at(0, 10.0, 0.01, 100) == 10.0
    assert gt.temperature_at(100, 10.0, 0.01, 100) == 0.01
    assert math.isclose(gt.temperature_at(50, 10.0, 0.01, 100), 10.0 * 0.001**0.5, abs_tol=1e-12)


def test_apply_hard_moves_dirac():
    signal = np.zeros((4, 1))
    signal[0, 0] = 1.0
    out = np.asarray(gt.apply_hard([[1, 2, 3, 0]], 0, signal))
    assert out[1, 0] == 1.0 and out.sum() == 1.0


def test_canonical_transforms_and_distance():
    refs = dict(gt.canonical_transforms(4, 4))
    assert len(refs) == 9
    assert gt.nearest_canonical(refs["right"], 4, 4) == ("right", 0.0)
    assert gt.transform_distance(refs["identity"], refs["identity"]) == 0.0


def test_train_ring(tmp_path):
    config = gt.RunConfig()
    config.ring_n = 8
    config.ring_classes = 2
    config.ring_samples = 20
    config.k = 3
    config.steps = 20
    config.layers = [4, 4]
    config.out_dir = str(tmp_path)
    summary = gt.train(config)
    assert len(summary["targets"]) == 3
    assert all(len(row) == 8 for row in summary["targets"])
    assert summary["history"][0][1] == 10.0
    assert summary["history"][-1][1] == 0.01
    assert 0.0 <= summary["validation_accuracy"] <= 1.0
    assert (tmp_path / "transforms.json").exists()
