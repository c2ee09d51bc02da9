import itertools
import math

import numpy as np
import pytest

from core.network import HcnModel
from models.entities import Activation, MultiviewDataset, NmiAverage
from services.evaluation_service import (
    HCN_MODE,
    RAW_MODE,
    EvaluationService,
    accuracy,
    ari,
    contingency,
    evaluate,
    fuse_features,
    hungarian,
    kmeans,
    nmi,
    summarize,
)
from utils.exceptions import HcnValidationError, MissingLabelsError, ShapeMismatchError


def brute_force_accuracy(pred, truth):
    clusters = sorted(set(pred))
    classes = sorted(set(truth))
    size = max(len(clusters), len(classes))
    slots = classes + [None] * (size - len(classes))
    best = 0
    for assignment in itertools.permutations(slots, size):
        mapping = dict(zip(clusters, assignment))
        best = max(best, sum(mapping[p] == t for p, t in zip(pred, truth)))
    return best / len(truth)


def pair_counting_ari(pred, truth):
    n = len(pred)
    same_both = same_pred = same_truth = 0
    for i, j in itertools.combinations(range(n), 2):
        p = pred[i] == pred[j]
        t = truth[i] == truth[j]
        same_both += p and t
        same_pred += p
        same_truth += t
    pairs = n * (n - 1) / 2
    expected = same_pred * same_truth / pairs
    maximum = (same_pred + same_truth) / 2
    return (same_both - expected) / (maximum - expected)


def loop_nmi(pred, truth, average="geometric"):
    n = len(pred)
    joint, p_count, t_count = {}, {}, {}
    for p, t in zip(pred, truth):
        joint[(p, t)] = joint.get((p, t), 0) + 1
        p_count[p] = p_count.get(p, 0) + 1
        t_count[t] = t_count.get(t, 0) + 1
    mutual = sum(c / n * math.log(n * c / (p_count[p] * t_count[t])) for (p, t), c in joint.items())
    h_p = -sum(c / n * math.log(c / n) for c in p_count.values())
    h_t = -sum(c / n * math.log(c / n) for c in t_count.values())
    norm = math.sqrt(h_p * h_t) if average == "geometric" else (h_p + h_t) / 2
    return mutual / norm


# ---------------------------------------------------------------- métricas

def test_metric_examples():
    assert accuracy(np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1])) == 0.5
    pred, truth = np.array([1, 1, 0, 0, 2]), np.array([0, 0, 1, 1, 2])
    assert (accuracy(pred, truth), nmi(pred, truth), ari(pred, truth)) == pytest.approx((1.0, 1.0, 1.0))


def test_independence_fixture():
    pred, truth = [0, 0, 1, 1], [0, 1, 0, 1]
    expected_ari = pair_counting_ari(pred, truth)
    assert expected_ari == pytest.approx(-0.5)
    assert ari(np.array(pred), np.array(truth)) == pytest.approx(expected_ari, abs=1e-12)
    assert nmi(np.array(pred), np.array(truth)) == pytest.approx(0.0, abs=1e-12)


def test_constant_prediction_has_zero_ari():
    assert ari(np.zeros(4, dtype=int), np.array([0, 1, 0, 1])) == pytest.approx(0.0)


def test_accuracy_matches_brute_force(rng):
    for _ in range(200):
        n = int(rng.integers(2, 31))
        k = int(rng.integers(1, 7))
        pred = rng.integers(0, k, size=n)
        truth = rng.integers(0, int(rng.integers(1, 7)), size=n)
        assert accuracy(pred, truth) == brute_force_accuracy(pred.tolist(), truth.tolist())


@pytest.mark.parametrize("average", list(NmiAverage))
def test_nmi_and_ari_match_loop_oracles(rng, average):
    for _ in range(50):
        n = int(rng.integers(6, 31))
        pred = rng.integers(0, 4, size=n)
        truth = rng.integers(0, 3, size=n)
        pred[:2] = [0, 1]
        truth[:2] = [0, 1]
        assert nmi(pred, truth, average) == pytest.approx(
            loop_nmi(pred.tolist(), truth.tolist(), average.value), abs=1e-10
        )
        assert ari(pred, truth) == pytest.approx(pair_counting_ari(pred.tolist(), truth.tolist()), abs=1e-10)


def test_metric_errors():
    with pytest.raises(ShapeMismatchError):
        accuracy(np.array([0, 1]), np.array([0, 1, 1]))
    with pytest.raises(HcnValidationError):
        nmi(np.array([], dtype=int), np.array([], dtype=int))


def test_contingency_rows_are_clusters():
    table = contingency(np.array([0, 0, 1, 2]), np.array([1, 1, 0, 0]))
    assert table.tolist() == [[0, 2], [1, 0], [1, 0]]


def test_summarize():
    summary = summarize([0.5, 0.7, 0.9])
    assert summary.mean == pytest.approx(0.7)
    assert summary.best == 0.9
    assert summary.std == pytest.approx(np.std([0.5, 0.7, 0.9]))
    assert summarize([0.4]).std == 0.0


# ---------------------------------------------------------------- asignación y k-means

def test_hungarian_matches_brute_force(rng):
    for size in range(1, 6):
        cost = rng.uniform(-5, 5, size=(size, size))
        permutation = hungarian(cost)
        assert sorted(permutation.tolist()) == list(range(size))
        best = min(
            sum(cost[i, p[i]] for i in range(size))
            for p in itertools.permutations(range(size))
        )
        assert cost[np.arange(size), permutation].sum() == pytest.approx(best)


def test_hungarian_row_shift_keeps_assignment(rng):
    cost = rng.uniform(size=(4, 4))
    shifted = cost + np.array([[3.0], [-1.0], [0.5], [7.0]])
    base = hungarian(cost)
    assert cost[np.arange(4), hungarian(shifted)].sum() == pytest.approx(cost[np.arange(4), base].sum())


def test_hungarian_errors():
    with pytest.raises(ShapeMismatchError):
        hungarian(np.zeros((2, 3)))
    with pytest.raises(HcnValidationError):
        hungarian(np.array([[np.inf]]))


def test_kmeans_examples():
    x = np.array([[0.0, 0.0], [0.0, 0.1], [10.0, 10.0], [10.0, 10.1]])
    labels, inertia = kmeans(x, 2, restarts=3, seed=0)
    assert labels[0] == labels[1] != labels[2] == labels[3]
    assert inertia == pytest.approx(0.01)

    _, zero = kmeans(x, 4, restarts=1, seed=0)
    assert zero == pytest.approx(0.0)

    with pytest.raises(HcnValidationError):
        kmeans(x, 5)
    with pytest.raises(HcnValidationError):
        kmeans(x, 2, restarts=0)


def test_kmeans_is_deterministic(rng):
    x = rng.standard_normal((40, 3))
    first = kmeans(x, 3, restarts=2, seed=9)
    second = kmeans(x, 3, restarts=2, seed=9)
    assert np.array_equal(first[0], second[0])
    assert first[1] == second[1]


# ---------------------------------------------------------------- fusión y servicio

def test_fuse_features(rng):
    blocks = [rng.standard_normal((3, 2)), rng.standard_normal((3, 4))]
    fused = fuse_features(blocks)
    assert fused.shape == (3, 6)
    assert np.array_equal(fused[:, 2:], blocks[1])
    with pytest.raises(ShapeMismatchError):
        fuse_features([np.zeros((3, 2)), np.zeros((4, 2))])
    with pytest.raises(ShapeMismatchError):
        fuse_features([])


def test_raw_evaluation(tiny_dataset):
    report = evaluate(None, tiny_dataset, restarts=2, seed=1)
    assert report.mode == RAW_MODE
    assert len(report.predicted) == tiny_dataset.n_samples
    assert np.asarray(report.contingency).sum() == tiny_dataset.n_samples
    assert 0.0 <= report.acc <= 1.0


def test_model_evaluation(tiny_dataset, rng):
    model = HcnModel.build(tiny_dataset.view_dims, 4, [6], Activation.TANH, rng)
    service = EvaluationService(restarts=2)
    assert service.embed(model, tiny_dataset).shape == (tiny_dataset.n_samples, 8)
    reports, summary = service.evaluate_seeds(model, tiny_dataset, [0, 1, 2])
    assert [r.seed for r in reports] == [0, 1, 2]
    assert all(r.mode == HCN_MODE for r in reports)
    assert summary.runs == 3
    assert summary.acc.best == max(r.acc for r in reports)


def test_evaluation_requires_labels(tiny_dataset):
    unlabeled = MultiviewDataset(name="unlabeled", views=tiny_dataset.views)
    service = EvaluationService(restarts=1)
    with pytest.raises(MissingLabelsError):
        service.evaluate(None, unlabeled)
    with pytest.raises(MissingLabelsError):
        service.evaluate_seeds(None, unlabeled, [0])


def test_model_and_dataset_must_agree(tiny_dataset, rng):
    model = HcnModel.build([3, 3], 4, [6], Activation.TANH, rng)
    with pytest.raises(ShapeMismatchError):
        EvaluationService(restarts=1).evaluate(model, tiny_dataset)
