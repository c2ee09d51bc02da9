import math

import numpy as np
import pytest

from core.network import HcnModel
from models.entities import AblationVariant, ConsensusWeights, LossTerm, MultiviewDataset, TrainingConfig
from repositories.checkpoint_repository import load_checkpoint
from services.ablation_service import AblationService
from services.data_service import make_synthetic
from services.evaluation_service import RAW_MODE, EvaluationService
from services.training_service import TrainingService, batch_masks, build_model, train
from utils.exceptions import HcnValidationError, NonFiniteLossError


def params_equal(a: HcnModel, b: HcnModel) -> bool:
    return all(np.array_equal(x, y) for x, y in zip(a.parameters(), b.parameters()))


def test_history_has_one_row_per_step(tiny_dataset, tiny_config):
    _, history = train(tiny_dataset, tiny_config)
    steps_per_epoch = math.ceil(tiny_dataset.n_samples / tiny_config.batch_size)
    assert len(history.steps) == tiny_config.epochs * steps_per_epoch
    assert [row.step for row in history.steps] == list(range(len(history.steps)))
    assert [epoch.epoch for epoch in history.epochs] == [1, 2]
    assert all(np.isfinite(row.total) for row in history.steps)
    assert all(epoch.acc is None for epoch in history.epochs)


def test_training_is_deterministic(tiny_dataset, tiny_config):
    first, history_a = train(tiny_dataset, tiny_config)
    second, history_b = train(tiny_dataset, tiny_config)
    assert params_equal(first, second)
    assert [r.total for r in history_a.steps] == [r.total for r in history_b.steps]


def test_different_seeds_differ(tiny_dataset, tiny_config):
    first, _ = train(tiny_dataset, tiny_config)
    second, _ = train(tiny_dataset, tiny_config.model_copy(update={"seed": 4}))
    assert not params_equal(first, second)


def test_zero_learning_rate_keeps_initial_parameters(tiny_dataset, tiny_config):
    config = tiny_config.model_copy(update={"lr": 0.0})
    model, _ = train(tiny_dataset, config)
    assert params_equal(model, build_model(tiny_dataset.view_dims, config))


def test_disabled_terms_stay_at_zero(tiny_dataset, tiny_config):
    config = tiny_config.model_copy(update={"disabled_terms": [LossTerm.CLS, LossTerm.GLB]})
    _, history = train(tiny_dataset, config)
    assert all(row.cls == 0.0 and row.glb == 0.0 for row in history.steps)
    assert all(row.rec > 0.0 for row in history.steps)


def test_batch_masks(tiny_config):
    masks = batch_masks([5, 4], tiny_config, epoch=1, batch_index=0)
    assert [mask.size for mask in masks] == [5, 4]
    assert batch_masks([5, 4], tiny_config.model_copy(update={"use_augmentation": False}), 1, 0) is None
    again = batch_masks([5, 4], tiny_config, epoch=1, batch_index=0)
    assert all(np.array_equal(a.m, b.m) for a, b in zip(masks, again))


def test_periodic_evaluation(tiny_dataset, tiny_config):
    config = tiny_config.model_copy(update={"eval_every": 1})
    _, history = train(tiny_dataset, config)
    assert all(epoch.acc is not None and 0.0 <= epoch.acc <= 1.0 for epoch in history.epochs)


def test_checkpoint_is_written(tmp_path, tiny_dataset, tiny_config):
    path = tmp_path / "run" / "model.hcn"
    model, history = TrainingService().train(tiny_dataset, tiny_config, path)
    assert history.checkpoint_path == str(path)
    assert params_equal(load_checkpoint(path, tiny_dataset.view_dims), model)


def test_non_finite_input_is_reported(tiny_dataset, tiny_config):
    views = [view.copy() for view in tiny_dataset.views]
    views[0][:, 0] = np.nan
    broken = MultiviewDataset(name="broken", views=views, labels=tiny_dataset.labels)
    with pytest.raises(NonFiniteLossError) as error:
        train(broken, tiny_config)
    assert error.value.term == "rec"
    assert error.value.step == 0


def test_single_view_is_rejected(tiny_dataset, tiny_config):
    single = MultiviewDataset(name="single", views=[tiny_dataset.views[0]])
    with pytest.raises(HcnValidationError):
        train(single, tiny_config)


# ---------------------------------------------------------------- experimentos

SEEDS = [0, 1, 2, 3, 4]


@pytest.fixture(scope="module")
def experiment_dataset():
    return make_synthetic(n=600, k_true=4, view_dims=[20, 30], noise_sigma=0.05, seed=0)


@pytest.fixture(scope="module")
def experiment_config():
    return TrainingConfig(
        epochs=200,
        batch_size=256,
        hidden_widths=[128, 128, 128],
        weights=ConsensusWeights(),
    )


@pytest.fixture(scope="module")
def experiment_runs(experiment_dataset, experiment_config):
    service = TrainingService()
    evaluation = EvaluationService()
    runs = []
    for seed in SEEDS:
        config = experiment_config.model_copy(update={"seed": seed})
        model, history = service.train(experiment_dataset, config)
        report = evaluation.evaluate(model, experiment_dataset, seed=seed)
        runs.append((model, history, report))
    return runs


@pytest.mark.slow
def test_synthetic_experiment_beats_raw_baseline(experiment_dataset, experiment_runs):
    evaluation = EvaluationService()
    hcn_acc = np.mean([report.acc for _, _, report in experiment_runs])
    raw_acc = np.mean([
        evaluation.evaluate(None, experiment_dataset, seed=seed, mode=RAW_MODE).acc for seed in SEEDS
    ])
    assert hcn_acc >= 0.90
    assert hcn_acc >= raw_acc + 0.05


@pytest.mark.slow
def test_loss_decreases(experiment_runs):
    for _, history, _ in experiment_runs:
        totals = history.epoch_mean_totals()
        assert np.mean(totals[-10:]) < totals[0]


@pytest.mark.slow
def test_removing_classifying_consensus_hurts(experiment_dataset, experiment_config, experiment_runs):
    rows = AblationService().run(experiment_dataset, experiment_config, SEEDS,
                                 [AblationVariant.NO_CLS])
    full_acc = np.mean([report.acc for _, _, report in experiment_runs])
    assert rows[0].acc < full_acc


@pytest.mark.slow
def test_repeated_run_is_bit_identical(tmp_path, experiment_dataset, experiment_config, experiment_runs):
    config = experiment_config.model_copy(update={"seed": SEEDS[0]})
    paths = [tmp_path / "a.hcn", tmp_path / "b.hcn"]
    reports = []
    for path in paths:
        model, _ = TrainingService().train(experiment_dataset, config, path)
        reports.append(EvaluationService().evaluate(model, experiment_dataset, seed=SEEDS[0]))
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert reports[0] == reports[1]
    assert reports[0].acc == experiment_runs[0][2].acc


@pytest.mark.slow
def test_epoch_time_scales_linearly(experiment_config):
    def epoch_seconds(n):
        dataset = make_synthetic(n=n, k_true=4, view_dims=[20, 30], noise_sigma=0.05, seed=0)
        config = experiment_config.model_copy(update={"epochs": 5})
        _, history = train(dataset, config)
        return float(np.median(history.epoch_seconds[1:]))

    epoch_seconds(600)
    ratio = epoch_seconds(4800) / epoch_seconds(2400)
    assert 1.6 <= ratio <= 2.6
