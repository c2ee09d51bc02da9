import json

import numpy as np
import pytest

from core.network import HcnModel
from models.entities import Activation, TrainingConfig
from models.schemas import MetricSummary
from repositories.checkpoint_repository import CheckpointRepository, load_checkpoint, save_checkpoint
from repositories.dataset_repository import ManifestRepository
from repositories.matrix_repository import (
    BINARY_HEADER,
    BINARY_MAGIC,
    BINARY_VERSION,
    LabelRepository,
    MatrixRepository,
    contiguous_labels,
)
from repositories.report_repository import CsvReportRepository, JsonReportRepository
from utils.exceptions import (
    CheckpointShapeError,
    CheckpointTruncatedError,
    CheckpointVersionError,
    DatasetFileNotFoundError,
    DimensionMismatchError,
    HcnValidationError,
    NonNumericContentError,
)


@pytest.fixture
def model(rng):
    return HcnModel.build([5, 3], 4, [6, 6], Activation.RELU, rng)


# ---------------------------------------------------------------- checkpoints

def test_checkpoint_round_trip(tmp_path, model):
    path = save_checkpoint(model, tmp_path / "nested" / "model.hcn", {"seed": 3})
    restored = load_checkpoint(path, expected_view_dims=[5, 3])
    assert restored.view_dims == [5, 3]
    assert restored.d_out == 4
    assert all(np.array_equal(a, b) for a, b in zip(restored.parameters(), model.parameters()))
    _, config = CheckpointRepository().load(path)
    assert config == {"seed": 3}


def test_checkpoint_keeps_training_config(tmp_path, model):
    config = TrainingConfig(epochs=3, hidden_widths=[6, 6], d_out=4)
    path = save_checkpoint(model, tmp_path / "model.hcn", config.model_dump(mode="json"))
    _, echoed = CheckpointRepository().load(path)
    assert TrainingConfig(**echoed) == config


def test_checkpoint_errors(tmp_path, model):
    path = save_checkpoint(model, tmp_path / "model.hcn")
    payload = path.read_bytes()

    with pytest.raises(CheckpointShapeError):
        load_checkpoint(path, expected_view_dims=[5, 4])

    truncated = tmp_path / "truncated.hcn"
    truncated.write_bytes(payload[:-8])
    with pytest.raises(CheckpointTruncatedError):
        load_checkpoint(truncated)

    extra = tmp_path / "extra.hcn"
    extra.write_bytes(payload + b"\x00" * 8)
    with pytest.raises(CheckpointShapeError):
        load_checkpoint(extra)

    corrupt = tmp_path / "corrupt.hcn"
    corrupt.write_bytes(b"{not json\n" + payload)
    with pytest.raises(CheckpointVersionError):
        load_checkpoint(corrupt)

    header_end = payload.index(b"\n")
    header = json.loads(payload[:header_end])
    header["version"] = 99
    future = tmp_path / "future.hcn"
    future.write_bytes(json.dumps(header).encode() + payload[header_end:])
    with pytest.raises(CheckpointVersionError):
        load_checkpoint(future)

    with pytest.raises(DatasetFileNotFoundError):
        load_checkpoint(tmp_path / "missing.hcn")


# ---------------------------------------------------------------- matrices

def test_binary_matrix_round_trip(tmp_path, rng):
    matrix = rng.standard_normal((4, 3))
    repository = MatrixRepository()
    path = repository.save(matrix, tmp_path / "view.bin")
    assert path.stat().st_size == BINARY_HEADER.size + matrix.size * 8
    assert np.array_equal(repository.load(path), matrix)


def test_binary_matrix_errors(tmp_path):
    repository = MatrixRepository()
    short = tmp_path / "short.bin"
    short.write_bytes(BINARY_HEADER.pack(BINARY_MAGIC, BINARY_VERSION, 2, 2) + b"\x00" * 16)
    with pytest.raises(DimensionMismatchError):
        repository.load(short)

    values = np.array([[1.0, 2.0], [np.nan, 0.0]])
    bad = tmp_path / "nan.bin"
    bad.write_bytes(BINARY_HEADER.pack(BINARY_MAGIC, BINARY_VERSION, 2, 2) + values.astype("<f8").tobytes())
    with pytest.raises(NonNumericContentError) as error:
        repository.load(bad, view="view_0")
    assert error.value.row == 2

    unknown = tmp_path / "unknown.bin"
    unknown.write_bytes(b"NOTAMAT!" + b"\x00" * 24)
    with pytest.raises(HcnValidationError):
        repository.load(unknown)


def test_csv_matrix(tmp_path):
    repository = MatrixRepository()
    path = tmp_path / "view.csv"
    path.write_text("x,y\n1,2\n\n3,4.5\n", encoding="utf-8")
    assert repository.load(path).tolist() == [[1.0, 2.0], [3.0, 4.5]]

    path.write_text("1,2\n3\n", encoding="utf-8")
    with pytest.raises(DimensionMismatchError):
        repository.load(path)

    path.write_text("1,2\n3,inf\n", encoding="utf-8")
    with pytest.raises(NonNumericContentError):
        repository.load(path)

    path.write_text("a,b\n", encoding="utf-8")
    with pytest.raises(HcnValidationError):
        repository.load(path)


def test_labels(tmp_path):
    repository = LabelRepository()
    path = repository.save(np.array([2, 0, 2]), tmp_path / "labels.csv")
    assert repository.load(path).tolist() == [2, 0, 2]
    path.write_text("1\n2.5\n", encoding="utf-8")
    with pytest.raises(NonNumericContentError):
        repository.load(path)
    assert contiguous_labels(np.array([10, 4, 10, 7])).tolist() == [2, 0, 2, 1]


def test_manifest_errors(tmp_path):
    repository = ManifestRepository()
    broken = tmp_path / "manifest.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(HcnValidationError):
        repository.load(broken)
    broken.write_text(json.dumps({"name": "x", "views": []}), encoding="utf-8")
    with pytest.raises(HcnValidationError):
        repository.load(broken)


def test_toml_manifest(tmp_path):
    path = tmp_path / "manifest.toml"
    path.write_text('name = "toml"\n[[views]]\npath = "a.csv"\ndims = 2\n', encoding="utf-8")
    manifest = ManifestRepository().load(path)
    assert manifest.name == "toml"
    assert manifest.views[0].dims == 2


# ---------------------------------------------------------------- reportes

def test_csv_report(tmp_path):
    repository = CsvReportRepository()
    rows = [{"epoch": 1, "acc": None}, {"epoch": 2, "acc": 0.5}]
    path = repository.save(rows, tmp_path / "out" / "epochs.csv")
    assert path.read_text(encoding="utf-8") == "epoch,acc\n1,\n2,0.5\n"
    assert repository.load(path)[1] == {"epoch": "2", "acc": "0.5"}


def test_json_report(tmp_path):
    repository = JsonReportRepository()
    path = repository.save({"b": MetricSummary(mean=0.5, std=0.0, best=0.5), "a": [1, 2]},
                           tmp_path / "report.json")
    assert repository.load(path) == {"a": [1, 2], "b": {"mean": 0.5, "std": 0.0, "best": 0.5}}
    model_path = repository.save(MetricSummary(mean=1.0, std=0.0, best=1.0), tmp_path / "summary.json")
    assert repository.load(model_path)["best"] == 1.0
