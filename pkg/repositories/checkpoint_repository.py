"""
Repositorio de checkpoints del modelo

El archivo tiene una primera línea JSON (magic, versión, arquitectura y eco
de la configuración) seguida de los parámetros como float64 little-endian,
capa por capa: por cada vista el encoder y luego el decoder, pesos antes que
bias.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from core.nn import LinearLayer
from core.network import HcnModel, ViewAutoencoder
from models.entities import Activation
from repositories.base import BaseRepository
from utils.exceptions import (
    CheckpointShapeError,
    CheckpointTruncatedError,
    CheckpointVersionError,
)

CHECKPOINT_MAGIC = "HCN-CHECKPOINT"
MAX_HEADER_BYTES = 1 << 20

Checkpoint = Tuple[HcnModel, Dict[str, Any]]


def _layer_shapes(layers: Sequence[LinearLayer]) -> List[List[int]]:
    return [[layer.d_in, layer.d_out] for layer in layers]


class CheckpointRepository(BaseRepository[Checkpoint]):
    """Guarda y carga el modelo con su configuración"""

    def __init__(self):
        super().__init__("checkpoint")

    def _write(self, entity: Checkpoint, path: Path, **options: Any) -> None:
        model, config = entity
        header = {
            "magic": CHECKPOINT_MAGIC,
            "version": settings.checkpoint_version,
            "activation": model.views[0].activation.value,
            "views": [
                {"encoder": _layer_shapes(view.encoder), "decoder": _layer_shapes(view.decoder)}
                for view in model.views
            ],
            "config": config,
        }
        with path.open("wb") as handle:
            handle.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
            for param in model.parameters():
                handle.write(np.ascontiguousarray(param, dtype="<f8").tobytes(order="C"))

    def _read(self, path: Path, expected_view_dims: Optional[Sequence[int]] = None,
              **options: Any) -> Checkpoint:
        payload = path.read_bytes()
        newline = payload.find(b"\n", 0, MAX_HEADER_BYTES)
        if newline < 0:
            raise CheckpointVersionError(f"Cabecera de checkpoint ilegible: {path}")
        try:
            header = json.loads(payload[:newline].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise CheckpointVersionError(f"Cabecera de checkpoint corrupta: {path}") from e
        if not isinstance(header, dict) or header.get("magic") != CHECKPOINT_MAGIC:
            raise CheckpointVersionError(f"El archivo no es un checkpoint HCN: {path}")
        if header.get("version") != settings.checkpoint_version:
            raise CheckpointVersionError(
                f"Versión de checkpoint {header.get('version')}, se esperaba {settings.checkpoint_version}"
            )

        try:
            activation = Activation(header["activation"])
            architecture = [
                ([tuple(map(int, s)) for s in view["encoder"]], [tuple(map(int, s)) for s in view["decoder"]])
                for view in header["views"]
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointVersionError(f"Cabecera de checkpoint incompleta: {e}") from e

        if expected_view_dims is not None:
            found = [encoder[0][0] for encoder, _ in architecture]
            if list(expected_view_dims) != found:
                raise CheckpointShapeError(
                    f"El checkpoint tiene vistas de dimensión {found}, los datos {list(expected_view_dims)}"
                )

        body = memoryview(payload)[newline + 1:]
        offset = 0

        def take(shape: Tuple[int, ...]) -> np.ndarray:
            nonlocal offset
            count = int(np.prod(shape))
            size = count * 8
            if offset + size > len(body):
                raise CheckpointTruncatedError(f"Checkpoint truncado: {path}")
            values = np.frombuffer(body, dtype="<f8", count=count, offset=offset)
            offset += size
            return values.astype(np.float64).reshape(shape)

        def build(shapes: List[Tuple[int, int]]) -> List[LinearLayer]:
            return [LinearLayer(take((d_in, d_out)), take((d_out,))) for d_in, d_out in shapes]

        try:
            views = [
                ViewAutoencoder(build(encoder), build(decoder), activation)
                for encoder, decoder in architecture
            ]
            model = HcnModel(views)
        except CheckpointTruncatedError:
            raise
        except ValueError as e:
            raise CheckpointShapeError(f"Arquitectura inconsistente en el checkpoint: {e}") from e
        if offset != len(body):
            raise CheckpointShapeError(f"El checkpoint tiene {len(body) - offset} bytes sobrantes")
        return model, header.get("config", {})


_repository = CheckpointRepository()


def save_checkpoint(model: HcnModel, path: Path | str,
                    config: Optional[Dict[str, Any]] = None) -> Path:
    return _repository.save((model, config or {}), path)


def load_checkpoint(path: Path | str, expected_view_dims: Optional[Sequence[int]] = None) -> HcnModel:
    model, _ = _repository.load(path, expected_view_dims=expected_view_dims)
    return model
