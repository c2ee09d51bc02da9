"""
Repositorio de manifiestos y datasets multivista
"""
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from models.entities import DatasetManifest, LabelSource, MatrixFormat, MultiviewDataset, ViewSource
from repositories.base import BaseRepository
from repositories.matrix_repository import LabelRepository, MatrixRepository
from utils.exceptions import DimensionMismatchError, HcnValidationError


class ManifestRepository(BaseRepository[DatasetManifest]):
    """Manifiestos en JSON o TOML"""

    def __init__(self):
        super().__init__("manifiesto")

    def _read(self, path: Path, **options: Any) -> DatasetManifest:
        try:
            if path.suffix.lower() == ".toml":
                with path.open("rb") as handle:
                    raw = tomllib.load(handle)
            else:
                raw = json.loads(path.read_text(encoding="utf-8"))
        except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
            raise HcnValidationError(f"Manifiesto ilegible {path}: {e}") from e
        try:
            return DatasetManifest(**raw)
        except ValidationError as e:
            raise HcnValidationError(f"Manifiesto inválido {path}: {e}") from e

    def _write(self, entity: DatasetManifest, path: Path, **options: Any) -> None:
        path.write_text(entity.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8")


class DatasetRepository:
    """Lee y escribe los archivos que describe un manifiesto"""

    def __init__(self):
        self.manifests = ManifestRepository()
        self.matrices = MatrixRepository()
        self.labels = LabelRepository()

    def load_manifest(self, path: Path | str) -> Tuple[DatasetManifest, Path]:
        """Manifiesto y directorio base para resolver rutas relativas"""
        manifest_path = Path(path)
        return self.manifests.load(manifest_path), manifest_path.parent

    def read_raw(self, manifest: DatasetManifest,
                 base_dir: Optional[Path] = None) -> Tuple[List[np.ndarray], Optional[np.ndarray]]:
        """Matrices y etiquetas tal como están en disco, con dimensiones verificadas"""
        base = base_dir or Path(".")
        views: List[np.ndarray] = []
        for index, source in enumerate(manifest.views):
            name = f"view_{index}"
            matrix = self.matrices.load(base / source.path, format=source.format, view=name)
            if source.dims is not None and matrix.shape[1] != source.dims:
                raise DimensionMismatchError(
                    f"Vista '{name}': {matrix.shape[1]} columnas, el manifiesto declara {source.dims}"
                )
            if manifest.expected_rows is not None and matrix.shape[0] != manifest.expected_rows:
                raise DimensionMismatchError(
                    f"Vista '{name}': {matrix.shape[0]} filas, se esperaban {manifest.expected_rows}"
                )
            views.append(matrix)

        labels = None
        if manifest.labels is not None:
            labels = self.labels.load(base / manifest.labels.path)
            if views and labels.shape[0] != views[0].shape[0]:
                raise DimensionMismatchError(
                    f"Etiquetas: {labels.shape[0]} filas, las vistas tienen {views[0].shape[0]}"
                )
        return views, labels

    def save(self, dataset: MultiviewDataset, out_dir: Path | str,
             format: MatrixFormat = MatrixFormat.CSV) -> Path:
        """Escribe view_i.*, labels.csv y manifest.json; devuelve la ruta del manifiesto"""
        directory = Path(out_dir)
        suffix = "csv" if format == MatrixFormat.CSV else "bin"
        sources = []
        for index, view in enumerate(dataset.views):
            file_name = f"view_{index}.{suffix}"
            self.matrices.save(view, directory / file_name, format=format)
            sources.append(ViewSource(path=file_name, format=format, dims=int(view.shape[1])))

        label_source = None
        if dataset.labels is not None:
            self.labels.save(dataset.labels, directory / "labels.csv")
            label_source = LabelSource(path="labels.csv")

        manifest = DatasetManifest(
            name=dataset.name,
            views=sources,
            labels=label_source,
            expected_rows=dataset.n_samples,
        )
        return self.manifests.save(manifest, directory / "manifest.json")
