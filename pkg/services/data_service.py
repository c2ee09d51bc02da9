"""
Servicio de datos: ingesta por manifiesto, normalización min-max y
generador sintético multivista
"""
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.preprocessing import MinMaxScaler

from models.entities import DatasetManifest, MatrixFormat, MultiviewDataset
from patterns.singleton import logger
from repositories.dataset_repository import DatasetRepository
from repositories.matrix_repository import contiguous_labels
from utils.exceptions import HcnValidationError
from utils.rng import RngStream, derive_rng

CENTER_SCALE = 3.0
BIAS_SCALE = 0.1
# Amplitud del factor de molestia de cada vista, relativa a sigma
NUISANCE_GAIN = 20.0


def normalize_view(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Min-max por característica a [0, 1]; las columnas constantes quedan en 0"""
    scaler = MinMaxScaler(feature_range=(0.0, 1.0), clip=True)
    normalized = scaler.fit_transform(np.asarray(x, dtype=np.float64))
    return normalized, scaler.data_min_.copy(), scaler.data_max_.copy()


def normalize_views(name: str, views: Sequence[np.ndarray],
                    labels: Optional[np.ndarray] = None) -> MultiviewDataset:
    normalized, mins, maxs = [], [], []
    for view in views:
        x, lo, hi = normalize_view(view)
        normalized.append(x)
        mins.append(lo)
        maxs.append(hi)
    return MultiviewDataset(
        name=name,
        views=normalized,
        labels=None if labels is None else contiguous_labels(labels),
        feature_min=mins,
        feature_max=maxs,
    )


def make_synthetic(n: int, k_true: int, view_dims: Sequence[int], noise_sigma: float,
                   seed: int, name: str = "synthetic") -> MultiviewDataset:
    """Dataset multivista con k_true grupos gaussianos en un espacio latente común

    Cada vista es tanh(latente·A_v + b_v) + s_v·c_v más ruido gaussiano, con
    A_v y b_v aleatorios por vista. El factor de molestia s_v ∈ {−1, +1} se
    sortea por muestra y por vista, independiente del grupo y de las demás
    vistas, con amplitud NUISANCE_GAIN·sigma: k-means sobre las vistas crudas
    tiende a partir por ese factor y no por el grupo. Los grupos quedan
    balanceados (tamaños que difieren a lo sumo en uno) en orden aleatorio.
    """
    if k_true < 2 or n < k_true:
        raise HcnValidationError(f"Se requiere n ≥ k_true ≥ 2 (n={n}, k_true={k_true})")
    if len(view_dims) < 2 or any(d < 1 for d in view_dims):
        raise HcnValidationError(f"Se requieren al menos dos vistas de dimensión positiva: {list(view_dims)}")
    if noise_sigma < 0 or not np.isfinite(noise_sigma):
        raise HcnValidationError(f"sigma inválido: {noise_sigma}")

    rng = derive_rng(seed, RngStream.SYNTH)
    latent_dim = k_true
    centers = CENTER_SCALE * rng.standard_normal((k_true, latent_dim))
    ids = rng.permutation(np.arange(n) % k_true)
    latent = centers[ids] + noise_sigma * rng.standard_normal((n, latent_dim))

    views: List[np.ndarray] = []
    for d_v in view_dims:
        mapping = rng.standard_normal((latent_dim, d_v)) / np.sqrt(latent_dim)
        bias = BIAS_SCALE * rng.standard_normal(d_v)
        nuisance = NUISANCE_GAIN * noise_sigma * rng.standard_normal(d_v)
        signs = rng.choice([-1.0, 1.0], size=(n, 1))
        noise = noise_sigma * rng.standard_normal((n, d_v))
        views.append(np.tanh(latent @ mapping + bias) + signs * nuisance + noise)

    dataset = normalize_views(name, views, ids)
    logger.log("info", "Dataset sintético generado", {
        "n": n, "k_true": k_true, "dims": ",".join(map(str, view_dims)), "sigma": noise_sigma,
    })
    return dataset


def split_batches(dataset: Union[MultiviewDataset, int], b: int, seed: int,
                  epoch: int) -> List[np.ndarray]:
    """Barajado determinista por (seed, epoch) en trozos de tamaño b; el último puede ser menor"""
    if b < 1:
        raise HcnValidationError(f"El tamaño de lote debe ser positivo: {b}")
    n = dataset if isinstance(dataset, int) else dataset.n_samples
    order = derive_rng(seed, RngStream.SHUFFLE, epoch).permutation(n)
    return [order[start:start + b] for start in range(0, n, b)]


class DataService:
    """Servicio de lectura y escritura de datasets"""

    def __init__(self, repository: Optional[DatasetRepository] = None):
        self.repository = repository or DatasetRepository()

    def load_dataset(self, manifest: Union[DatasetManifest, Path, str],
                     base_dir: Optional[Path] = None) -> MultiviewDataset:
        """Carga y normaliza todas las vistas de un manifiesto"""
        try:
            if not isinstance(manifest, DatasetManifest):
                manifest, base_dir = self.repository.load_manifest(manifest)
            views, labels = self.repository.read_raw(manifest, base_dir)
            if len({view.shape[0] for view in views}) != 1:
                raise HcnValidationError("Las vistas del manifiesto no tienen el mismo número de filas")
            dataset = normalize_views(manifest.name, views, labels)
            logger.log("info", "Dataset cargado", {
                "name": dataset.name,
                "n": dataset.n_samples,
                "dims": ",".join(map(str, dataset.view_dims)),
                "labels": labels is not None,
            })
            return dataset
        except Exception as e:
            logger.log("error", f"Error al cargar dataset: {e}")
            raise

    def save_dataset(self, dataset: MultiviewDataset, out_dir: Path | str,
                     format: MatrixFormat = MatrixFormat.CSV) -> Path:
        """Escribe el dataset y su manifiesto"""
        try:
            path = self.repository.save(dataset, out_dir, format)
            logger.log("info", "Dataset guardado", {"manifest": str(path), "views": dataset.n_views})
            return path
        except Exception as e:
            logger.log("error", f"Error al guardar dataset: {e}")
            raise


def load_dataset(manifest: Union[DatasetManifest, Path, str],
                 base_dir: Optional[Path] = None) -> MultiviewDataset:
    return DataService().load_dataset(manifest, base_dir)
