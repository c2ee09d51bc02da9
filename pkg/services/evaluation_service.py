"""
Servicio de evaluación: fusión de características, k-means y métricas de
agrupamiento (ACC con asignación óptima, NMI y ARI)
"""
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from config import settings
from core.network import ForwardBundle, HcnModel, encode
from models.entities import MultiviewDataset, NmiAverage
from models.schemas import ClusteringReport, EvaluationSummary, MetricSummary
from patterns.singleton import logger
from utils.exceptions import HcnValidationError, MissingLabelsError, ShapeMismatchError
from utils.rng import RngStream, derive_seed

HCN_MODE = "hcn"
RAW_MODE = "raw"


def fuse_features(features: Union[ForwardBundle, Sequence[np.ndarray]]) -> np.ndarray:
    """Concatenación horizontal [Z^(1), …, Z^(n_v)]"""
    blocks = features.z if isinstance(features, ForwardBundle) else list(features)
    if not blocks:
        raise ShapeMismatchError("fuse_features: no hay vistas")
    if len({block.shape[0] for block in blocks}) != 1:
        raise ShapeMismatchError("fuse_features: las vistas no están alineadas por filas")
    if len(blocks) == 1:
        return blocks[0]
    return np.hstack(blocks)


def kmeans(x: np.ndarray, k: int, restarts: int = 10, seed: int = 0,
           max_iter: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """Lloyd desde k-means++; se conserva la mejor de `restarts` corridas por inercia"""
    n = x.shape[0]
    if k < 1 or k > n:
        raise HcnValidationError(f"k-means: k={k} fuera de [1, {n}]")
    if restarts < 1:
        raise HcnValidationError(f"k-means: restarts debe ser positivo ({restarts})")
    if not np.all(np.isfinite(x)):
        raise HcnValidationError("k-means: características no finitas")
    model = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=restarts,
        max_iter=max_iter or settings.kmeans_max_iter,
        tol=0.0,
        algorithm="lloyd",
        random_state=derive_seed(seed, RngStream.KMEANS),
    )
    labels = model.fit_predict(x)
    return labels.astype(np.int64), float(model.inertia_)


def hungarian(cost: np.ndarray) -> np.ndarray:
    """Permutación σ que minimiza Σ cost[i][σ(i)]"""
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ShapeMismatchError(f"hungarian: la matriz de costos debe ser cuadrada, forma {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise HcnValidationError("hungarian: costos no finitos")
    rows, cols = linear_sum_assignment(cost)
    permutation = np.empty(cost.shape[0], dtype=np.int64)
    permutation[rows] = cols
    return permutation


def _check_labels(pred: np.ndarray, truth: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred).reshape(-1)
    truth = np.asarray(truth).reshape(-1)
    if pred.shape != truth.shape:
        raise ShapeMismatchError(f"Longitudes distintas: pred={pred.size}, truth={truth.size}")
    if pred.size == 0:
        raise HcnValidationError("No hay etiquetas para evaluar")
    return pred, truth


def contingency(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Tabla de contingencia: filas = grupos predichos, columnas = clases reales"""
    pred, truth = _check_labels(pred, truth)
    return contingency_matrix(truth, pred).T.astype(np.int64)


def accuracy(pred: np.ndarray, truth: np.ndarray) -> float:
    """Fracción acertada bajo la mejor asignación grupo → clase"""
    table = contingency(pred, truth)
    size = max(table.shape)
    square = np.zeros((size, size), dtype=np.int64)
    square[: table.shape[0], : table.shape[1]] = table
    permutation = hungarian(-square)
    matched = square[np.arange(size), permutation].sum()
    return float(matched) / float(table.sum())


def nmi(pred: np.ndarray, truth: np.ndarray,
        average: NmiAverage = NmiAverage.GEOMETRIC) -> float:
    """I(pred; truth) normalizada por la media geométrica (o aritmética) de las entropías"""
    pred, truth = _check_labels(pred, truth)
    return float(normalized_mutual_info_score(truth, pred, average_method=average.value))


def ari(pred: np.ndarray, truth: np.ndarray) -> float:
    pred, truth = _check_labels(pred, truth)
    return float(adjusted_rand_score(truth, pred))


def summarize(values: Sequence[float]) -> MetricSummary:
    array = np.asarray(values, dtype=np.float64)
    return MetricSummary(
        mean=float(array.mean()),
        std=float(array.std()) if array.size > 1 else 0.0,
        best=float(array.max()),
    )


class EvaluationService:
    """Servicio de evaluación de agrupamientos"""

    def __init__(self, restarts: Optional[int] = None,
                 nmi_average: NmiAverage = NmiAverage.GEOMETRIC):
        self.restarts = restarts or settings.kmeans_restarts
        self.nmi_average = nmi_average

    def embed(self, model: HcnModel, dataset: MultiviewDataset) -> np.ndarray:
        """Codifica todas las vistas sin aumento y fusiona"""
        if dataset.view_dims != model.view_dims:
            raise ShapeMismatchError(
                f"El modelo espera vistas {model.view_dims}, el dataset tiene {dataset.view_dims}"
            )
        return fuse_features([encode(view, x) for view, x in zip(model.views, dataset.views)])

    def report(self, features: np.ndarray, truth: np.ndarray, k: int, seed: int,
               dataset_name: str, mode: str) -> ClusteringReport:
        predicted, inertia = kmeans(features, k, self.restarts, seed)
        table = contingency(predicted, truth)
        return ClusteringReport(
            dataset=dataset_name,
            mode=mode,
            seed=seed,
            acc=accuracy(predicted, truth),
            nmi=min(max(nmi(predicted, truth, self.nmi_average), 0.0), 1.0),
            ari=ari(predicted, truth),
            inertia=inertia,
            predicted=predicted.tolist(),
            contingency=table.tolist(),
        )

    def evaluate(self, model: Optional[HcnModel], dataset: MultiviewDataset,
                 k_true: Optional[int] = None, seed: int = 0,
                 mode: str = HCN_MODE) -> ClusteringReport:
        """Agrupa las características fusionadas (o crudas con model=None) y mide contra las etiquetas"""
        try:
            if dataset.labels is None:
                raise MissingLabelsError(f"El dataset '{dataset.name}' no tiene etiquetas")
            k = k_true or dataset.k_true
            features = fuse_features(dataset.views) if model is None else self.embed(model, dataset)
            result = self.report(features, dataset.labels, k, seed, dataset.name, mode)
            logger.log("info", "Evaluación completada", {
                "mode": mode, "seed": seed, "acc": f"{result.acc:.4f}",
                "nmi": f"{result.nmi:.4f}", "ari": f"{result.ari:.4f}",
            })
            return result
        except Exception as e:
            logger.log("error", f"Error en la evaluación: {e}")
            raise

    def evaluate_seeds(self, model: Optional[HcnModel], dataset: MultiviewDataset,
                       seeds: Sequence[int], k_true: Optional[int] = None,
                       mode: str = HCN_MODE) -> Tuple[List[ClusteringReport], EvaluationSummary]:
        """Evaluación multi-semilla con media, desviación y mejor valor"""
        if not seeds:
            raise HcnValidationError("Se requiere al menos una semilla")
        if dataset.labels is None:
            raise MissingLabelsError(f"El dataset '{dataset.name}' no tiene etiquetas")
        features = fuse_features(dataset.views) if model is None else self.embed(model, dataset)
        reports = []
        for seed in seeds:
            reports.append(self.report(
                features, dataset.labels, k_true or dataset.k_true, seed, dataset.name, mode,
            ))
        summary = EvaluationSummary(
            dataset=dataset.name,
            mode=mode,
            runs=len(reports),
            acc=summarize([r.acc for r in reports]),
            nmi=summarize([r.nmi for r in reports]),
            ari=summarize([r.ari for r in reports]),
        )
        logger.log("info", "Resumen multi-semilla", {
            "mode": mode, "runs": summary.runs,
            "acc_mean": f"{summary.acc.mean:.4f}", "acc_std": f"{summary.acc.std:.4f}",
        })
        return reports, summary


def evaluate(model: Optional[HcnModel], dataset: MultiviewDataset, k_true: Optional[int] = None,
             restarts: int = 10, seed: int = 0) -> ClusteringReport:
    mode = RAW_MODE if model is None else HCN_MODE
    return EvaluationService(restarts).evaluate(model, dataset, k_true, seed, mode)
