"""
Modelos de entidades del dominio: configuración, manifiestos y datasets
"""
import math
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import Field, field_validator, model_validator

from config import settings
from models.base import ArrayEntity, BaseEntity


class CodingMode(str, Enum):
    """Variante de la pérdida de consenso de codificación"""
    WEAK_TO_STRONG = "weak_to_strong"
    CROSS_VIEW = "cross_view"


class Activation(str, Enum):
    """Activación de las capas ocultas"""
    RELU = "relu"
    TANH = "tanh"


class LossTerm(str, Enum):
    """Términos de la pérdida total"""
    REC = "rec"
    CLS = "cls"
    CODE = "code"
    GLB = "glb"


class LossReduction(str, Enum):
    """Reducción sobre el mini-batch"""
    SUM = "sum"
    MEAN = "mean"


class MatrixFormat(str, Enum):
    """Formatos de archivo de matriz"""
    CSV = "csv"
    BINARY = "binary"


class NmiAverage(str, Enum):
    """Normalización de NMI"""
    GEOMETRIC = "geometric"
    ARITHMETIC = "arithmetic"


class TieRule(str, Enum):
    """Desempate del argmax de pseudoetiquetas"""
    LOWEST_INDEX = "lowest_index"
    HIGHEST_INDEX = "highest_index"


class AblationVariant(str, Enum):
    """Variantes del estudio de ablación"""
    FULL = "full"
    NO_REC = "no-rec"
    NO_CLS = "no-cls"
    NO_GLB = "no-glb"
    NO_CODE = "no-code"
    NO_DA = "no-da"


class ConsensusWeights(BaseEntity):
    """Pesos α, β, γ de la pérdida de clasificación y λ1, λ2 de la total"""
    alpha: float = Field(3.0, ge=0)
    beta: float = Field(3.0, ge=0)
    gamma: float = Field(8.0, ge=0)
    lambda1: float = Field(0.1, ge=0)
    lambda2: float = Field(0.1, ge=0)

    @field_validator("alpha", "beta", "gamma", "lambda1", "lambda2")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("los pesos deben ser finitos")
        return value


class TrainingConfig(BaseEntity):
    """Configuración de una corrida de entrenamiento"""
    epochs: int = Field(200, ge=1)
    batch_size: int = Field(256, ge=2)
    lr: float = Field(1e-3, ge=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    eps_opt: float = Field(1e-8, gt=0)
    weights: ConsensusWeights = Field(default_factory=ConsensusWeights)
    rho: float = Field(0.1, ge=0, le=1)
    d_out: int = Field(64, ge=2)
    hidden_widths: List[int] = Field(default_factory=lambda: [1024, 1024, 1024])
    activation: Activation = Activation.RELU
    seed: int = Field(0, ge=0)
    normalize_global: bool = True
    coding_mode: CodingMode = CodingMode.WEAK_TO_STRONG
    use_augmentation: bool = True
    disabled_terms: List[LossTerm] = Field(default_factory=list)
    loss_reduction: LossReduction = LossReduction.SUM
    prob_eps: float = Field(default_factory=lambda: settings.prob_eps, gt=0, lt=1e-3)
    eval_every: int = Field(0, ge=0)
    kmeans_restarts: int = Field(10, ge=1)

    @field_validator("disabled_terms")
    @classmethod
    def _unique_terms(cls, terms: List[LossTerm]) -> List[LossTerm]:
        order = list(LossTerm)
        return sorted(set(terms), key=order.index)

    @field_validator("hidden_widths")
    @classmethod
    def _positive_widths(cls, widths: List[int]) -> List[int]:
        if any(width < 1 for width in widths):
            raise ValueError("los anchos ocultos deben ser positivos")
        return widths


class ViewSource(BaseEntity):
    """Archivo de una vista dentro del manifiesto"""
    path: str
    format: MatrixFormat = MatrixFormat.CSV
    dims: Optional[int] = Field(None, ge=1)


class LabelSource(BaseEntity):
    """Archivo de etiquetas"""
    path: str


class DatasetManifest(BaseEntity):
    """Manifiesto de un dataset multivista"""
    name: str = Field(..., min_length=1)
    views: List[ViewSource] = Field(..., min_length=1)
    labels: Optional[LabelSource] = None
    expected_rows: Optional[int] = Field(None, ge=1)


class MultiviewDataset(ArrayEntity):
    """Dataset multivista alineado por filas"""
    name: str
    views: List[np.ndarray]
    labels: Optional[np.ndarray] = None
    feature_min: List[np.ndarray] = Field(default_factory=list)
    feature_max: List[np.ndarray] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_alignment(self) -> "MultiviewDataset":
        if not self.views:
            raise ValueError("el dataset necesita al menos una vista")
        rows = {view.shape[0] for view in self.views}
        if any(view.ndim != 2 for view in self.views) or len(rows) != 1:
            raise ValueError("todas las vistas deben ser matrices con el mismo número de filas")
        if self.labels is not None:
            if self.labels.shape != (self.n_samples,):
                raise ValueError("las etiquetas deben tener una entrada por muestra")
            if self.labels.size and self.labels.min() < 0:
                raise ValueError("las etiquetas deben ser no negativas")
        return self

    @property
    def n_samples(self) -> int:
        return int(self.views[0].shape[0])

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def view_dims(self) -> List[int]:
        return [int(view.shape[1]) for view in self.views]

    @property
    def k_true(self) -> Optional[int]:
        if self.labels is None:
            return None
        return int(np.unique(self.labels).size)

    def take(self, indices: np.ndarray) -> "MultiviewDataset":
        """Subconjunto de filas; todas las vistas y las etiquetas se permutan igual"""
        return MultiviewDataset(
            name=self.name,
            views=[view[indices] for view in self.views],
            labels=None if self.labels is None else self.labels[indices],
            feature_min=list(self.feature_min),
            feature_max=list(self.feature_max),
        )


class DatasetCatalogEntry(BaseEntity):
    """Datos de referencia de un dataset de benchmark"""
    name: str
    n_samples: int = Field(..., ge=1)
    n_views: int = Field(..., ge=2)
    k: int = Field(..., ge=2)
    view_dims: List[int]
