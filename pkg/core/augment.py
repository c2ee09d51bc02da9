"""
Aumento por eliminación de características (drop-feature)

Las columnas descartadas se ponen a cero en lugar de eliminarse, así el
encoder conserva su ancho de entrada d_v. No se reescalan las columnas que
se conservan.
"""
from dataclasses import dataclass

import numpy as np

from core.numerics import DenseMatrix
from utils.exceptions import HcnValidationError, ShapeMismatchError


@dataclass(frozen=True)
class DropMask:
    """Máscara binaria m con P(m_j = 1) = 1 − rho"""
    m: np.ndarray
    rho: float

    @property
    def size(self) -> int:
        return int(self.m.shape[0])

    @property
    def kept_fraction(self) -> float:
        return float(self.m.mean()) if self.size else 1.0

    @classmethod
    def keep_all(cls, d: int) -> "DropMask":
        return cls(np.ones(d, dtype=np.int8), 0.0)


def sample_mask(d: int, rho: float, rng: np.random.Generator) -> DropMask:
    """Muestrea m_j ~ Bern(1 − rho) de forma independiente"""
    if not 0.0 <= rho <= 1.0:
        raise HcnValidationError(f"La tasa de eliminación debe estar en [0, 1], se recibió {rho}")
    if d < 0:
        raise HcnValidationError(f"Dimensión inválida: {d}")
    m = rng.binomial(1, 1.0 - rho, size=d).astype(np.int8)
    return DropMask(m, float(rho))


def apply_mask(x: DenseMatrix, mask: DropMask) -> DenseMatrix:
    """Pone a cero las columnas con m_j = 0; la forma se conserva"""
    if x.ndim != 2 or x.shape[1] != mask.size:
        raise ShapeMismatchError(f"Máscara de longitud {mask.size} para datos {x.shape}")
    return np.where(mask.m.astype(bool), x, 0.0)
