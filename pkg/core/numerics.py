"""
Kernels de matrices densas y primitivas escalares numéricamente estables

Las matrices son `numpy.ndarray` de float64 en orden fila (las muestras son
filas, convención n×d).
"""
from typing import Union

import numpy as np
import numpy.typing as npt
from scipy.special import softmax

from utils.exceptions import HcnValidationError, NonFiniteError, ShapeMismatchError

DenseMatrix = npt.NDArray[np.float64]

DEFAULT_EPS = 1e-12


def ensure_finite(x: np.ndarray, what: str = "matriz") -> np.ndarray:
    """Verifica que no haya NaN ni Inf"""
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"Valores no finitos en {what}")
    return x


def _require_same_shape(a: np.ndarray, b: np.ndarray, operation: str) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{operation}: formas distintas {a.shape} y {b.shape}")


def matmul(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    """Producto matricial con verificación de dimensiones"""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"matmul: {a.shape} × {b.shape} no es compatible")
    return a @ b


def trace_product(a: DenseMatrix, b: DenseMatrix) -> float:
    """tr(aᵀb) = Σ_ij a_ij·b_ij"""
    _require_same_shape(a, b, "trace_product")
    return float(np.einsum("ij,ij->", a, b))


def column_inner_products(a: DenseMatrix, b: DenseMatrix) -> np.ndarray:
    """Producto interno columna a columna (índice de consenso por clase)"""
    _require_same_shape(a, b, "column_inner_products")
    return np.einsum("ij,ij->j", a, b)


def row_inner_products(a: DenseMatrix, b: DenseMatrix) -> np.ndarray:
    """Producto interno fila a fila (índice de consenso por instancia)"""
    _require_same_shape(a, b, "row_inner_products")
    return np.einsum("ij,ij->i", a, b)


def softmax_rows(z: DenseMatrix) -> DenseMatrix:
    """Softmax por filas con resta del máximo de la fila"""
    return softmax(z, axis=1)


def softmax_rows_backward(y: DenseMatrix, upstream: DenseMatrix) -> DenseMatrix:
    """Gradiente respecto a los logits dado y = softmax(z)"""
    _require_same_shape(y, upstream, "softmax_rows_backward")
    return y * (upstream - np.sum(upstream * y, axis=1, keepdims=True))


def safe_log(p: Union[float, np.ndarray], eps: float = DEFAULT_EPS) -> Union[float, np.ndarray]:
    """log(max(p, eps)); p negativo es un error"""
    values = np.asarray(p, dtype=np.float64)
    if np.any(values < 0):
        raise HcnValidationError("safe_log: probabilidad negativa")
    result = np.log(np.maximum(values, eps))
    if np.ndim(p) == 0:
        return float(result)
    return result


def safe_log_grad(p: np.ndarray, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Derivada de safe_log: 1/p donde p > eps y 0 en la zona recortada"""
    return np.where(p > eps, 1.0 / np.maximum(p, eps), 0.0)


def frobenius_sq_diff(a: DenseMatrix, b: DenseMatrix) -> float:
    """‖a − b‖²_F"""
    _require_same_shape(a, b, "frobenius_sq_diff")
    diff = a - b
    return float(np.einsum("ij,ij->", diff, diff))


def row_l2_normalize(z: DenseMatrix) -> DenseMatrix:
    """Normaliza cada fila no nula a norma ℓ2 unitaria"""
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    return np.divide(z, norms, out=z.copy(), where=norms > 0)


def row_l2_normalize_backward(z: DenseMatrix, upstream: DenseMatrix) -> DenseMatrix:
    """Gradiente de row_l2_normalize; las filas nulas pasan el gradiente intacto"""
    _require_same_shape(z, upstream, "row_l2_normalize_backward")
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    safe_norms = np.where(norms > 0, norms, 1.0)
    unit = z / safe_norms
    projected = (upstream - unit * np.sum(unit * upstream, axis=1, keepdims=True)) / safe_norms
    return np.where(norms > 0, projected, upstream)
