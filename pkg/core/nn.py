"""
Capas lineales diferenciables, activaciones, optimizador Adam y verificador
de gradientes por diferencias finitas
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from core.numerics import DenseMatrix, matmul
from models.entities import Activation
from models.schemas import GradCheckReport
from utils.exceptions import ShapeMismatchError


def relu_forward(x: DenseMatrix) -> DenseMatrix:
    return np.maximum(x, 0.0)


def relu_backward(x: DenseMatrix, upstream: DenseMatrix) -> DenseMatrix:
    """Pasa el gradiente donde x > 0"""
    return np.where(x > 0, upstream, 0.0)


def tanh_forward(x: DenseMatrix) -> DenseMatrix:
    return np.tanh(x)


def tanh_backward(x: DenseMatrix, upstream: DenseMatrix) -> DenseMatrix:
    t = np.tanh(x)
    return upstream * (1.0 - t * t)


ACTIVATIONS = {
    Activation.RELU: (relu_forward, relu_backward),
    Activation.TANH: (tanh_forward, tanh_backward),
}


@dataclass
class LinearLayer:
    """Capa afín x·W + b con buffers de gradiente"""
    weight: DenseMatrix
    bias: np.ndarray
    grad_weight: DenseMatrix = field(init=False)
    grad_bias: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.weight = np.ascontiguousarray(self.weight, dtype=np.float64)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float64).reshape(-1)
        if self.bias.shape[0] != self.weight.shape[1]:
            raise ShapeMismatchError(
                f"bias de tamaño {self.bias.shape[0]} para pesos {self.weight.shape}"
            )
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)

    @classmethod
    def glorot(cls, d_in: int, d_out: int, rng: np.random.Generator) -> "LinearLayer":
        """Inicialización uniforme en ±√(6/(d_in+d_out)), bias en cero"""
        limit = np.sqrt(6.0 / (d_in + d_out))
        return cls(rng.uniform(-limit, limit, size=(d_in, d_out)), np.zeros(d_out))

    @property
    def d_in(self) -> int:
        return int(self.weight.shape[0])

    @property
    def d_out(self) -> int:
        return int(self.weight.shape[1])

    def parameters(self) -> List[np.ndarray]:
        return [self.weight, self.bias]

    def gradients(self) -> List[np.ndarray]:
        return [self.grad_weight, self.grad_bias]

    def zero_grad(self) -> None:
        self.grad_weight.fill(0.0)
        self.grad_bias.fill(0.0)


def linear_forward(layer: LinearLayer, x: DenseMatrix) -> DenseMatrix:
    """x·W + bias difundido sobre las filas"""
    if x.ndim != 2 or x.shape[1] != layer.d_in:
        raise ShapeMismatchError(f"entrada {x.shape} para una capa de entrada {layer.d_in}")
    return matmul(x, layer.weight) + layer.bias


def linear_backward(layer: LinearLayer, x: DenseMatrix, upstream: DenseMatrix) -> DenseMatrix:
    """Acumula grad_weight += xᵀ·upstream, grad_bias += Σ filas; devuelve upstream·Wᵀ"""
    if upstream.ndim != 2 or upstream.shape != (x.shape[0], layer.d_out) or x.shape[1] != layer.d_in:
        raise ShapeMismatchError(
            f"backward con x {x.shape} y upstream {upstream.shape} para pesos {layer.weight.shape}"
        )
    layer.grad_weight += matmul(x.T, upstream)
    layer.grad_bias += upstream.sum(axis=0)
    return matmul(upstream, layer.weight.T)


class AdamOptimizer:
    """Adam con corrección de sesgo; actualiza los parámetros en sitio"""

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps_opt: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps_opt = eps_opt
        self.first_moment: List[np.ndarray] = []
        self.second_moment: List[np.ndarray] = []
        self.step_count = 0

    def step(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        if len(params) != len(grads):
            raise ShapeMismatchError("adam: número distinto de parámetros y gradientes")
        if not self.first_moment:
            self.first_moment = [np.zeros_like(p) for p in params]
            self.second_moment = [np.zeros_like(p) for p in params]

        self.step_count += 1
        bc1 = 1.0 - self.beta1 ** self.step_count
        bc2 = 1.0 - self.beta2 ** self.step_count

        for param, grad, m, v in zip(params, grads, self.first_moment, self.second_moment):
            if param.shape != grad.shape or param.shape != m.shape:
                raise ShapeMismatchError(f"adam: forma {grad.shape} para parámetro {param.shape}")
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * (grad * grad)
            m_hat = m / bc1
            v_hat = v / bc2
            param -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps_opt)


def adam_step(state: AdamOptimizer, params: Sequence[np.ndarray],
              grads: Sequence[np.ndarray]) -> Sequence[np.ndarray]:
    """Un paso de Adam; devuelve los mismos arreglos actualizados"""
    state.step(params, grads)
    return params


LossClosure = Callable[[], Tuple[float, List[np.ndarray]]]


def grad_check(closure: LossClosure, params: Sequence[np.ndarray], tolerance: float = 1e-4,
               max_coords: int = 40, rng: Optional[np.random.Generator] = None,
               step: float = 1e-5, atol: float = 1e-7) -> GradCheckReport:
    """Compara el gradiente analítico con diferencias centrales

    `closure()` evalúa la pérdida con los valores actuales de `params` y
    devuelve (pérdida, gradientes alineados con `params`). Los parámetros se
    perturban en sitio y se restauran. Una coordenada falla si su error
    absoluto supera `atol` y su error relativo supera `tolerance`.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    _, analytic = closure()
    analytic = [np.array(g, copy=True) for g in analytic]

    sizes = [p.size for p in params]
    total = int(sum(sizes))
    chosen = rng.choice(total, size=min(max_coords, total), replace=False) if total else []
    offsets = np.cumsum([0] + sizes)

    max_rel = 0.0
    offending: List[str] = []
    for flat in sorted(int(c) for c in chosen):
        index = int(np.searchsorted(offsets, flat, side="right") - 1)
        local = flat - offsets[index]
        target = params[index]
        original = float(target.flat[local])

        target.flat[local] = original + step
        loss_plus, _ = closure()
        target.flat[local] = original - step
        loss_minus, _ = closure()
        target.flat[local] = original

        numeric = (loss_plus - loss_minus) / (2.0 * step)
        exact = float(analytic[index].reshape(-1)[local])
        abs_err = abs(exact - numeric)
        rel_err = abs_err / max(abs(exact), abs(numeric), 1e-8)
        if abs_err > atol:
            max_rel = max(max_rel, rel_err)
            if rel_err > tolerance:
                offending.append(
                    f"param[{index}][{local}]: analítico={exact:.6e} numérico={numeric:.6e}"
                )

    return GradCheckReport(
        passed=not offending,
        max_rel_error=max_rel,
        tolerance=tolerance,
        checked=len(chosen),
        offending=offending,
    )
