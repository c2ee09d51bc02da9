"""
Pérdidas de consenso de HCN

Cada pérdida devuelve su valor y el gradiente respecto a sus tensores de
entrada (Y, Y_aug, Z, Z_aug o X̂). Los pares de vistas se recorren ordenados
(u > v); en la distribución conjunta las filas indexan la clase de la vista u
y las columnas la de la vista v.
"""
from dataclasses import dataclass
from typing import Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core.network import ForwardBundle, ViewGradients
from core.numerics import (
    DEFAULT_EPS,
    DenseMatrix,
    frobenius_sq_diff,
    matmul,
    row_l2_normalize,
    row_l2_normalize_backward,
    safe_log,
    safe_log_grad,
    trace_product,
)
from models.entities import CodingMode, ConsensusWeights, LossReduction, LossTerm, TieRule
from models.schemas import LossBreakdown
from utils.exceptions import (
    HcnValidationError,
    InvalidDistributionError,
    NonFiniteLossError,
    ShapeMismatchError,
)

ROW_SUM_TOLERANCE = 1e-6
JOINT_SUM_TOLERANCE = 1e-10


class TermResult(NamedTuple):
    """Valor de una pérdida, gradientes por vista y subtérminos para el log"""
    value: float
    grads: List[DenseMatrix]
    aug_grads: Optional[List[DenseMatrix]] = None
    parts: Dict[str, float] = {}


def ordered_pairs(n_views: int) -> List[Tuple[int, int]]:
    """Pares (u, v) con u > v"""
    return [(u, v) for u in range(n_views) for v in range(u)]


@dataclass(frozen=True)
class JointClassDistribution:
    """Probabilidad conjunta de clases entre dos vistas y sus marginales"""
    joint: DenseMatrix
    marginal_u: np.ndarray
    marginal_v: np.ndarray
    raw_total: float = 1.0

    def __post_init__(self) -> None:
        if self.joint.ndim != 2 or self.joint.shape[0] != self.joint.shape[1]:
            raise ShapeMismatchError(f"La distribución conjunta debe ser K×K, forma {self.joint.shape}")
        if np.any(self.joint < 0):
            raise InvalidDistributionError("La distribución conjunta tiene entradas negativas")
        if abs(float(self.joint.sum()) - 1.0) > JOINT_SUM_TOLERANCE:
            raise InvalidDistributionError(
                f"La distribución conjunta suma {float(self.joint.sum())}, se esperaba 1"
            )

    @classmethod
    def from_joint(cls, joint: np.ndarray) -> "JointClassDistribution":
        joint = np.asarray(joint, dtype=np.float64)
        return cls(joint, joint.sum(axis=1), joint.sum(axis=0))

    @property
    def k(self) -> int:
        return int(self.joint.shape[0])

    def transpose(self) -> "JointClassDistribution":
        return JointClassDistribution(self.joint.T, self.marginal_v, self.marginal_u, self.raw_total)


def _check_row_stochastic(y: DenseMatrix, name: str) -> None:
    if y.ndim != 2:
        raise ShapeMismatchError(f"{name} debe ser una matriz, forma {y.shape}")
    if np.any(y < 0) or np.any(np.abs(y.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE):
        raise InvalidDistributionError(f"Las filas de {name} no son distribuciones de probabilidad")


def joint_class_prob(y_u: DenseMatrix, y_v: DenseMatrix) -> JointClassDistribution:
    """P = normalizar(y_uᵀ·y_v / n)"""
    if y_u.shape != y_v.shape or y_u.ndim != 2:
        raise ShapeMismatchError(f"joint_class_prob: formas {y_u.shape} y {y_v.shape}")
    if y_u.shape[0] == 0:
        raise ShapeMismatchError("joint_class_prob: lote vacío")
    _check_row_stochastic(y_u, "y_u")
    _check_row_stochastic(y_v, "y_v")

    raw = matmul(y_u.T, y_v) / y_u.shape[0]
    total = float(raw.sum())
    joint = raw / total
    return JointClassDistribution(joint, joint.sum(axis=1), joint.sum(axis=0), total)


def _entropy_value(p: np.ndarray, eps: float) -> float:
    return float(-np.sum(p * safe_log(p, eps)))


def _entropy_grad(p: np.ndarray, eps: float) -> np.ndarray:
    """Derivada de −p·log(max(p, eps)) respecto a p"""
    return np.where(p > eps, -(np.log(np.maximum(p, eps)) + 1.0), -np.log(eps))


def entropy(p: np.ndarray, eps: float = DEFAULT_EPS) -> float:
    """−Σ p·log p"""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or np.any(p < 0) or abs(float(p.sum()) - 1.0) > ROW_SUM_TOLERANCE:
        raise InvalidDistributionError("entropy: se esperaba un vector de probabilidad")
    return _entropy_value(p, eps)


def conditional_entropy(d: JointClassDistribution, given: Literal["u", "v"] = "v",
                        eps: float = DEFAULT_EPS) -> float:
    """H(c_u|c_v) con given="v"; H(c_v|c_u) con given="u"

    Se evalúa como H(conjunta) − H(marginal condicionante), que coincide con
    −Σ p·log(p/marginal) fuera de la zona recortada.
    """
    if given == "v":
        conditioning = d.marginal_v
    elif given == "u":
        conditioning = d.marginal_u
    else:
        raise HcnValidationError(f"Eje condicionante inválido: {given}")
    value = _entropy_value(d.joint, eps) - _entropy_value(conditioning, eps)
    return max(value, 0.0)


def entropy_identity_check(d: JointClassDistribution, eps: float = DEFAULT_EPS) -> float:
    """|H(c_u|c_v) − H(c_u) + H(c_v) − H(c_v|c_u)|, nulo para toda conjunta válida"""
    h_u_given_v = conditional_entropy(d, "v", eps)
    h_v_given_u = conditional_entropy(d, "u", eps)
    h_u = _entropy_value(d.marginal_u, eps)
    h_v = _entropy_value(d.marginal_v, eps)
    return abs(h_u_given_v - h_u + h_v - h_v_given_u)


def _pair_classifying(y_u: DenseMatrix, y_v: DenseMatrix, w: ConsensusWeights,
                      eps: float) -> Tuple[float, DenseMatrix, DenseMatrix]:
    d = joint_class_prob(y_u, y_v)
    p, m_u, m_v = d.joint, d.marginal_u, d.marginal_v

    h_joint = _entropy_value(p, eps)
    h_u = _entropy_value(m_u, eps)
    h_v = _entropy_value(m_v, eps)
    value = w.alpha * (h_joint - h_v) - w.beta * h_u - w.gamma * h_v

    g_m_u = _entropy_grad(m_u, eps)[:, None]
    g_m_v = _entropy_grad(m_v, eps)[None, :]
    g_p = w.alpha * (_entropy_grad(p, eps) - g_m_v) - w.beta * g_m_u - w.gamma * g_m_v

    # P = R / ΣR
    g_raw = (g_p - np.sum(g_p * p)) / d.raw_total
    n = y_u.shape[0]
    return value, matmul(y_v, g_raw.T) / n, matmul(y_u, g_raw) / n


def classifying_loss(y_aug: Sequence[DenseMatrix], w: ConsensusWeights,
                     eps: float = DEFAULT_EPS) -> TermResult:
    """Σ_{u>v} α·H(c_u|c_v) − β·H(c_u) − γ·H(c_v) sobre las vistas aumentadas"""
    if len(y_aug) < 2:
        raise HcnValidationError("classifying_loss requiere al menos dos vistas")
    grads = [np.zeros_like(y) for y in y_aug]
    parts: Dict[str, float] = {}
    total = 0.0
    for u, v in ordered_pairs(len(y_aug)):
        value, g_u, g_v = _pair_classifying(y_aug[u], y_aug[v], w, eps)
        grads[u] += g_u
        grads[v] += g_v
        parts[f"cls[{u},{v}]"] = value
        total += value
    return TermResult(total, grads, None, parts)


def pseudolabels(y: DenseMatrix, tie_rule: TieRule = TieRule.LOWEST_INDEX) -> DenseMatrix:
    """One-hot del argmax de cada fila; constante para el gradiente"""
    if y.ndim != 2:
        raise ShapeMismatchError(f"pseudolabels: forma {y.shape}")
    k = y.shape[1]
    if tie_rule == TieRule.HIGHEST_INDEX:
        winners = k - 1 - np.argmax(y[:, ::-1], axis=1)
    else:
        winners = np.argmax(y, axis=1)
    return np.eye(k)[winners]


def _check_one_hot(t: DenseMatrix) -> None:
    if np.any((t != 0) & (t != 1)) or np.any(t.sum(axis=1) != 1):
        raise InvalidDistributionError("Las pseudoetiquetas deben ser one-hot")


def coding_loss(t_hat: Sequence[DenseMatrix], y_aug: Sequence[DenseMatrix],
                eps: float = DEFAULT_EPS) -> TermResult:
    """−Σ_v Σ_i t̂ᵀ·log y_aug (pseudo-supervisión débil a fuerte)"""
    if len(t_hat) != len(y_aug):
        raise ShapeMismatchError("coding_loss: número distinto de vistas")
    grads: List[DenseMatrix] = []
    parts: Dict[str, float] = {}
    total = 0.0
    for index, (t, y) in enumerate(zip(t_hat, y_aug)):
        if t.shape != y.shape:
            raise ShapeMismatchError(f"coding_loss: formas {t.shape} y {y.shape} en la vista {index}")
        _check_one_hot(t)
        value = float(-np.sum(t * safe_log(y, eps)))
        grads.append(-t * safe_log_grad(y, eps))
        parts[f"code[{index}]"] = value
        total += value
    return TermResult(total, grads, None, parts)


def cross_view_coding_loss(y: Sequence[DenseMatrix], eps: float = DEFAULT_EPS) -> TermResult:
    """Entropía cruzada simétrica entre las predicciones originales de cada par"""
    if len(y) < 2:
        raise HcnValidationError("cross_view_coding_loss requiere al menos dos vistas")
    if len({m.shape for m in y}) != 1:
        raise ShapeMismatchError("cross_view_coding_loss: vistas no alineadas")
    grads = [np.zeros_like(m) for m in y]
    parts: Dict[str, float] = {}
    total = 0.0
    for u, v in ordered_pairs(len(y)):
        log_u = safe_log(y[u], eps)
        log_v = safe_log(y[v], eps)
        value = float(-np.sum(y[v] * log_u) - np.sum(y[u] * log_v))
        grads[u] += -y[v] * safe_log_grad(y[u], eps) - log_v
        grads[v] += -y[u] * safe_log_grad(y[v], eps) - log_u
        parts[f"code[{u},{v}]"] = value
        total += value
    return TermResult(total, grads, None, parts)


def _pair_alignment(z: Sequence[DenseMatrix]) -> Tuple[float, List[DenseMatrix]]:
    value = 0.0
    grads = [np.zeros_like(m) for m in z]
    for u, v in ordered_pairs(len(z)):
        value -= trace_product(z[u], z[v])
        grads[u] -= z[v]
        grads[v] -= z[u]
    return value, grads


def global_loss(z: Sequence[DenseMatrix], z_aug: Optional[Sequence[DenseMatrix]] = None,
                normalize: bool = True) -> TermResult:
    """−Σ_{u>v} tr(Z_uᵀZ_v) + tr(Z_aug,uᵀZ_aug,v), con Z normalizada por filas si se pide"""
    if len(z) < 2:
        raise HcnValidationError("global_loss requiere al menos dos vistas")
    if len({m.shape for m in z}) != 1:
        raise ShapeMismatchError("global_loss: vistas no alineadas")

    def branch(raw: Sequence[DenseMatrix]) -> Tuple[float, List[DenseMatrix]]:
        inputs = [row_l2_normalize(m) for m in raw] if normalize else list(raw)
        value, grads = _pair_alignment(inputs)
        if normalize:
            grads = [row_l2_normalize_backward(m, g) for m, g in zip(raw, grads)]
        return value, grads

    value, grads = branch(z)
    parts = {"glb[orig]": value}
    aug_grads = None
    if z_aug is not None:
        if len(z_aug) != len(z) or any(a.shape != b.shape for a, b in zip(z, z_aug)):
            raise ShapeMismatchError("global_loss: Z_aug no coincide con Z")
        aug_value, aug_grads = branch(z_aug)
        parts["glb[aug]"] = aug_value
        value += aug_value
    return TermResult(value, grads, aug_grads, parts)


def reconstruction_loss(bundle: ForwardBundle, batch: Sequence[DenseMatrix]) -> TermResult:
    """Σ_v ‖X − X̂‖²_F + ‖X_aug − X̂_aug‖²_F"""
    if len(batch) != bundle.n_views:
        raise ShapeMismatchError("reconstruction_loss: el lote no corresponde a la pasada")
    grads: List[DenseMatrix] = []
    aug_grads: List[DenseMatrix] = []
    parts: Dict[str, float] = {}
    total = 0.0
    for index, (out, x) in enumerate(zip(bundle.views, batch)):
        if x.shape != out.x_hat.shape:
            raise ShapeMismatchError(f"reconstruction_loss: vista {index} con forma {x.shape}")
        value = frobenius_sq_diff(x, out.x_hat) + frobenius_sq_diff(out.x_aug, out.x_hat_aug)
        grads.append(2.0 * (out.x_hat - x))
        aug_grads.append(2.0 * (out.x_hat_aug - out.x_aug))
        parts[f"rec[{index}]"] = value
        total += value
    return TermResult(total, grads, aug_grads, parts)


def positive_pair_equivalence(z1_row: np.ndarray, z2_row: np.ndarray) -> Tuple[float, float]:
    """(−log s(z1, z2), ‖z1 − z2‖²) con s = exp(−‖z1 − z2‖²)"""
    z1 = np.asarray(z1_row, dtype=np.float64)
    z2 = np.asarray(z2_row, dtype=np.float64)
    if z1.shape != z2.shape:
        raise ShapeMismatchError(f"positive_pair_equivalence: formas {z1.shape} y {z2.shape}")
    diff = z1 - z2
    distance = float(np.dot(diff, diff))
    # log s = −‖z1 − z2‖², sin pasar por exp
    log_similarity = -distance
    return -log_similarity, distance


def _scaled(result: TermResult, factor: float) -> TermResult:
    if factor == 1.0:
        return result
    return TermResult(
        result.value * factor,
        [g * factor for g in result.grads],
        None if result.aug_grads is None else [g * factor for g in result.aug_grads],
        {key: value * factor for key, value in result.parts.items()},
    )


def total_loss(bundle: ForwardBundle, batch: Sequence[DenseMatrix], w: ConsensusWeights, *,
               coding_mode: CodingMode = CodingMode.WEAK_TO_STRONG,
               normalize_global: bool = True,
               disabled_terms: Sequence[LossTerm] = (),
               reduction: LossReduction = LossReduction.SUM,
               eps: float = DEFAULT_EPS,
               epoch: int = 0, step: int = 0) -> Tuple[LossBreakdown, List[ViewGradients]]:
    """L = L_Rec + L_Cls + λ1·L_Code + λ2·L_Glb con los gradientes de cada vista

    Los términos deshabilitados valen 0 y no aportan gradiente. Con reducción
    "mean", L_Rec, L_Code y L_Glb se dividen por el tamaño del lote.
    """
    disabled = set(disabled_terms)
    per_sample = 1.0 / bundle.batch_size if reduction == LossReduction.MEAN else 1.0
    grads = [ViewGradients() for _ in range(bundle.n_views)]
    values = {term: 0.0 for term in LossTerm}
    parts: Dict[str, float] = {}

    def record(term: LossTerm, result: TermResult) -> None:
        if not np.isfinite(result.value):
            raise NonFiniteLossError(term.value, step, epoch)
        values[term] = result.value
        parts.update(result.parts)

    if LossTerm.REC not in disabled:
        rec = _scaled(reconstruction_loss(bundle, batch), per_sample)
        record(LossTerm.REC, rec)
        for g, dx, dx_aug in zip(grads, rec.grads, rec.aug_grads):
            g.add("x_hat", dx)
            g.add("x_hat_aug", dx_aug)

    if LossTerm.CLS not in disabled:
        cls = classifying_loss(bundle.y_aug, w, eps)
        record(LossTerm.CLS, cls)
        for g, dy_aug in zip(grads, cls.grads):
            g.add("y_aug", dy_aug)

    if LossTerm.CODE not in disabled:
        if coding_mode == CodingMode.CROSS_VIEW:
            code = _scaled(cross_view_coding_loss(bundle.y, eps), per_sample)
            target = "y"
        else:
            t_hat = [pseudolabels(y) for y in bundle.y]
            code = _scaled(coding_loss(t_hat, bundle.y_aug, eps), per_sample)
            target = "y_aug"
        record(LossTerm.CODE, code)
        for g, dy in zip(grads, code.grads):
            g.add(target, w.lambda1 * dy)

    if LossTerm.GLB not in disabled:
        glb = _scaled(global_loss(bundle.z, bundle.z_aug, normalize_global), per_sample)
        record(LossTerm.GLB, glb)
        for g, dz, dz_aug in zip(grads, glb.grads, glb.aug_grads):
            g.add("z", w.lambda2 * dz)
            g.add("z_aug", w.lambda2 * dz_aug)

    total = (values[LossTerm.REC] + values[LossTerm.CLS]
             + w.lambda1 * values[LossTerm.CODE] + w.lambda2 * values[LossTerm.GLB])
    if not np.isfinite(total):
        raise NonFiniteLossError("total", step, epoch)

    breakdown = LossBreakdown(
        epoch=epoch,
        step=step,
        rec=values[LossTerm.REC],
        cls=values[LossTerm.CLS],
        code=values[LossTerm.CODE],
        glb=values[LossTerm.GLB],
        total=total,
        lambda1=w.lambda1,
        lambda2=w.lambda2,
        per_pair={key: value for key, value in parts.items() if "," in key},
        per_view={key: value for key, value in parts.items() if "," not in key},
    )
    return breakdown, grads
