"""
Servicio de verificación de gradientes sobre un modelo diminuto

Construye su propio modelo y lote y compara, término a término, el gradiente
analítico de la pérdida contra diferencias centrales.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from core.augment import DropMask, sample_mask
from core.consensus import total_loss
from core.network import ForwardBundle, HcnModel, backward_all, forward_all
from core.nn import grad_check
from models.entities import Activation, CodingMode, ConsensusWeights, LossTerm
from models.schemas import GradTermResult
from patterns.singleton import logger
from utils.exceptions import GradientCheckError, HcnValidationError
from utils.rng import RngStream, derive_rng

TOTAL = "total"
TERMS = [term.value for term in LossTerm] + [TOTAL]

# Distancia mínima a un quiebre de ReLU o a un empate de argmax, en pasos de diferencia finita
KINK_MARGIN = 10 * settings.grad_check_step
MAX_ATTEMPTS = 200
# Con bias nulos una fila sin unidades activas produce preactivaciones exactamente 0
BIAS_RANGE = 0.5


def _top_two_gap(bundle: ForwardBundle) -> float:
    gaps = []
    for y in bundle.y:
        ordered = np.sort(y, axis=1)
        gaps.append(float(np.min(ordered[:, -1] - ordered[:, -2])))
    return min(gaps)


class GradCheckService:
    """Chequeo de gradientes por término de la pérdida"""

    def __init__(self, n_views: int = 2, batch_size: int = 16, width: int = 8, d_out: int = 4,
                 activation: Activation = Activation.RELU, seed: int = 0,
                 coding_mode: CodingMode = CodingMode.WEAK_TO_STRONG,
                 normalize_global: bool = True, max_coords: int = 40):
        if n_views < 2:
            raise HcnValidationError("El chequeo de gradientes requiere al menos dos vistas")
        self.n_views = n_views
        self.batch_size = batch_size
        self.width = width
        self.d_out = d_out
        self.activation = activation
        self.seed = seed
        self.coding_mode = coding_mode
        self.normalize_global = normalize_global
        self.max_coords = max_coords
        self.weights = ConsensusWeights(lambda1=1.0, lambda2=1.0)

    def _sample(self) -> Tuple[HcnModel, List[np.ndarray], List[DropMask]]:
        """Modelo, lote y máscaras lejos de quiebres y empates"""
        for attempt in range(MAX_ATTEMPTS):
            rng = derive_rng(self.seed, RngStream.GRADCHECK, attempt)
            dims = [int(d) for d in rng.integers(3, 7, size=self.n_views)]
            model = HcnModel.build(dims, self.d_out, [self.width] * 3, self.activation, rng)
            for view in model.views:
                for layer in view.layers:
                    layer.bias[...] = rng.uniform(-BIAS_RANGE, BIAS_RANGE, size=layer.d_out)
            batch = [rng.uniform(0.0, 1.0, size=(self.batch_size, d)) for d in dims]
            masks = [sample_mask(d, 0.3, rng) for d in dims]
            bundle = forward_all(model, batch, masks)
            near_kink = self.activation == Activation.RELU and bundle.min_abs_pre_activation() < KINK_MARGIN
            if not near_kink and _top_two_gap(bundle) >= KINK_MARGIN:
                return model, batch, masks
        raise GradientCheckError("No se encontró un punto de prueba diferenciable")

    def check_term(self, term: str, tolerance: float = 1e-4,
                   inject_wrong_sign: bool = False) -> GradTermResult:
        if term not in TERMS:
            raise HcnValidationError(f"Término desconocido: {term}. Opciones: {', '.join(TERMS)}")
        model, batch, masks = self._sample()
        disabled = [] if term == TOTAL else [t for t in LossTerm if t.value != term]
        sign = -1.0 if inject_wrong_sign else 1.0

        def closure() -> Tuple[float, List[np.ndarray]]:
            bundle = forward_all(model, batch, masks)
            breakdown, grads = total_loss(
                bundle, batch, self.weights,
                coding_mode=self.coding_mode,
                normalize_global=self.normalize_global,
                disabled_terms=disabled,
            )
            model.zero_grad()
            backward_all(model, bundle, grads)
            return breakdown.total, [sign * g for g in model.gradients()]

        report = grad_check(
            closure,
            model.parameters(),
            tolerance=tolerance,
            max_coords=self.max_coords,
            rng=derive_rng(self.seed, RngStream.GRADCHECK, MAX_ATTEMPTS, TERMS.index(term)),
            step=settings.grad_check_step,
        )
        result = GradTermResult(
            term=term,
            passed=report.passed,
            max_rel_error=report.max_rel_error,
            checked=report.checked,
            offending=report.offending,
        )
        logger.log("info" if result.passed else "warning", "Chequeo de gradiente", {
            "term": term, "passed": result.passed, "max_rel_error": f"{result.max_rel_error:.3e}",
        })
        return result

    def run(self, terms: Optional[Sequence[str]] = None, tolerance: float = 1e-4,
            inject_wrong_sign: bool = False) -> List[GradTermResult]:
        selected = list(terms) if terms else TERMS
        return [self.check_term(term, tolerance, inject_wrong_sign) for term in selected]
