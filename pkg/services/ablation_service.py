"""
Servicio de ablación: entrena y evalúa cada variante sobre varias semillas
"""
from typing import Dict, List, Optional, Sequence

import numpy as np

from models.entities import AblationVariant, MultiviewDataset, TrainingConfig
from models.schemas import AblationRow
from patterns.prototype import TrainingConfigPrototype
from patterns.singleton import logger
from services.evaluation_service import EvaluationService
from services.training_service import TrainingService


class AblationService:
    """Compara el modelo completo contra las variantes sin cada componente"""

    def __init__(self, training: Optional[TrainingService] = None,
                 evaluation: Optional[EvaluationService] = None):
        self.training = training or TrainingService()
        self.evaluation = evaluation

    def run_variant(self, dataset: MultiviewDataset, config: TrainingConfig,
                    variant: AblationVariant, seeds: Sequence[int],
                    k_true: Optional[int] = None) -> AblationRow:
        evaluation = self.evaluation or EvaluationService(config.kmeans_restarts)
        scores: Dict[str, List[float]] = {"acc": [], "nmi": [], "ari": [], "loss": []}
        for seed in seeds:
            seeded = config.model_copy(update={"seed": seed})
            model, history = self.training.train(dataset, seeded)
            report = evaluation.evaluate(model, dataset, k_true, seed, variant.value)
            scores["acc"].append(report.acc)
            scores["nmi"].append(report.nmi)
            scores["ari"].append(report.ari)
            scores["loss"].append(history.epochs[-1].mean_total)
        row = AblationRow(
            variant=variant.value,
            acc=float(np.mean(scores["acc"])),
            nmi=float(np.mean(scores["nmi"])),
            ari=float(np.mean(scores["ari"])),
            acc_std=float(np.std(scores["acc"])),
            final_loss=float(np.mean(scores["loss"])),
        )
        logger.log("info", "Variante evaluada", {"variant": row.variant, "acc": f"{row.acc:.4f}"})
        return row

    def run(self, dataset: MultiviewDataset, config: TrainingConfig, seeds: Sequence[int],
            variants: Optional[Sequence[AblationVariant]] = None,
            k_true: Optional[int] = None) -> List[AblationRow]:
        """Una fila por variante, en el orden full, no-rec, no-cls, no-glb, no-code, no-da"""
        try:
            prototype = TrainingConfigPrototype(config)
            selected = list(variants) if variants else list(AblationVariant)
            return [
                self.run_variant(dataset, prototype.clone(variant), variant, seeds, k_true)
                for variant in selected
            ]
        except Exception as e:
            logger.log("error", f"Error en la ablación: {e}")
            raise
