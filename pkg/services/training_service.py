"""
Servicio de entrenamiento: bucle completo de HCN por épocas y mini-lotes
"""
import time
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from core.augment import DropMask, sample_mask
from core.consensus import total_loss
from core.network import HcnModel, backward_all, forward_all
from core.nn import AdamOptimizer
from models.entities import MultiviewDataset, TrainingConfig
from models.schemas import EpochMetrics, LossBreakdown, TrainingHistory
from patterns.factory import preset_config
from patterns.singleton import logger
from repositories.checkpoint_repository import save_checkpoint
from services.data_service import split_batches
from services.evaluation_service import EvaluationService
from utils.exceptions import HcnValidationError
from utils.rng import RngStream, derive_rng

__all__ = ["TrainingService", "train", "preset_config", "build_model", "batch_masks"]


def build_model(view_dims: List[int], config: TrainingConfig) -> HcnModel:
    """Modelo inicializado con el flujo INIT de la semilla"""
    return HcnModel.build(
        view_dims,
        config.d_out,
        config.hidden_widths,
        config.activation,
        derive_rng(config.seed, RngStream.INIT),
    )


def batch_masks(view_dims: List[int], config: TrainingConfig, epoch: int,
                batch_index: int) -> Optional[List[DropMask]]:
    """Una máscara por vista, nueva en cada lote; None sin aumento"""
    if not config.use_augmentation:
        return None
    return [
        sample_mask(d_v, config.rho, derive_rng(config.seed, RngStream.MASK, epoch, batch_index, view))
        for view, d_v in enumerate(view_dims)
    ]


class TrainingService:
    """Servicio de entrenamiento"""

    def __init__(self, evaluation: Optional[EvaluationService] = None):
        self.evaluation = evaluation

    def train_step(self, model: HcnModel, optimizer: AdamOptimizer, batch: List[np.ndarray],
                   masks: Optional[List[DropMask]], config: TrainingConfig,
                   epoch: int, step: int) -> LossBreakdown:
        """Pasada, pérdida total, retropropagación conjunta y un paso de Adam"""
        bundle = forward_all(model, batch, masks)
        breakdown, grads = total_loss(
            bundle, batch, config.weights,
            coding_mode=config.coding_mode,
            normalize_global=config.normalize_global,
            disabled_terms=config.disabled_terms,
            reduction=config.loss_reduction,
            eps=config.prob_eps,
            epoch=epoch,
            step=step,
        )
        model.zero_grad()
        backward_all(model, bundle, grads)
        optimizer.step(model.parameters(), model.gradients())
        return breakdown

    def train(self, dataset: MultiviewDataset, config: TrainingConfig,
              checkpoint_path: Optional[Path | str] = None) -> Tuple[HcnModel, TrainingHistory]:
        """Entrena E épocas; registra cada paso y opcionalmente guarda el checkpoint final"""
        try:
            if dataset.n_views < 2:
                raise HcnValidationError("El entrenamiento requiere al menos dos vistas")
            logger.log("info", "Iniciando entrenamiento", {
                "dataset": dataset.name,
                "n": dataset.n_samples,
                "views": dataset.n_views,
                "epochs": config.epochs,
                "batch_size": config.batch_size,
                "seed": config.seed,
            })
            model = build_model(dataset.view_dims, config)
            optimizer = AdamOptimizer(config.lr, config.beta1, config.beta2, config.eps_opt)
            history = TrainingHistory()
            evaluation = self.evaluation or EvaluationService(config.kmeans_restarts)

            step = 0
            for epoch in range(1, config.epochs + 1):
                started = time.perf_counter()
                totals = []
                batches = split_batches(dataset.n_samples, config.batch_size, config.seed, epoch)
                for batch_index, indices in enumerate(batches):
                    batch = dataset.take(indices).views
                    masks = batch_masks(dataset.view_dims, config, epoch, batch_index)
                    breakdown = self.train_step(model, optimizer, batch, masks, config, epoch, step)
                    history.steps.append(breakdown)
                    totals.append(breakdown.total)
                    logger.log("debug", "Paso", {
                        "epoch": epoch, "step": step, "total": f"{breakdown.total:.6g}",
                    })
                    step += 1
                seconds = time.perf_counter() - started

                metrics = EpochMetrics(epoch=epoch, mean_total=float(np.mean(totals)), seconds=seconds)
                if config.eval_every and epoch % config.eval_every == 0 and dataset.labels is not None:
                    report = evaluation.evaluate(model, dataset, seed=config.seed)
                    metrics = metrics.model_copy(update={"acc": report.acc, "nmi": report.nmi, "ari": report.ari})
                history.epochs.append(metrics)
                logger.log("info", "Época completada", {
                    "epoch": epoch,
                    "mean_total": f"{metrics.mean_total:.6g}",
                    "seconds": f"{seconds:.3f}",
                })

            if checkpoint_path is not None:
                path = save_checkpoint(model, checkpoint_path, config.model_dump(mode="json"))
                history.checkpoint_path = str(path)
            return model, history
        except Exception as e:
            logger.log("error", f"Error en el entrenamiento: {e}")
            raise


def train(dataset: MultiviewDataset, config: TrainingConfig,
          checkpoint_path: Optional[Path | str] = None) -> Tuple[HcnModel, TrainingHistory]:
    return TrainingService().train(dataset, config, checkpoint_path)
