"""
Esquemas Pydantic de resultados: pérdidas, historiales y reportes
"""
from typing import Dict, List, Optional

from pydantic import Field, model_validator

from models.base import BaseReport


class LossBreakdown(BaseReport):
    """Valores de cada término de la pérdida total en un paso"""
    epoch: int = 0
    step: int = 0
    rec: float
    cls: float
    code: float
    glb: float
    total: float
    lambda1: float = 0.0
    lambda2: float = 0.0
    per_pair: Dict[str, float] = Field(default_factory=dict)
    per_view: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_recomposition(self) -> "LossBreakdown":
        expected = self.rec + self.cls + self.lambda1 * self.code + self.lambda2 * self.glb
        if abs(expected - self.total) > 1e-10 * max(1.0, abs(expected)):
            raise ValueError("total no coincide con la suma de sus términos")
        return self

    def csv_row(self) -> Dict[str, float]:
        """Fila del log CSV: epoch, step, rec, cls, code, glb, total"""
        return {
            "epoch": self.epoch,
            "step": self.step,
            "rec": self.rec,
            "cls": self.cls,
            "code": self.code,
            "glb": self.glb,
            "total": self.total,
        }


class EpochMetrics(BaseReport):
    """Resumen de una época"""
    epoch: int
    mean_total: float
    seconds: float
    acc: Optional[float] = None
    nmi: Optional[float] = None
    ari: Optional[float] = None


class TrainingHistory(BaseReport):
    """Historial completo de una corrida"""
    steps: List[LossBreakdown] = Field(default_factory=list)
    epochs: List[EpochMetrics] = Field(default_factory=list)
    checkpoint_path: Optional[str] = None

    @property
    def epoch_seconds(self) -> List[float]:
        return [epoch.seconds for epoch in self.epochs]

    def epoch_mean_totals(self) -> List[float]:
        """Pérdida total media por época"""
        return [epoch.mean_total for epoch in self.epochs]


class ClusteringReport(BaseReport):
    """Resultado de evaluar un agrupamiento contra las etiquetas reales"""
    dataset: str
    mode: str = "hcn"
    seed: int
    acc: float = Field(..., ge=0, le=1)
    nmi: float = Field(..., ge=0, le=1)
    ari: float = Field(..., ge=-1, le=1)
    inertia: float
    predicted: List[int]
    contingency: List[List[int]]

    def csv_row(self) -> Dict[str, object]:
        """Fila CSV: dataset, mode, seed, acc, nmi, ari, inertia"""
        return {
            "dataset": self.dataset,
            "mode": self.mode,
            "seed": self.seed,
            "acc": self.acc,
            "nmi": self.nmi,
            "ari": self.ari,
            "inertia": self.inertia,
        }


class MetricSummary(BaseReport):
    """Media, desviación y mejor valor de una métrica sobre semillas"""
    mean: float
    std: float
    best: float


class EvaluationSummary(BaseReport):
    """Resumen multi-semilla de un modo de evaluación"""
    dataset: str
    mode: str
    runs: int
    acc: MetricSummary
    nmi: MetricSummary
    ari: MetricSummary

    def csv_row(self) -> Dict[str, object]:
        row: Dict[str, object] = {"dataset": self.dataset, "mode": self.mode, "runs": self.runs}
        for name in ("acc", "nmi", "ari"):
            summary: MetricSummary = getattr(self, name)
            row[f"{name}_mean"] = summary.mean
            row[f"{name}_std"] = summary.std
            row[f"{name}_best"] = summary.best
        return row


class AblationRow(BaseReport):
    """Métricas medias de una variante de ablación"""
    variant: str
    acc: float
    nmi: float
    ari: float
    acc_std: float = 0.0
    final_loss: float

    def csv_row(self) -> Dict[str, object]:
        return self.model_dump()


class GradTermResult(BaseReport):
    """Resultado del chequeo de gradiente de un término"""
    term: str
    passed: bool
    max_rel_error: float
    checked: int
    offending: List[str] = Field(default_factory=list)


class GradCheckReport(BaseReport):
    """Comparación entre gradiente analítico y diferencias centrales"""
    passed: bool
    max_rel_error: float
    tolerance: float
    checked: int
    offending: List[str] = Field(default_factory=list)
