"""
Patrón Prototype para derivar las variantes de ablación a partir de una
configuración base
"""
from typing import Dict

from models.entities import AblationVariant, LossTerm, TrainingConfig

_DISABLED_TERM = {
    AblationVariant.NO_REC: LossTerm.REC,
    AblationVariant.NO_CLS: LossTerm.CLS,
    AblationVariant.NO_GLB: LossTerm.GLB,
    AblationVariant.NO_CODE: LossTerm.CODE,
}


class TrainingConfigPrototype:
    """Prototipo de configuración que se clona por variante"""

    def __init__(self, config: TrainingConfig):
        self.config = config

    def clone(self, variant: AblationVariant) -> TrainingConfig:
        """Copia profunda con el componente de la variante desactivado"""
        if variant == AblationVariant.FULL:
            return self.config.model_copy(deep=True)
        if variant == AblationVariant.NO_DA:
            return self.config.model_copy(update={"use_augmentation": False}, deep=True)
        disabled = [*self.config.disabled_terms, _DISABLED_TERM[variant]]
        # model_copy no valida; se reconstruye para normalizar la lista
        return TrainingConfig(**{**self.config.model_dump(), "disabled_terms": disabled})

    def variants(self) -> Dict[AblationVariant, TrainingConfig]:
        return {variant: self.clone(variant) for variant in AblationVariant}
