"""
Patrón Factory para crear configuraciones predefinidas de los datasets de
benchmark
"""
from typing import Any, Dict, List, Optional

from models.entities import ConsensusWeights, DatasetCatalogEntry, TrainingConfig
from utils.exceptions import UnknownPresetError


class PresetFactory:
    """Fábrica de configuraciones por dataset"""

    # (alpha, beta, gamma, lambda1, lambda2, d_out, rho)
    _presets: Dict[str, tuple] = {
        "caltech101-20": (3.0, 3.0, 8.0, 0.1, 0.1, 128, 0.10),
        "scene-15": (3.8, 2.7, 2.2, 0.01, 1.0, 128, 0.08),
        "landuse-21": (3.0, 3.6, 9.5, 0.01, 5.0, 64, 0.08),
        "noisy-mnist": (3.0, 3.0, 8.0, 0.3, 0.01, 64, 0.10),
    }

    _catalog: Dict[str, DatasetCatalogEntry] = {
        "caltech101-20": DatasetCatalogEntry(
            name="caltech101-20", n_samples=2386, n_views=6, k=20,
            view_dims=[48, 40, 254, 1984, 512, 928],
        ),
        "scene-15": DatasetCatalogEntry(
            name="scene-15", n_samples=4485, n_views=3, k=15, view_dims=[20, 59, 40],
        ),
        "landuse-21": DatasetCatalogEntry(
            name="landuse-21", n_samples=2100, n_views=3, k=21, view_dims=[20, 59, 40],
        ),
        "noisy-mnist": DatasetCatalogEntry(
            name="noisy-mnist", n_samples=70000, n_views=2, k=10, view_dims=[784, 784],
        ),
    }

    @classmethod
    def available(cls) -> List[str]:
        return sorted(cls._presets)

    @classmethod
    def _resolve(cls, name: str) -> str:
        key = name.strip().lower()
        if key not in cls._presets:
            raise UnknownPresetError(
                f"Preset desconocido: '{name}'. Disponibles: {', '.join(cls.available())}"
            )
        return key

    @classmethod
    def overrides(cls, name: str) -> Dict[str, Any]:
        """Campos de TrainingConfig que fija el preset"""
        alpha, beta, gamma, lambda1, lambda2, d_out, rho = cls._presets[cls._resolve(name)]
        return {
            "weights": {
                "alpha": alpha,
                "beta": beta,
                "gamma": gamma,
                "lambda1": lambda1,
                "lambda2": lambda2,
            },
            "d_out": d_out,
            "rho": rho,
        }

    @classmethod
    def create(cls, name: str) -> TrainingConfig:
        """Configuración por defecto con los hiperparámetros del preset"""
        values = cls.overrides(name)
        return TrainingConfig(
            weights=ConsensusWeights(**values["weights"]),
            d_out=values["d_out"],
            rho=values["rho"],
        )

    @classmethod
    def catalog(cls, name: str) -> DatasetCatalogEntry:
        return cls._catalog[cls._resolve(name)]

    @classmethod
    def find_catalog(cls, name: str) -> Optional[DatasetCatalogEntry]:
        """Entrada del catálogo si el nombre coincide, sin error"""
        return cls._catalog.get(name.strip().lower())


def preset_config(dataset_name: str) -> TrainingConfig:
    return PresetFactory.create(dataset_name)
