"""
Patrón Builder para resolver la configuración de entrenamiento por capas:
valores por defecto < preset < archivo < flags
"""
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional

from models.entities import TrainingConfig
from patterns.factory import PresetFactory
from patterns.singleton import logger
from utils.exceptions import DatasetFileNotFoundError, HcnValidationError


def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_config_file(path: str) -> Dict[str, Any]:
    """Lee un archivo de configuración TOML o JSON"""
    file_path = Path(path)
    if not file_path.is_file():
        raise DatasetFileNotFoundError(f"Archivo de configuración inexistente: {path}")
    try:
        if file_path.suffix.lower() == ".toml":
            with file_path.open("rb") as handle:
                return tomllib.load(handle)
        if file_path.suffix.lower() == ".json":
            return json.loads(file_path.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise HcnValidationError(f"Configuración ilegible en {path}: {e}") from e
    raise HcnValidationError(f"Formato de configuración no soportado: {file_path.suffix}")


class TrainingConfigBuilder:
    """Builder para construir la configuración de entrenamiento"""

    def __init__(self):
        self._layers: Dict[str, Dict[str, Any]] = {}

    def with_preset(self, name: Optional[str]) -> 'TrainingConfigBuilder':
        """Aplica los hiperparámetros de un preset"""
        if name:
            self._layers["preset"] = PresetFactory.overrides(name)
        return self

    def with_file(self, path: Optional[str]) -> 'TrainingConfigBuilder':
        """Aplica un archivo de configuración"""
        if path:
            self._layers["file"] = read_config_file(path)
        return self

    def with_overrides(self, overrides: Optional[Dict[str, Any]]) -> 'TrainingConfigBuilder':
        """Aplica los flags explícitos; los valores None se ignoran"""
        if overrides:
            flags: Dict[str, Any] = {}
            for key, value in overrides.items():
                if value is None:
                    continue
                if isinstance(value, dict):
                    value = {k: v for k, v in value.items() if v is not None}
                    if not value:
                        continue
                flags[key] = value
            self._layers["flags"] = _deep_merge(self._layers.get("flags", {}), flags)
        return self

    def build(self) -> TrainingConfig:
        """Construye la configuración final validada"""
        values: Dict[str, Any] = {}
        for layer in ("preset", "file", "flags"):
            if layer in self._layers:
                values = _deep_merge(values, self._layers[layer])
        config = TrainingConfig(**values)
        logger.log("debug", "Configuración resuelta", {"layers": ",".join(self._layers)})
        return config
