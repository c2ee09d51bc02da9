"""
Repositorio base para artefactos en archivo
"""
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Generic, TypeVar

from patterns.singleton import logger
from utils.exceptions import DatasetFileNotFoundError, HcnError, HcnValidationError

T = TypeVar('T')


class BaseRepository(ABC, Generic[T]):
    """Repositorio base con lectura y escritura registradas en el log"""

    def __init__(self, kind: str):
        self.kind = kind
        self.logger = logger

    def load(self, path: Path | str, **options: Any) -> T:
        """Lee un artefacto desde disco"""
        file_path = Path(path)
        try:
            if not file_path.is_file():
                raise DatasetFileNotFoundError(f"No existe el archivo de {self.kind}: {file_path}")
            entity = self._read(file_path, **options)
            self.logger.log("debug", f"{self.kind} leído", {"path": str(file_path)})
            return entity
        except HcnError as e:
            self.logger.log("error", f"Error al leer {self.kind}", {"path": str(file_path), "error": str(e)})
            raise
        except OSError as e:
            self.logger.log("error", f"Error de E/S al leer {self.kind}", {"path": str(file_path), "error": str(e)})
            raise HcnValidationError(f"No se pudo leer {file_path}: {e}") from e

    def save(self, entity: T, path: Path | str, **options: Any) -> Path:
        """Escribe un artefacto, creando los directorios necesarios"""
        file_path = Path(path)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            self._write(entity, file_path, **options)
            self.logger.log("debug", f"{self.kind} guardado", {"path": str(file_path)})
            return file_path
        except HcnError as e:
            self.logger.log("error", f"Error al guardar {self.kind}", {"path": str(file_path), "error": str(e)})
            raise
        except OSError as e:
            self.logger.log("error", f"Error de E/S al guardar {self.kind}", {"path": str(file_path), "error": str(e)})
            raise HcnValidationError(f"No se pudo escribir {file_path}: {e}") from e

    @abstractmethod
    def _read(self, path: Path, **options: Any) -> T:
        """Deserializa el artefacto"""
        pass

    @abstractmethod
    def _write(self, entity: T, path: Path, **options: Any) -> None:
        """Serializa el artefacto"""
        pass
