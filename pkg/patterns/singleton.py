"""
Patrón Singleton para garantizar una única instancia del logger del sistema
"""
from collections import deque
from typing import Optional, Dict, Any, List
import logging
import threading

from config import settings
from utils.timezone import format_timestamp

LOGGER_NAME = "hcn"

_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}


class LoggerSingleton:
    """Singleton para el sistema de logging estructurado"""

    _instance: Optional['LoggerSingleton'] = None
    _lock = threading.Lock()

    def __new__(cls) -> 'LoggerSingleton':
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if not self._initialized:
            self._logs: deque = deque(maxlen=settings.log_buffer_size)
            self._logger = logging.getLogger(LOGGER_NAME)
            self._entries_lock = threading.Lock()
            self._initialized = True

    def log(self, level: str, message: str, data: Optional[Dict[str, Any]] = None) -> None:
        """Registra un log y lo reenvía al logger estándar"""
        level = level.lower()
        log_entry = {
            "timestamp": format_timestamp(),
            "level": level,
            "message": message,
            "data": data or {}
        }
        with self._entries_lock:
            self._logs.append(log_entry)

        numeric_level = _LEVELS.get(level, logging.INFO)
        if self._logger.isEnabledFor(numeric_level):
            suffix = " ".join(f"{key}={value}" for key, value in (data or {}).items())
            self._logger.log(numeric_level, f"{message} {suffix}".rstrip())

    def get_logs(self, level: Optional[str] = None) -> List[Dict[str, Any]]:
        """Obtiene los logs, opcionalmente filtrados por nivel"""
        with self._entries_lock:
            if level:
                return [log for log in self._logs if log["level"] == level]
            return list(self._logs)

    def clear_logs(self) -> None:
        """Limpia los logs"""
        with self._entries_lock:
            self._logs.clear()


def configure_logging(level: Optional[str] = None) -> None:
    """Configura el handler raíz con el formato del sistema"""
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="[%(levelname)s] %(message)s",
        force=True,
    )


# Instancia global del singleton
logger = LoggerSingleton()
