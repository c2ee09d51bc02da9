"""
Middleware de la CLI: traducción de errores a códigos de salida, tiempos de
ejecución y límite de hilos de las librerías numéricas
"""
import argparse
import sys
import time
from typing import Callable, NoReturn

from pydantic import ValidationError
from threadpoolctl import threadpool_limits

from config import settings
from patterns.singleton import logger
from utils.exceptions import HcnError, HcnValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

Handler = Callable[[argparse.Namespace], int]


class UsageError(HcnValidationError):
    """Uso incorrecto de la línea de comandos"""


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser que reporta el mal uso como error de validación"""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def exit_code_for(error: BaseException) -> int:
    """0 éxito, 1 validación, 2 fallo numérico o de ejecución"""
    if isinstance(error, (HcnValidationError, ValidationError, UsageError)):
        return EXIT_VALIDATION
    if isinstance(error, HcnError):
        return EXIT_RUNTIME
    if isinstance(error, (ValueError, FileNotFoundError, PermissionError)):
        return EXIT_VALIDATION
    return EXIT_RUNTIME


def run_command(handler: Handler, args: argparse.Namespace) -> int:
    """Ejecuta un subcomando con límite de hilos y manejo global de errores"""
    command = getattr(args, "command", handler.__name__)
    threads = getattr(args, "threads", None) or settings.threads
    started = time.perf_counter()
    logger.log("info", f"Comando: {command}", {"threads": threads})
    try:
        with threadpool_limits(limits=threads):
            code = handler(args)
        logger.log("info", f"Comando completado: {command}", {
            "seconds": f"{time.perf_counter() - started:.3f}",
        })
        return code
    except Exception as e:
        code = exit_code_for(e)
        logger.log("error", f"Comando fallido: {command}", {
            "error": str(e),
            "type": type(e).__name__,
            "exit_code": code,
        })
        print(f"error: {e}", file=sys.stderr)
        return code
