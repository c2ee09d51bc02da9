"""
Jerarquía de excepciones del sistema HCN

Las excepciones de validación heredan de ValueError y las numéricas de
RuntimeError; la CLI las traduce a los códigos de salida 1 y 2.
"""
from typing import Optional


class HcnError(Exception):
    """Error base del sistema"""


class HcnValidationError(HcnError, ValueError):
    """Entrada inválida: formas, archivos, configuración"""


class ShapeMismatchError(HcnValidationError):
    """Las formas de las matrices no son compatibles"""


class DimensionMismatchError(HcnValidationError):
    """Las dimensiones declaradas no coinciden con el contenido"""


class InvalidDistributionError(HcnValidationError):
    """Un vector o matriz no es una distribución de probabilidad válida"""


class UnknownPresetError(HcnValidationError):
    """Preset de dataset desconocido"""


class DatasetFileNotFoundError(HcnValidationError, FileNotFoundError):
    """Archivo de dataset inexistente"""


class NonNumericContentError(HcnValidationError):
    """Contenido no numérico en un archivo de matriz"""

    def __init__(self, view: str, row: int, detail: str = ""):
        self.view = view
        self.row = row
        message = f"Contenido no numérico en la vista '{view}', fila {row}"
        super().__init__(f"{message}: {detail}" if detail else message)


class MissingLabelsError(HcnValidationError):
    """El dataset no tiene etiquetas y la operación las requiere"""


class CheckpointVersionError(HcnValidationError):
    """Cabecera de checkpoint corrupta o de otra versión"""


class CheckpointTruncatedError(HcnValidationError):
    """El checkpoint tiene menos bytes de los declarados"""


class CheckpointShapeError(HcnValidationError):
    """El checkpoint no coincide con la arquitectura esperada"""


class HcnRuntimeError(HcnError, RuntimeError):
    """Fallo numérico o de ejecución"""


class NonFiniteError(HcnRuntimeError):
    """Se produjo un NaN o Inf"""


class NonFiniteLossError(NonFiniteError):
    """Pérdida no finita durante el entrenamiento"""

    def __init__(self, term: str, step: int, epoch: Optional[int] = None):
        self.term = term
        self.step = step
        self.epoch = epoch
        super().__init__(
            f"Pérdida no finita en el término '{term}' (época {epoch}, paso {step})"
        )


class GradientCheckError(HcnRuntimeError):
    """El gradiente analítico no coincide con diferencias finitas"""
