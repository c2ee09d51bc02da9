"""
Repositorio de matrices densas en CSV (cabecera opcional) o formato binario

Formato binario: magic de 8 bytes, versión, filas y columnas como enteros de
64 bits little-endian, seguidos de los valores float64 little-endian en
orden fila.
"""
import csv
import math
import struct
from pathlib import Path
from typing import Any, List, Optional

import numpy as np

from models.entities import MatrixFormat
from repositories.base import BaseRepository
from utils.exceptions import DimensionMismatchError, HcnValidationError, NonNumericContentError

BINARY_MAGIC = b"HCNMAT\x00\x00"
BINARY_VERSION = 1
BINARY_HEADER = struct.Struct("<8sqqq")


def infer_format(path: Path) -> MatrixFormat:
    return MatrixFormat.CSV if path.suffix.lower() == ".csv" else MatrixFormat.BINARY


def _parse_row(tokens: List[str]) -> Optional[List[float]]:
    try:
        return [float(token) for token in tokens]
    except ValueError:
        return None


class MatrixRepository(BaseRepository[np.ndarray]):
    """Repositorio de matrices de una vista"""

    def __init__(self):
        super().__init__("matriz")

    def _read(self, path: Path, format: Optional[MatrixFormat] = None,
              view: Optional[str] = None, **options: Any) -> np.ndarray:
        fmt = format or infer_format(path)
        name = view or path.name
        if fmt == MatrixFormat.CSV:
            return self._read_csv(path, name)
        return self._read_binary(path, name)

    def _write(self, entity: np.ndarray, path: Path, format: Optional[MatrixFormat] = None,
               **options: Any) -> None:
        matrix = np.ascontiguousarray(entity, dtype=np.float64)
        if matrix.ndim != 2:
            raise DimensionMismatchError(f"Solo se guardan matrices 2-D, forma {matrix.shape}")
        if (format or infer_format(path)) == MatrixFormat.CSV:
            np.savetxt(path, matrix, delimiter=",", fmt="%.17g")
        else:
            rows, cols = matrix.shape
            with path.open("wb") as handle:
                handle.write(BINARY_HEADER.pack(BINARY_MAGIC, BINARY_VERSION, rows, cols))
                handle.write(matrix.astype("<f8").tobytes(order="C"))

    def _read_csv(self, path: Path, view: str) -> np.ndarray:
        rows: List[List[float]] = []
        width: Optional[int] = None
        with path.open(newline="", encoding="utf-8") as handle:
            for line_number, tokens in enumerate(csv.reader(handle), start=1):
                if not tokens or all(not token.strip() for token in tokens):
                    continue
                values = _parse_row(tokens)
                if values is None:
                    if line_number == 1:
                        continue  # cabecera
                    raise NonNumericContentError(view, line_number, ",".join(tokens)[:60])
                if not all(math.isfinite(value) for value in values):
                    raise NonNumericContentError(view, line_number, "valor no finito")
                if width is None:
                    width = len(values)
                elif len(values) != width:
                    raise DimensionMismatchError(
                        f"Vista '{view}', fila {line_number}: {len(values)} columnas, se esperaban {width}"
                    )
                rows.append(values)
        if not rows:
            raise HcnValidationError(f"La vista '{view}' no contiene filas numéricas")
        return np.asarray(rows, dtype=np.float64)

    def _read_binary(self, path: Path, view: str) -> np.ndarray:
        payload = path.read_bytes()
        if len(payload) < BINARY_HEADER.size:
            raise HcnValidationError(f"Vista '{view}': cabecera binaria incompleta")
        magic, version, rows, cols = BINARY_HEADER.unpack_from(payload)
        if magic != BINARY_MAGIC or version != BINARY_VERSION:
            raise HcnValidationError(f"Vista '{view}': formato binario desconocido (versión {version})")
        if rows < 0 or cols < 0:
            raise HcnValidationError(f"Vista '{view}': dimensiones inválidas {rows}×{cols}")
        expected = BINARY_HEADER.size + rows * cols * 8
        if len(payload) != expected:
            raise DimensionMismatchError(
                f"Vista '{view}': {len(payload)} bytes, se esperaban {expected} para {rows}×{cols}"
            )
        data = np.frombuffer(payload, dtype="<f8", offset=BINARY_HEADER.size).astype(np.float64)
        matrix = data.reshape(rows, cols)
        bad = np.argwhere(~np.isfinite(matrix))
        if bad.size:
            raise NonNumericContentError(view, int(bad[0][0]) + 1, "valor no finito")
        return matrix


class LabelRepository(BaseRepository[np.ndarray]):
    """Etiquetas enteras, una por línea, con cabecera opcional"""

    def __init__(self):
        super().__init__("etiquetas")

    def _read(self, path: Path, **options: Any) -> np.ndarray:
        labels: List[int] = []
        with path.open(encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                token = line.strip().split(",")[0].strip()
                if not token:
                    continue
                try:
                    value = float(token)
                except ValueError:
                    if line_number == 1 and not labels:
                        continue  # cabecera
                    raise NonNumericContentError(path.name, line_number, token)
                if not value.is_integer():
                    raise NonNumericContentError(path.name, line_number, f"etiqueta no entera {token}")
                labels.append(int(value))
        return np.asarray(labels, dtype=np.int64)

    def _write(self, entity: np.ndarray, path: Path, **options: Any) -> None:
        np.savetxt(path, np.asarray(entity, dtype=np.int64).reshape(-1, 1), fmt="%d")


def contiguous_labels(labels: np.ndarray) -> np.ndarray:
    """Reasigna etiquetas arbitrarias a 0..k−1 preservando su orden"""
    _, inverse = np.unique(labels, return_inverse=True)
    return inverse.astype(np.int64)
