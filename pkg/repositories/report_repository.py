"""
Repositorio de reportes: tablas CSV y documentos JSON
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

from pydantic import BaseModel

from repositories.base import BaseRepository

Rows = Sequence[Dict[str, Any]]


class CsvReportRepository(BaseRepository[Rows]):
    """Tablas con cabecera tomada de la primera fila"""

    def __init__(self):
        super().__init__("reporte CSV")

    def _write(self, entity: Rows, path: Path, fieldnames: Sequence[str] = (), **options: Any) -> None:
        columns = list(fieldnames) or (list(entity[0].keys()) if entity else [])
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in entity:
                writer.writerow({key: ("" if value is None else value) for key, value in row.items()})

    def _read(self, path: Path, **options: Any) -> List[Dict[str, str]]:
        with path.open(newline="", encoding="utf-8") as handle:
            return list(csv.DictReader(handle))


class JsonReportRepository(BaseRepository[Any]):
    """Documentos JSON; acepta modelos pydantic o estructuras simples"""

    def __init__(self):
        super().__init__("reporte JSON")

    def _write(self, entity: Any, path: Path, **options: Any) -> None:
        if isinstance(entity, BaseModel):
            text = entity.model_dump_json(indent=2)
        else:
            text = json.dumps(_plain(entity), indent=2, sort_keys=True)
        path.write_text(text + "\n", encoding="utf-8")

    def _read(self, path: Path, **options: Any) -> Any:
        return json.loads(path.read_text(encoding="utf-8"))


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value
