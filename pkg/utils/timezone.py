"""
Utilidades para manejo de timezone de los reportes
"""
import pytz
from datetime import datetime
from typing import Optional

from config import settings


def get_report_tz():
    """Timezone configurado para los reportes"""
    return pytz.timezone(settings.timezone)


def get_now() -> datetime:
    """Obtiene la fecha y hora actual en el timezone configurado"""
    return datetime.now(get_report_tz())


def to_report_timezone(dt: datetime) -> datetime:
    """Convierte un datetime al timezone configurado"""
    if dt.tzinfo is None:
        # Si no tiene timezone, asumir que es UTC
        dt = pytz.utc.localize(dt)

    return dt.astimezone(get_report_tz())


def format_timestamp(dt: Optional[datetime] = None) -> str:
    """Formatea un timestamp ISO en el timezone configurado"""
    if dt is None:
        dt = get_now()
    else:
        dt = to_report_timezone(dt)

    return dt.isoformat()
