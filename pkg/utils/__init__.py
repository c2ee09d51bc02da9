"""
Utilidades del sistema HCN
"""
from .timezone import (
    get_now,
    to_report_timezone,
    format_timestamp,
)
from .rng import RngStream, derive_rng, derive_seed

__all__ = [
    'get_now',
    'to_report_timezone',
    'format_timestamp',
    'RngStream',
    'derive_rng',
    'derive_seed',
]
