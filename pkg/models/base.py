"""
Modelos base usando Pydantic
"""
from pydantic import BaseModel, ConfigDict


class BaseEntity(BaseModel):
    """Modelo base para configuraciones y descriptores"""

    model_config = ConfigDict(
        extra="forbid",
        validate_assignment=True,
        use_enum_values=False,
    )


class ArrayEntity(BaseModel):
    """Modelo base para entidades que transportan arreglos numpy"""

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        extra="forbid",
    )


class BaseReport(BaseModel):
    """Modelo base para resultados serializables"""

    model_config = ConfigDict(
        extra="forbid",
        from_attributes=True,
    )
