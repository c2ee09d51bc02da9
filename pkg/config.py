"""
Configuración de la aplicación usando Pydantic Settings
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configuración de la aplicación"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="HCN_",
        case_sensitive=False,
    )

    # Logging
    log_level: str = "INFO"
    log_buffer_size: int = 10000

    # Timezone para los timestamps de reportes y logs
    timezone: str = "UTC"

    # Ejecución
    threads: int = 1
    output_dir: str = "runs"

    # Numérico
    prob_eps: float = 1e-12
    grad_check_step: float = 1e-5

    # Checkpoints
    checkpoint_version: int = 1

    # Evaluación
    kmeans_max_iter: int = 300
    kmeans_restarts: int = 10
    eval_seeds: int = 5


# Instancia singleton de configuración
settings = Settings()
