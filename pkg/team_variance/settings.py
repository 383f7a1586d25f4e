from functools import lru_cache
from typing import Any, Dict, Literal

from pydantic import PositiveInt
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

_runtime_overrides: Dict[str, Any] = {}


class Settings(BaseSettings):
    # Basic Settings
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"

    # Model validation
    row_sum_tol: float = 1e-12
    load_row_sum_tol: float = 1e-9  # scenario files carry rounded decimals

    # Linear algebra
    solve_tol: float = 1e-10
    residual_tol: float = 1e-9

    # Policy iteration
    tie_tol: float = 1e-9
    monotonicity_tol: float = 1e-12
    certificate_tol: float = 1e-9
    default_max_iters: PositiveInt = 50
    max_workers: PositiveInt = 1

    # Oracle
    enumeration_cap: PositiveInt = 100_000
    burn_in: int = 1_000
    n_batches: PositiveInt = 100

    model_config = SettingsConfigDict(validate_assignment=True)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # All configuration is explicit: environment and dotenv are never read.
        return (init_settings,)


def configure_settings(**kwargs):
    """
    Configure settings with runtime overrides.

    Updates the runtime overrides dictionary and clears the settings cache.

    Args:
        **kwargs: Settings to override (e.g., tie_tol=1e-8, solve_tol=1e-11)

    Example:
        configure_settings(tie_tol=1e-8, max_workers=4)
    """
    global _runtime_overrides
    _runtime_overrides.update(kwargs)
    get_settings.cache_clear()


def reset_settings() -> None:
    """Drop every runtime override and return to the defaults."""
    _runtime_overrides.clear()
    get_settings.cache_clear()


@lru_cache
def get_settings() -> Settings:
    """
    Get the current settings.
    If `configure_settings()` was called, runtime overrides are applied on top
    of the defaults.
    """
    return Settings(**_runtime_overrides)
