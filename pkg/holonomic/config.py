"""
Configuration management for holonomic.
Uses environment variables so experiments can be tuned without code changes.
"""

from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class NumericsConfig(BaseSettings):
    """Tolerances and search sizes shared by the numerical routines."""

    model_config = SettingsConfigDict(env_prefix="HOLONOMIC_")

    # Matrix comparisons
    tol_ortho: float = Field(default=1e-10, gt=0)
    tol_id: float = Field(default=1e-9, gt=0)

    # One-parameter family searches
    puncture: float = Field(default=1e-12, gt=0)
    golden_tol: float = Field(default=1e-10, gt=0)
    family_grid: int = Field(default=4096, ge=8)

    # Property (P) checks count a pair as violating only above this slack
    slack_tol: float = Field(default=1e-12, ge=0)

    # Pairwise subadditivity checks are quadratic in the sample size
    validation_max_entries: int = Field(default=1025, ge=1)


class RuntimeConfig(BaseSettings):
    """Parallelism and reproducibility settings."""

    model_config = SettingsConfigDict(env_prefix="HOLONOMIC_")

    threads: int = Field(default=4, ge=1)
    seed: int = Field(default=20240601, ge=0, lt=2**64)


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    model_config = SettingsConfigDict(env_prefix="LOG_")

    level: str = Field(default="WARNING")
    format: str = Field(default="text")  # json or text
    file_enabled: bool = Field(default=False)
    file_path: str = Field(default="logs/holonomic.log")
    file_max_size: int = Field(default=10 * 1024 * 1024)  # 10MB
    file_backup_count: int = Field(default=3)

    @field_validator("level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return v.upper()

    @field_validator("format")
    @classmethod
    def validate_format(cls, v: str) -> str:
        """Validate log format."""
        if v.lower() not in ("json", "text"):
            raise ValueError(f"Invalid log format: {v}. Must be 'json' or 'text'")
        return v.lower()


class Config(BaseSettings):
    """Main configuration class combining all settings."""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    runtime: RuntimeConfig = Field(default_factory=RuntimeConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    def log_file(self) -> Optional[str]:
        """Return the log file path if file logging is enabled."""
        if not self.logging.file_enabled:
            return None
        Path(self.logging.file_path).parent.mkdir(parents=True, exist_ok=True)
        return self.logging.file_path


# Global configuration instance
config = Config()


def get_config() -> Config:
    """Get the global configuration instance."""
    return config


def reload_config() -> Config:
    """Re-read the environment, e.g. after HOLONOMIC_THREADS changed."""
    global config
    config = Config()
    return config
