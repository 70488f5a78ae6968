"""
Configuration management for the epiwit engine.
Loads settings from environment variables with sensible defaults.
"""

import os
from dataclasses import dataclass
from typing import Optional
from dotenv import load_dotenv

# Load environment variables from .env file if it exists
load_dotenv()


@dataclass
class WitnessConfig:
    """Configuration settings for witness construction and verification."""

    # Field guards
    max_field_bits: int = 64
    exhaustive_field_limit: int = 4096

    # Characters
    character_dim_guard: int = 10_000

    # Execution
    grid_concurrency: int = 4
    default_seed: int = 0
    normalization_samples: int = 3
    jacobi_samples: int = 10_000

    # Caching
    enable_cache: bool = True
    cache_max_size: int = 256

    # Logging
    log_level: str = "WARNING"
    log_format: str = "json"  # "json" or "text"
    log_file: Optional[str] = None
    log_to_console: bool = True

    @classmethod
    def from_env(cls) -> "WitnessConfig":
        """
        Create configuration from environment variables.

        Returns:
            WitnessConfig: Configuration instance

        Raises:
            ValueError: If a numeric variable does not parse
        """
        return cls(
            max_field_bits=int(os.getenv("EPIWIT_MAX_FIELD_BITS", "64")),
            exhaustive_field_limit=int(os.getenv("EPIWIT_EXHAUSTIVE_FIELD_LIMIT", "4096")),
            character_dim_guard=int(os.getenv("EPIWIT_CHARACTER_DIM_GUARD", "10000")),
            grid_concurrency=int(os.getenv("EPIWIT_GRID_CONCURRENCY", "4")),
            default_seed=int(os.getenv("EPIWIT_SEED", "0")),
            normalization_samples=int(os.getenv("EPIWIT_NORMALIZATION_SAMPLES", "3")),
            jacobi_samples=int(os.getenv("EPIWIT_JACOBI_SAMPLES", "10000")),
            enable_cache=os.getenv("EPIWIT_ENABLE_CACHE", "true").lower() == "true",
            cache_max_size=int(os.getenv("EPIWIT_CACHE_MAX_SIZE", "256")),
            log_level=os.getenv("EPIWIT_LOG_LEVEL", "WARNING"),
            log_format=os.getenv("EPIWIT_LOG_FORMAT", "json"),
            log_file=os.getenv("EPIWIT_LOG_FILE"),
            log_to_console=os.getenv("EPIWIT_LOG_TO_CONSOLE", "true").lower() == "true",
        )

    def validate(self) -> None:
        """
        Validate configuration settings.

        Raises:
            ValueError: If configuration is invalid
        """
        if self.max_field_bits < 1:
            raise ValueError("max_field_bits must be at least 1")

        if self.character_dim_guard < 1:
            raise ValueError("character_dim_guard must be at least 1")

        if self.grid_concurrency < 1:
            raise ValueError("grid_concurrency must be at least 1")

        if self.normalization_samples < 1:
            raise ValueError("normalization_samples must be at least 1")

        if self.default_seed < 0:
            raise ValueError("default_seed must be non-negative")

        if self.log_format not in ("json", "text"):
            raise ValueError("log_format must be 'json' or 'text'")

    def __repr__(self) -> str:
        return (
            f"WitnessConfig("
            f"max_field_bits={self.max_field_bits}, "
            f"character_dim_guard={self.character_dim_guard}, "
            f"grid_concurrency={self.grid_concurrency}, "
            f"seed={self.default_seed}, "
            f"cache={'on' if self.enable_cache else 'off'})"
        )


# Global configuration instance
_config: Optional[WitnessConfig] = None


def get_config() -> WitnessConfig:
    """
    Get or create the global configuration instance.

    Returns:
        WitnessConfig: Global configuration instance
    """
    global _config
    if _config is None:
        _config = WitnessConfig.from_env()
        _config.validate()
    return _config


def reset_config() -> None:
    """Reset the global configuration instance. Useful for testing."""
    global _config
    _config = None
