"""Process-level settings read from the environment."""

import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment-driven settings (prefix ``NEMSIM_``)."""

    model_config = SettingsConfigDict(env_prefix="NEMSIM_", extra="ignore")

    max_workers: int | None = Field(
        default=None, ge=1, description="Upper bound on worker processes"
    )
    log_level: str = Field(default="INFO", description="Root logging level")
    output_dir: str = Field(default="results", description="Default output directory")

    def worker_count(self, requested: int | None = None) -> int:
        """Resolve the worker pool size from a request, the cap and the CPU count."""
        available = os.cpu_count() or 1
        count = requested or available
        if self.max_workers is not None:
            count = min(count, self.max_workers)
        return max(1, count)


@lru_cache
def get_settings() -> Settings:
    """Return the cached settings instance."""
    return Settings()
