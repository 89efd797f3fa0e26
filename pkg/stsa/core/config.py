from pydantic import BaseModel, ValidationError, field_validator
from dotenv import load_dotenv
import numpy as np
import os

from stsa.core.errors import ConfigurationError

load_dotenv()


class Settings(BaseModel):
    precision: str = os.getenv("STSA_PRECISION", "double")
    seed: int = int(os.getenv("STSA_SEED", "0"))

    # Block defaults
    subspace: str = os.getenv("STSA_SUBSPACE", "4,4,4")  # frames,rows,cols
    pad_mode: str = os.getenv("STSA_PAD_MODE", "error")
    heads: int = int(os.getenv("STSA_HEADS", "1"))
    residual: bool = os.getenv("STSA_RESIDUAL", "true").lower() in ("true", "1", "yes")

    # Full attention refuses more tokens than this
    token_cap: int = int(os.getenv("STSA_TOKEN_CAP", "4096"))

    # Harness
    out_dir: str = os.getenv("STSA_OUT_DIR", "runs")
    log_level: str = os.getenv("STSA_LOG_LEVEL", "INFO")
    sweep_workers: int = int(os.getenv("STSA_SWEEP_WORKERS", "1"))

    # HTTP surface
    api_host: str = os.getenv("STSA_API_HOST", "127.0.0.1")
    api_port: int = int(os.getenv("STSA_API_PORT", "8000"))

    @field_validator("precision")
    @classmethod
    def _check_precision(cls, value: str) -> str:
        if value not in ("single", "double"):
            raise ValueError(f"precision must be 'single' or 'double', got {value!r}")
        return value

    @field_validator("pad_mode")
    @classmethod
    def _check_pad_mode(cls, value: str) -> str:
        if value not in ("error", "replicate"):
            raise ValueError(f"pad_mode must be 'error' or 'replicate', got {value!r}")
        return value

    @field_validator("heads", "token_cap", "sweep_workers")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be a positive integer")
        return value

    @property
    def dtype(self) -> np.dtype:
        """Floating dtype selected by the precision setting."""
        return np.dtype(np.float64 if self.precision == "double" else np.float32)

    @property
    def padding(self) -> bool:
        return self.pad_mode == "replicate"

settings = Settings()


def override_settings(base: Settings, **updates) -> Settings:
    """
    Return a validated copy of ``base`` with ``updates`` applied.

    None values are ignored so CLI flags that were not given keep the
    environment defaults.
    """
    data = base.model_dump()
    data.update({k: v for k, v in updates.items() if v is not None})
    try:
        return Settings.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid settings: {e.errors()[0]['msg']}") from e
