"""STSA block and toy-training configuration."""
from pydantic import BaseModel, Field

from stsa.schemas.subspace import SubspaceSpec


class BlockConfig(BaseModel):
    """Configuration of one STSA block as used by the harness."""
    subspace: SubspaceSpec = Field(default_factory=SubspaceSpec)
    dim: int | None = Field(None, ge=1, description="Attention width d; defaults to the channel count")
    heads: int = Field(1, ge=1)
    aligned: bool = Field(True, description="Use motion-flow Subspace Align & Restore")
    shifted: bool = Field(False, description="Apply the half-window Subspace Shift")
    residual: bool = Field(False, description="Add the block input back to the attention output")
    beta: float = Field(0.1, ge=0.0, le=1.0, description="Forward-noise variance for the noised input")
    init_scale: float = Field(0.1, ge=0.0, description="Std of the random part of initial projections")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"subspace": {"s_f": 4, "s_h": 4, "s_w": 4}, "heads": 1, "aligned": True, "beta": 0.1}
            ]
        }
    }
