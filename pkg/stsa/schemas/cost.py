"""Attention cost request/response schemas."""
from typing import Literal

from pydantic import BaseModel, Field

from stsa.schemas.subspace import SubspaceSpec

AttentionMode = Literal[
    "subspace",
    "temporal",
    "crossframe-first",
    "crossframe-middle",
    "crossframe-previous",
    "crossframe-all",
    "full",
]


class CostRequest(BaseModel):
    """Request schema for a closed-form cost estimate."""
    mode: AttentionMode = Field("subspace", description="Attention variant")
    frames: int = Field(16, ge=1, example=16)
    height: int = Field(16, ge=1, example=16)
    width: int = Field(16, ge=1, example=16)
    channels: int = Field(64, ge=1, example=64)
    dim: int = Field(64, ge=1, example=64, description="Attention width d")
    heads: int = Field(1, ge=1, example=1)
    subspace: SubspaceSpec | None = Field(None, description="Required for mode=subspace")

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "mode": "subspace", "frames": 16, "height": 16, "width": 16,
                    "channels": 64, "dim": 64, "heads": 1,
                    "subspace": {"s_f": 4, "s_h": 4, "s_w": 4},
                }
            ]
        }
    }


class CostReport(BaseModel):
    """Multiply-accumulate counts of one attention variant."""
    mode: AttentionMode
    frames: int
    height: int
    width: int
    channels: int
    dim: int
    heads: int
    subspace: str | None = Field(None, description="Window as 'f,h,w' for subspace mode")
    projection_macs: int = Field(..., ge=0)
    score_macs: int = Field(..., ge=0)
    value_macs: int = Field(..., ge=0)
    attention_macs: int = Field(..., ge=0, description="score + value")
    total_macs: int = Field(..., ge=0)
    peak_token_buffer: int = Field(..., ge=0, description="Largest key/value span of any query")
