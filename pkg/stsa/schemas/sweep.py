"""Sweep request schema."""
from pydantic import BaseModel, Field

from stsa.schemas.scene import SceneSpec
from stsa.schemas.subspace import SubspaceSpec


def default_sizes() -> list[SubspaceSpec]:
    return [SubspaceSpec(s_f=4, s_h=2, s_w=2), SubspaceSpec(s_f=4, s_h=4, s_w=4), SubspaceSpec(s_f=8, s_h=4, s_w=4)]


class SweepRequest(BaseModel):
    """Subspace sizes to sweep over one synthetic scene."""
    sizes: list[SubspaceSpec] = Field(default_factory=default_sizes, min_length=1)
    scene: SceneSpec = Field(default_factory=SceneSpec)
    seed: int = Field(0, description="Scene and parameter seed")
    dim: int | None = Field(None, ge=1, description="Attention width d; defaults to the channel count")
