"""Synthetic scene request schemas."""
from typing import Literal

from pydantic import BaseModel, Field, model_validator


class SceneObject(BaseModel):
    """A rigid moving object with its own random texture."""
    shape: Literal["square", "blob"] = Field("square", description="Square patch or disc-shaped blob")
    size: int = Field(4, ge=1, description="Side length (square) or diameter (blob) in cells")
    velocity: tuple[int, int] = Field((1, 0), description="Per-frame motion (vx, vy) in cells")
    pattern: Literal["linear", "alternate"] = Field(
        "alternate", description="linear repeats `velocity`; alternate flips its sign every frame"
    )
    velocities: list[tuple[int, int]] | None = Field(
        None, description="Per-frame motion overriding `velocity`; length frames - 1"
    )
    start: tuple[int, int] | None = Field(
        None, description="Top-left (x, y) in frame 0; chosen from the seed when omitted"
    )

    def motion(self, frames: int) -> list[tuple[int, int]]:
        """Per-step velocities for a clip of ``frames`` frames."""
        if self.velocities is not None:
            return [tuple(v) for v in self.velocities]
        vx, vy = self.velocity
        if self.pattern == "alternate":
            return [(vx, vy) if k % 2 == 0 else (-vx, -vy) for k in range(frames - 1)]
        return [(vx, vy)] * (frames - 1)


class SceneSpec(BaseModel):
    """Latent-video scene: textured static background plus rigid movers."""
    frames: int = Field(16, ge=1)
    height: int = Field(16, ge=1)
    width: int = Field(16, ge=1)
    channels: int = Field(8, ge=1)
    objects: list[SceneObject] = Field(default_factory=lambda: [SceneObject()])
    texture_seed: int = Field(0, description="Seed of the background texture")
    background_amplitude: float = Field(1.0, ge=0.0, description="Scale of the background texture")
    wrap: bool = Field(False, description="Objects wrap around the grid instead of staying in bounds")
    direct_pairs: bool = Field(
        True, description="Also emit exact flows for every non-adjacent frame pair"
    )

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "frames": 16, "height": 16, "width": 16, "channels": 8,
                    "objects": [{"shape": "square", "size": 4, "velocity": [1, 0]}],
                    "texture_seed": 0,
                }
            ]
        }
    }

    @model_validator(mode="after")
    def _check_motion_lengths(self):
        for i, obj in enumerate(self.objects):
            if obj.velocities is not None and len(obj.velocities) != self.frames - 1:
                raise ValueError(
                    f"object {i}: velocities needs {self.frames - 1} entries, got {len(obj.velocities)}"
                )
            if obj.size > min(self.height, self.width):
                raise ValueError(f"object {i}: size {obj.size} does not fit a {self.height}x{self.width} grid")
        return self
