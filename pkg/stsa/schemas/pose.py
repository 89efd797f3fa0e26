"""Pose JSON schema: {"frames": [{"keypoints": [[x, y], ...], "visible": [true, ...]}]}."""
from pydantic import BaseModel, Field, model_validator


class PoseFrame(BaseModel):
    keypoints: list[tuple[float, float]] = Field(..., description="Keypoint pixel coordinates (x, y)")
    visible: list[bool] = Field(..., description="Visibility flag per keypoint")

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.keypoints) != len(self.visible):
            raise ValueError("keypoints and visible must have the same length")
        return self


class PoseFile(BaseModel):
    frames: list[PoseFrame] = Field(..., min_length=1)
    width: int | None = Field(None, ge=1, description="Frame width the coordinates refer to")
    height: int | None = Field(None, ge=1, description="Frame height the coordinates refer to")

    @model_validator(mode="after")
    def _check_keypoint_count(self):
        counts = {len(f.keypoints) for f in self.frames}
        if len(counts) > 1:
            raise ValueError(f"every frame needs the same keypoint count, got {sorted(counts)}")
        return self
