"""Pose JSON files."""
import numpy as np
from pydantic import ValidationError

from stsa.core.errors import FormatError, StsaError
from stsa.models.latent import PoseSequence
from stsa.repositories.base_repository import BaseRepository
from stsa.schemas.pose import PoseFile, PoseFrame


class PoseRepository(BaseRepository[PoseSequence]):
    """
    ``{"frames": [{"keypoints": [[x, y], ...], "visible": [...]}], "width": W, "height": H}``.
    Missing bounds fall back to ``default_width``/``default_height``.
    """

    def __init__(self, default_width: int | None = None, default_height: int | None = None):
        self.default_width = default_width
        self.default_height = default_height

    def dumps(self, item: PoseSequence) -> bytes:
        doc = PoseFile(
            frames=[
                PoseFrame(keypoints=[tuple(p) for p in kp.tolist()], visible=vis.tolist())
                for kp, vis in zip(item.keypoints, item.visible)
            ],
            width=item.width,
            height=item.height,
        )
        return doc.model_dump_json(indent=2).encode()

    def loads(self, data: bytes) -> PoseSequence:
        try:
            doc = PoseFile.model_validate_json(data)
        except ValidationError as e:
            raise FormatError(f"invalid pose file: {e.errors()[0]['msg']}") from e
        width = doc.width or self.default_width
        height = doc.height or self.default_height
        if width is None or height is None:
            raise FormatError("pose file has no frame bounds and no default was given")
        count = len(doc.frames[0].keypoints)
        keypoints = np.array([f.keypoints for f in doc.frames], dtype=np.float64).reshape(len(doc.frames), count, 2)
        visible = np.array([f.visible for f in doc.frames], dtype=bool).reshape(len(doc.frames), count)
        try:
            return PoseSequence(keypoints, visible, width, height)
        except StsaError as e:
            raise FormatError(f"invalid pose file: {e.detail}") from e
