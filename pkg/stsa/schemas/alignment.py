"""JSON dump of realized alignment maps."""
from pydantic import BaseModel, Field


class FrameMapDump(BaseModel):
    frame: int
    pairs: list[tuple[int, int]] = Field(default_factory=list, description="(src, tgt) flat row-major cells")


class WindowMapDump(BaseModel):
    window: tuple[int, int]
    reference: int
    height: int
    width: int
    checksum: str
    frames: list[FrameMapDump]


class AlignmentDump(BaseModel):
    maps: list[WindowMapDump] = Field(default_factory=list)
