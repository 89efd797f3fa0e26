"""MFL1 binary flow files."""
import numpy as np

from stsa.core.errors import FlowError, FormatError, StsaError, UnsupportedVersionError
from stsa.models.flow import FlowField, FlowSet
from stsa.repositories.base_repository import BaseRepository

MAGIC = b"MFL1"
ADJACENT_ONLY = 1
WITH_DIRECT = 2
PAYLOAD = np.dtype("<f4")


class FlowRepository(BaseRepository[FlowSet]):
    """
    Version 1: magic, u32 version, frames, H, W, then forward-then-backward
    [H, W, 2] float32 fields per adjacent pair. Version 2 appends u32 count
    and (u32 i, u32 j, field) records of direct pairs.
    """

    def dumps(self, item: FlowSet) -> bytes:
        if item.is_shifted:
            raise FlowError("only unshifted flows can be saved")
        version = WITH_DIRECT if item.direct else ADJACENT_ONLY
        parts = [MAGIC, np.array([version, item.frames, item.height, item.width], dtype="<u4").tobytes()]
        for fwd, bwd in zip(item.forward, item.backward):
            parts.append(fwd.disp.astype(PAYLOAD).tobytes())
            parts.append(bwd.disp.astype(PAYLOAD).tobytes())
        if version == WITH_DIRECT:
            parts.append(np.array([len(item.direct)], dtype="<u4").tobytes())
            for (i, j), field in sorted(item.direct.items()):
                parts.append(np.array([i, j], dtype="<u4").tobytes())
                parts.append(field.disp.astype(PAYLOAD).tobytes())
        return b"".join(parts)

    def loads(self, data: bytes) -> FlowSet:
        if data[:4] != MAGIC:
            raise FormatError("bad MFL1 magic")
        if len(data) < 20:
            raise FormatError("truncated MFL1 header")
        version, frames, height, width = (int(v) for v in np.frombuffer(data, dtype="<u4", count=4, offset=4))
        if version not in (ADJACENT_ONLY, WITH_DIRECT):
            raise UnsupportedVersionError(f"MFL1 version {version} is not supported")
        if min(frames, height, width) < 1:
            raise FormatError(f"invalid MFL1 dims {(frames, height, width)}")
        field_bytes = height * width * 2 * PAYLOAD.itemsize
        pos = 20

        def read_field(offset: int) -> np.ndarray:
            if len(data) < offset + field_bytes:
                raise FormatError(f"truncated MFL1 payload at byte {offset}")
            disp = np.frombuffer(data, dtype=PAYLOAD, count=height * width * 2, offset=offset)
            return disp.reshape(height, width, 2).astype(np.float32)

        def read_u32(offset: int, count: int) -> list[int]:
            if len(data) < offset + 4 * count:
                raise FormatError(f"truncated MFL1 record at byte {offset}")
            return [int(v) for v in np.frombuffer(data, dtype="<u4", count=count, offset=offset)]

        forward, backward = [], []
        for k in range(frames - 1):
            forward.append((k, k + 1, read_field(pos)))
            backward.append((k + 1, k, read_field(pos + field_bytes)))
            pos += 2 * field_bytes
        direct = []
        if version == WITH_DIRECT:
            (count,) = read_u32(pos, 1)
            pos += 4
            for _ in range(count):
                i, j = read_u32(pos, 2)
                direct.append((i, j, read_field(pos + 8)))
                pos += 8 + field_bytes
        if pos != len(data):
            raise FormatError(f"{len(data) - pos} trailing bytes in MFL1 file")
        try:
            return FlowSet(
                frames, height, width,
                tuple(FlowField(*f) for f in forward),
                tuple(FlowField(*f) for f in backward),
                {(i, j): FlowField(i, j, d) for i, j, d in direct},
            )
        except StsaError as e:
            raise FormatError(f"invalid MFL1 content: {e.detail}") from e
