"""LVT1 binary tensors: latent videos, projection parameters and PGM previews."""
from pathlib import Path

import numpy as np

from stsa.core.errors import DimensionError, FormatError, StsaError
from stsa.models.attention import AttentionParams
from stsa.models.latent import LatentVideo
from stsa.repositories.base_repository import BaseRepository

MAGIC = b"LVT1"
DTYPE_TAGS = {1: np.dtype("<f4"), 2: np.dtype("<f8")}
MAX_RANK = 8


def encode_record(array: np.ndarray) -> bytes:
    """magic, u32 rank, u32 dims, u8 dtype tag, row-major little-endian payload."""
    array = np.asarray(array)
    if array.dtype == np.float32:
        tag = 1
    elif array.dtype == np.float64:
        tag = 2
    else:
        raise FormatError(f"LVT1 stores float32/float64, got {array.dtype}")
    header = np.array([array.ndim, *array.shape], dtype="<u4").tobytes()
    payload = np.ascontiguousarray(array, dtype=DTYPE_TAGS[tag]).tobytes()
    return MAGIC + header + bytes([tag]) + payload


def decode_record(data: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Parse one record at ``offset``; returns the array and the offset after it."""
    if data[offset:offset + 4] != MAGIC:
        raise FormatError(f"bad LVT1 magic at byte {offset}")
    pos = offset + 4
    if len(data) < pos + 4:
        raise FormatError("truncated LVT1 header")
    rank = int(np.frombuffer(data, dtype="<u4", count=1, offset=pos)[0])
    if not 1 <= rank <= MAX_RANK:
        raise FormatError(f"unsupported LVT1 rank {rank}")
    pos += 4
    if len(data) < pos + 4 * rank + 1:
        raise FormatError("truncated LVT1 dims")
    dims = tuple(int(d) for d in np.frombuffer(data, dtype="<u4", count=rank, offset=pos))
    pos += 4 * rank
    tag = data[pos]
    pos += 1
    if tag not in DTYPE_TAGS:
        raise FormatError(f"unknown LVT1 dtype tag {tag}")
    dtype = DTYPE_TAGS[tag]
    count = int(np.prod(dims))
    end = pos + count * dtype.itemsize
    if len(data) < end:
        raise FormatError(f"truncated LVT1 payload: need {end - pos} bytes, have {len(data) - pos}")
    array = np.frombuffer(data, dtype=dtype, count=count, offset=pos).reshape(dims)
    return array.astype(dtype.newbyteorder("="), copy=True), end


class TensorRepository(BaseRepository[LatentVideo]):
    """One LVT1 record holding a rank-4 latent video."""

    def dumps(self, item: LatentVideo) -> bytes:
        return encode_record(item.data)

    def loads(self, data: bytes) -> LatentVideo:
        array, end = decode_record(data)
        if end != len(data):
            raise FormatError(f"{len(data) - end} trailing bytes after LVT1 record")
        if array.ndim != 4:
            raise FormatError(f"latent video must be rank 4, got rank {array.ndim}")
        try:
            return LatentVideo(array)
        except StsaError as e:
            raise FormatError(f"invalid latent video: {e.detail}") from e

    def save_pgm_sequence(self, video: LatentVideo, directory: str | Path, channel: int = 0) -> list[Path]:
        """
        Channel ``channel`` of every frame as binary PGM (P5), min-max scaled
        to 0..255 over the whole clip.
        """
        if not 0 <= channel < video.channels:
            raise DimensionError(f"channel {channel} outside {video.channels} channels")
        plane = video.data[..., channel].astype(np.float64)
        lo, hi = plane.min(), plane.max()
        scaled = np.zeros_like(plane) if hi == lo else (plane - lo) / (hi - lo) * 255.0
        pixels = np.rint(scaled).astype(np.uint8)
        directory = Path(directory)
        paths = []
        for k in range(video.frames):
            header = f"P5\n{video.width} {video.height}\n255\n".encode("ascii")
            paths.append(_BytesRepository().save(header + pixels[k].tobytes(), directory / f"frame_{k:04d}.pgm"))
        return paths


class ParamsRepository(BaseRepository[AttentionParams]):
    """Four consecutive LVT1 records: W_q, W_k, W_v, W_o. The head count is not stored."""

    def __init__(self, heads: int = 1):
        self.heads = heads

    def dumps(self, item: AttentionParams) -> bytes:
        return b"".join(encode_record(m) for m in item.matrices())

    def loads(self, data: bytes) -> AttentionParams:
        mats, offset = [], 0
        for name in ("W_q", "W_k", "W_v", "W_o"):
            if offset >= len(data):
                raise FormatError(f"params file ends before {name}")
            mat, offset = decode_record(data, offset)
            mats.append(mat)
        if offset != len(data):
            raise FormatError(f"{len(data) - offset} trailing bytes after params records")
        try:
            return AttentionParams(*mats, heads=self.heads)
        except StsaError as e:
            raise FormatError(f"invalid attention params: {e.detail}") from e


class _BytesRepository(BaseRepository[bytes]):
    def dumps(self, item: bytes) -> bytes:
        return item

    def loads(self, data: bytes) -> bytes:
        return data
