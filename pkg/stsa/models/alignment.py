"""Realized Subspace Align maps."""
import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from stsa.core.errors import DimensionError


@dataclass(frozen=True, eq=False)
class FramePermutation:
    """
    Cell relocation for one frame, as flat row-major cell indices.

    Align writes the content of ``sources[i]`` to ``targets[i]``. The moved
    cells form a permutation of themselves (same set of sources and
    targets); every other cell is untouched.
    """
    frame: int
    sources: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        src = np.array(self.sources, dtype=np.int64, copy=True).reshape(-1)
        tgt = np.array(self.targets, dtype=np.int64, copy=True).reshape(-1)
        if src.shape != tgt.shape:
            raise DimensionError("sources and targets must pair up")
        if np.unique(src).size != src.size:
            raise DimensionError(f"frame {self.frame}: sources must be pairwise distinct")
        if np.unique(tgt).size != tgt.size:
            raise DimensionError(f"frame {self.frame}: targets must be pairwise distinct")
        if not np.array_equal(np.sort(src), np.sort(tgt)):
            raise DimensionError(f"frame {self.frame}: moved cells must map onto themselves")
        src.flags.writeable = False
        tgt.flags.writeable = False
        object.__setattr__(self, "sources", src)
        object.__setattr__(self, "targets", tgt)

    @property
    def size(self) -> int:
        return int(self.sources.size)

    @classmethod
    def identity(cls, frame: int) -> "FramePermutation":
        empty = np.zeros(0, dtype=np.int64)
        return cls(frame, empty, empty)


@dataclass(frozen=True, eq=False)
class AlignmentMap:
    """Align maps of one temporal window [b, e] toward reference frame r."""
    window: tuple[int, int]
    reference: int
    height: int
    width: int
    frames: tuple[FramePermutation, ...]

    def __post_init__(self):
        b, e = self.window
        frames = tuple(self.frames)
        if [p.frame for p in frames] != list(range(b, e + 1)):
            raise DimensionError(f"window {self.window} needs one permutation per frame in order")
        if not b <= self.reference <= e:
            raise DimensionError(f"reference {self.reference} outside window {self.window}")
        cells = self.height * self.width
        for perm in frames:
            if perm.size and (perm.sources.min() < 0 or perm.sources.max() >= cells):
                raise DimensionError(f"frame {perm.frame}: cell index outside {self.height}x{self.width}")
        if frames[self.reference - b].size:
            raise DimensionError("reference frame map must be the identity")
        object.__setattr__(self, "frames", frames)

    def for_frame(self, frame: int) -> FramePermutation:
        return self.frames[frame - self.window[0]]

    def untouched(self, frame: int) -> np.ndarray:
        """Flat indices of cells the map leaves in place."""
        moved = self.for_frame(frame).sources
        return np.setdiff1d(np.arange(self.height * self.width), moved)

    @property
    def is_identity(self) -> bool:
        return all(p.size == 0 for p in self.frames)

    @property
    def checksum(self) -> str:
        digest = hashlib.sha256()
        digest.update(f"{self.window}|{self.reference}|{self.height}x{self.width}".encode())
        for perm in self.frames:
            digest.update(perm.frame.to_bytes(4, "little"))
            digest.update(perm.sources.tobytes())
            digest.update(perm.targets.tobytes())
        return digest.hexdigest()[:16]


def maps_checksum(maps: Sequence[AlignmentMap]) -> str:
    """Checksum of an ordered list of window maps."""
    digest = hashlib.sha256()
    for amap in maps:
        digest.update(amap.checksum.encode())
    return digest.hexdigest()[:16]
