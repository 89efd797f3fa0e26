"""Partition of the frames x rows x cols grid into subspaces."""
import hashlib
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from stsa.core.errors import DimensionError


@dataclass(frozen=True)
class SubspacePartition:
    """
    Provenance of a split: original grid, padded grid and window size.

    Windows are numbered row-major over (f, h, w) window coordinates of the
    padded grid; tokens inside a window are ordered (f, h, w) row-major.
    """
    grid: tuple[int, int, int]
    padded_grid: tuple[int, int, int]
    window: tuple[int, int, int]

    @property
    def counts(self) -> tuple[int, int, int]:
        return tuple(p // s for p, s in zip(self.padded_grid, self.window))

    @property
    def num_blocks(self) -> int:
        nf, nh, nw = self.counts
        return nf * nh * nw

    @property
    def block_size(self) -> int:
        sf, sh, sw = self.window
        return sf * sh * sw

    @property
    def padded(self) -> bool:
        return self.grid != self.padded_grid

    @property
    def key(self) -> str:
        """Checksum identifying this partition."""
        text = f"{self.grid}|{self.padded_grid}|{self.window}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    @property
    def ranges(self) -> list[tuple[range, range, range]]:
        """Index ranges (frames, rows, cols) of every window, in block order."""
        nf, nh, nw = self.counts
        sf, sh, sw = self.window
        return [
            (range(i * sf, (i + 1) * sf), range(j * sh, (j + 1) * sh), range(k * sw, (k + 1) * sw))
            for i in range(nf)
            for j in range(nh)
            for k in range(nw)
        ]


@dataclass(frozen=True, eq=False)
class SubspaceBlocks:
    """
    Token blocks [N, n, C] produced by a split.

    ``block_ids`` records which window every row came from; reordering the
    blocks through ``take`` reorders the ids, so a merge can detect it.
    """
    tokens: np.ndarray
    block_ids: tuple[int, ...]
    partition_key: str

    def __post_init__(self):
        if self.tokens.ndim != 3:
            raise DimensionError(f"blocks must be [N, n, C], got {self.tokens.shape}")
        if len(self.block_ids) != self.tokens.shape[0]:
            raise DimensionError("one block id per block is required")

    def __len__(self) -> int:
        return self.tokens.shape[0]

    def __getitem__(self, index: int) -> np.ndarray:
        return self.tokens[index]

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "SubspaceBlocks":
        """Apply ``fn`` to the whole [N, n, C] token array, keeping provenance."""
        out = np.asarray(fn(self.tokens))
        if out.shape[:2] != self.tokens.shape[:2]:
            raise DimensionError(f"block map changed block layout {self.tokens.shape} -> {out.shape}")
        return replace(self, tokens=out)

    def take(self, order) -> "SubspaceBlocks":
        order = np.asarray(order, dtype=np.int64)
        return replace(
            self,
            tokens=self.tokens[order],
            block_ids=tuple(self.block_ids[i] for i in order.tolist()),
        )
