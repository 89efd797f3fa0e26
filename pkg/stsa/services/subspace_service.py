"""Subspace split/merge and the half-window cyclic shift."""
import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from stsa.core.config import Settings, settings as default_settings
from stsa.core.errors import DimensionError, PartitionMismatchError
from stsa.core.service_decorator import service_method
from stsa.models.latent import LatentVideo
from stsa.models.partition import SubspaceBlocks, SubspacePartition
from stsa.schemas.subspace import SubspaceSpec

logger = logging.getLogger(__name__)


class SubspaceService:
    """
    Service layer for partitioning the global space X into windows.
    Non-divisible grids are an error unless replicate padding is enabled.
    """

    def __init__(self, settings: Settings = None):
        self.settings = settings or default_settings

    def partition_for(self, grid: tuple[int, int, int], spec: SubspaceSpec) -> SubspacePartition:
        """Partition of ``grid`` by ``spec``, padded up when padding is enabled."""
        if not spec.divides(*grid):
            if not self.settings.padding:
                raise DimensionError(f"grid {grid} is not divisible by subspace {spec.window}")
            padded = tuple(-(-g // s) * s for g, s in zip(grid, spec.window))
            return SubspacePartition(tuple(grid), padded, spec.window)
        return SubspacePartition(tuple(grid), tuple(grid), spec.window)

    @service_method
    def split(self, x: LatentVideo, spec: SubspaceSpec) -> tuple[SubspaceBlocks, SubspacePartition]:
        """
        Split [F, H, W, C] into N blocks of n = s_f*s_h*s_w tokens.

        Blocks are numbered row-major over window coordinates and tokens are
        (f, h, w) row-major inside a block.
        """
        partition = self.partition_for(x.grid, spec)
        data = x.data
        if partition.padded:
            pads = [(0, p - g) for p, g in zip(partition.padded_grid, partition.grid)] + [(0, 0)]
            data = np.pad(data, pads, mode="edge")
            logger.debug(f"Padded {partition.grid} to {partition.padded_grid} for split")
        nf, nh, nw = partition.counts
        sf, sh, sw = partition.window
        c = x.channels
        tokens = (
            data.reshape(nf, sf, nh, sh, nw, sw, c)
            .transpose(0, 2, 4, 1, 3, 5, 6)
            .reshape(partition.num_blocks, partition.block_size, c)
        )
        blocks = SubspaceBlocks(np.ascontiguousarray(tokens), tuple(range(partition.num_blocks)), partition.key)
        return blocks, partition

    @service_method
    def merge(self, blocks: SubspaceBlocks | np.ndarray, partition: SubspacePartition) -> LatentVideo:
        """
        Inverse of split.

        A ``SubspaceBlocks`` must come from ``partition`` and keep its block
        order; a raw [N, n, C] array is taken to be in partition order.
        """
        if isinstance(blocks, SubspaceBlocks):
            if blocks.partition_key != partition.key:
                raise PartitionMismatchError("blocks were split with a different partition")
            if blocks.block_ids != tuple(range(partition.num_blocks)):
                raise PartitionMismatchError("block order does not match the partition checksum")
            tokens = blocks.tokens
        else:
            tokens = np.asarray(blocks)
        if tokens.ndim != 3 or tokens.shape[:2] != (partition.num_blocks, partition.block_size):
            raise DimensionError(
                f"expected blocks of shape [{partition.num_blocks}, {partition.block_size}, C], got {tokens.shape}"
            )
        nf, nh, nw = partition.counts
        sf, sh, sw = partition.window
        c = tokens.shape[2]
        data = (
            tokens.reshape(nf, nh, nw, sf, sh, sw, c)
            .transpose(0, 3, 1, 4, 2, 5, 6)
            .reshape(*partition.padded_grid, c)
        )
        if partition.padded:
            f, h, w = partition.grid
            data = data[:f, :h, :w]
        return LatentVideo(data)

    @service_method
    def shift(self, x: LatentVideo, spec: SubspaceSpec) -> LatentVideo:
        """Cyclic roll by (s_f//2, s_h//2, s_w//2) along (f, h, w)."""
        return LatentVideo(np.roll(x.data, spec.shift, axis=(0, 1, 2)), x.provenance)

    @service_method
    def unshift(self, x: LatentVideo, spec: SubspaceSpec) -> LatentVideo:
        return LatentVideo(np.roll(x.data, tuple(-s for s in spec.shift), axis=(0, 1, 2)), x.provenance)

    def subspace_of(
        self, f: int, h: int, w: int, spec: SubspaceSpec,
        grid: tuple[int, int, int], shifted: bool = False,
    ) -> int:
        """
        Index of the window holding position (f, h, w).

        Under the shifted partition a position is looked up where the shift
        moved it, i.e. at (p + shift) mod grid.
        """
        pos = (f, h, w)
        if not all(0 <= p < g for p, g in zip(pos, grid)):
            raise DimensionError(f"position {pos} outside grid {grid}")
        partition = self.partition_for(grid, spec)
        if shifted:
            pos = tuple((p + s) % g for p, s, g in zip(pos, spec.shift, grid))
        nf, nh, nw = partition.counts
        i, j, k = (p // s for p, s in zip(pos, spec.window))
        return (i * nh + j) * nw + k

    def connectivity(self, grid: tuple[int, int, int], spec: SubspaceSpec) -> int:
        """
        Number of connected components of the union graph where positions
        are adjacent iff they share a window in the unshifted or the shifted
        partition.
        """
        if not spec.divides(*grid):
            raise DimensionError(f"grid {grid} is not divisible by subspace {spec.window}")
        f, h, w = grid
        total = f * h * w
        positions = np.arange(total).reshape(grid)
        sf, sh, sw = spec.window
        rows, cols = [], []
        for shifted in (False, True):
            # a position's content sits at (p + shift) after the roll
            ids = np.roll(positions, spec.shift, axis=(0, 1, 2)) if shifted else positions
            windows = (
                ids.reshape(f // sf, sf, h // sh, sh, w // sw, sw)
                .transpose(0, 2, 4, 1, 3, 5)
                .reshape(-1, sf * sh * sw)
            )
            # star edges from each window's first member
            rows.append(np.repeat(windows[:, 0], windows.shape[1]))
            cols.append(windows.reshape(-1))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(total, total))
        count, _ = connected_components(graph, directed=False)
        return int(count)
