"""Motion-flow Subspace Align and Restore."""
import logging
from typing import Sequence

import numpy as np

from stsa.core.config import Settings, settings as default_settings
from stsa.core.errors import AlignmentMismatchError, DimensionError, FlowError
from stsa.core.service_decorator import service_method
from stsa.core.timing import timed
from stsa.models.alignment import AlignmentMap, FramePermutation, maps_checksum
from stsa.models.flow import FlowSet
from stsa.models.latent import LatentVideo
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.flow_service import FlowService, warp_indices

logger = logging.getLogger(__name__)


def realize_permutation(frame: int, disp: np.ndarray) -> FramePermutation:
    """
    Turn per-cell warp targets into a collision-free permutation.

    Cells whose target is themselves make no claim. Movers claim targets by
    ascending magnitude of their flow displacement (before rounding and
    clamping), ties by row-major index, first claim wins.
    Cells overwritten without moving are relocated into the cells vacated
    by winners, both sets taken in row-major order.
    """
    height, width = disp.shape[:2]
    ty, tx = warp_indices(disp)
    src = np.arange(height * width)
    tgt = (ty * width + tx).reshape(-1)
    movers = src[tgt != src]
    if movers.size == 0:
        return FramePermutation.identity(frame)
    sq = (disp[..., 0] ** 2 + disp[..., 1] ** 2).reshape(-1)[movers]
    order = np.lexsort((movers, sq))
    claimed = tgt[movers[order]]
    _, first = np.unique(claimed, return_index=True)
    winners = movers[order][first]
    won = claimed[first]
    displaced = np.setdiff1d(won, winners)
    vacated = np.setdiff1d(winners, won)
    sources = np.concatenate([winners, displaced])
    targets = np.concatenate([won, vacated])
    by_source = np.argsort(sources, kind="stable")
    return FramePermutation(frame, sources[by_source], targets[by_source])


class AlignService:
    """
    Service layer for Subspace Align & Restore.
    Alignment is global over rows and cols and windowed over frames.
    """

    def __init__(self, flow_service: FlowService = None, settings: Settings = None):
        self.flow_service = flow_service or FlowService()
        self.settings = settings or default_settings

    def reference_frame(self, b: int, e: int) -> int:
        """Central frame floor((b + e) / 2) of the temporal window [b, e]."""
        if b < 0 or b > e:
            raise DimensionError(f"invalid temporal window ({b}, {e})")
        return (b + e) // 2

    def temporal_windows(self, frames: int, s_f: int) -> list[tuple[int, int]]:
        if s_f < 1:
            raise DimensionError(f"s_f must be positive, got {s_f}")
        if frames % s_f and not self.settings.padding:
            raise DimensionError(f"{frames} frames are not divisible by s_f={s_f}")
        return [(b, min(b + s_f, frames) - 1) for b in range(0, frames, s_f)]

    @timed("align", log_performance=False)
    @service_method
    def compute_alignment(
        self, flows: FlowSet, grid: tuple[int, int, int], s_f: int,
    ) -> list[AlignmentMap]:
        """One AlignmentMap per temporal window, toward its reference frame."""
        frames, height, width = grid
        if flows.frames != frames:
            raise FlowError(f"flows cover {flows.frames} frames, tensor has {frames}")
        if flows.resolution != (height, width):
            raise FlowError(f"flow resolution {flows.resolution} does not match grid {(height, width)}")
        maps = []
        for b, e in self.temporal_windows(frames, s_f):
            r = self.reference_frame(b, e)
            perms = []
            for k in range(b, e + 1):
                if k == r:
                    perms.append(FramePermutation.identity(k))
                    continue
                field = self.flow_service.flow_between(flows, k, r)
                perms.append(realize_permutation(k, field.disp))
            maps.append(AlignmentMap((b, e), r, height, width, tuple(perms)))
        moved = sum(p.size for m in maps for p in m.frames)
        logger.debug(f"Computed {len(maps)} alignment maps, {moved} relocated cells")
        return maps

    def _check_grid(self, x: LatentVideo, maps: Sequence[AlignmentMap]) -> None:
        covered = [k for m in maps for k in range(m.window[0], m.window[1] + 1)]
        if covered != list(range(x.frames)):
            raise DimensionError(f"maps cover frames {covered[:1]}..{covered[-1:]}, tensor has {x.frames}")
        for amap in maps:
            if (amap.height, amap.width) != (x.height, x.width):
                raise DimensionError(
                    f"map grid {(amap.height, amap.width)} does not match tensor {(x.height, x.width)}"
                )

    @service_method
    def align(self, x: LatentVideo, maps: Sequence[AlignmentMap]) -> LatentVideo:
        """output[k, tgt] = input[k, src] for every realized pair; stamped with the maps' checksum."""
        self._check_grid(x, maps)
        src_cells = x.data.reshape(x.frames, -1, x.channels)
        out = src_cells.copy()
        for amap in maps:
            for perm in amap.frames:
                if perm.size:
                    out[perm.frame, perm.targets] = src_cells[perm.frame, perm.sources]
        return LatentVideo(out.reshape(x.shape), provenance=maps_checksum(maps))

    @service_method
    def restore(
        self, x_aligned: LatentVideo, maps: Sequence[AlignmentMap], checksum: str | None = None,
    ) -> LatentVideo:
        """
        Inverse of align.

        The tensor's provenance, or ``checksum`` when given, must match the
        maps; an unstamped tensor without a checksum is trusted.
        """
        expected = checksum or x_aligned.provenance
        actual = maps_checksum(maps)
        if expected is not None and expected != actual:
            raise AlignmentMismatchError(f"tensor was aligned with maps {expected}, got {actual}")
        self._check_grid(x_aligned, maps)
        cells = x_aligned.data.reshape(x_aligned.frames, -1, x_aligned.channels)
        out = cells.copy()
        for amap in maps:
            for perm in amap.frames:
                if perm.size:
                    out[perm.frame, perm.sources] = cells[perm.frame, perm.targets]
        return LatentVideo(out.reshape(x_aligned.shape))

    def shift_flows(self, flows: FlowSet, spec: SubspaceSpec) -> FlowSet:
        """Shifted view: frame pairing and grid rolled by the half-window shift."""
        return self._with_offset(flows, spec.shift)

    def unshift_flows(self, flows: FlowSet, spec: SubspaceSpec) -> FlowSet:
        return self._with_offset(flows, tuple(-s for s in spec.shift))

    def _with_offset(self, flows: FlowSet, delta: tuple[int, int, int]) -> FlowSet:
        sizes = (flows.frames, flows.height, flows.width)
        offset = tuple((o + d) % n for o, d, n in zip(flows.offset, delta, sizes))
        return FlowSet(
            flows.frames, flows.height, flows.width,
            flows.forward, flows.backward, flows.direct, offset,
        )

    @service_method
    def window_variation(self, x: LatentVideo, s_f: int, mask: np.ndarray | None = None) -> float:
        """
        Mean over temporal windows and cells of the channel-summed variance
        across the window's frames.

        ``mask`` is an optional [F, H, W] boolean array; a cell counts for a
        window only where it is set in every frame of that window.
        """
        if mask is not None and mask.shape != x.grid:
            raise DimensionError(f"mask shape {mask.shape} does not match grid {x.grid}")
        total, count = 0.0, 0
        for b, e in self.temporal_windows(x.frames, s_f):
            chunk = x.data[b:e + 1].astype(np.float64)
            var = chunk.var(axis=0).sum(axis=-1)
            keep = np.ones(var.shape, dtype=bool) if mask is None else mask[b:e + 1].all(axis=0)
            total += float(var[keep].sum())
            count += int(keep.sum())
        return total / count if count else 0.0
