"""Synthetic latent scenes with exact ground-truth motion."""
import logging
from dataclasses import dataclass

import numpy as np

from stsa.core.errors import SceneError
from stsa.core.rng import STREAM_SCENE, STREAM_TEXTURE, make_rng
from stsa.core.service_decorator import service_method
from stsa.models.flow import FlowField, FlowSet
from stsa.models.latent import LatentVideo, PoseSequence
from stsa.schemas.scene import SceneObject, SceneSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Track:
    """Rendered footprint of one object: texture, cell mask and per-frame top-left."""
    texture: np.ndarray        # [size, size, C]
    footprint: np.ndarray      # [size, size] bool
    positions: list[tuple[int, int]]
    motion: list[tuple[int, int]]


def _footprint(obj: SceneObject) -> np.ndarray:
    if obj.shape == "square":
        return np.ones((obj.size, obj.size), dtype=bool)
    center = (obj.size - 1) / 2.0
    ys, xs = np.mgrid[0:obj.size, 0:obj.size]
    return (xs - center) ** 2 + (ys - center) ** 2 <= (obj.size / 2.0) ** 2


class SceneService:
    """
    Service layer for synthetic scenes.
    A static textured background with rigid textured objects painted in
    list order, so later objects occlude earlier ones.
    """

    def _tracks(self, spec: SceneSpec, seed: int) -> list[_Track]:
        rng = make_rng(seed, STREAM_SCENE)
        tracks = []
        for i, obj in enumerate(spec.objects):
            motion = obj.motion(spec.frames)
            offsets = np.vstack([[0, 0], np.cumsum(np.array(motion, dtype=np.int64).reshape(-1, 2), axis=0)])
            lo = -offsets.min(axis=0)
            hi = np.array([spec.width, spec.height]) - obj.size - offsets.max(axis=0)
            if obj.start is not None:
                start = np.array(obj.start, dtype=np.int64)
                if not spec.wrap and (np.any(start < lo) or np.any(start > hi)):
                    raise SceneError(f"object {i} leaves the {spec.width}x{spec.height} grid")
            elif spec.wrap:
                start = np.array([rng.integers(0, spec.width), rng.integers(0, spec.height)])
            else:
                if np.any(lo > hi):
                    raise SceneError(f"object {i} cannot stay in bounds with its motion")
                start = np.array([rng.integers(lo[0], hi[0] + 1), rng.integers(lo[1], hi[1] + 1)])
            positions = [tuple(int(v) for v in start + off) for off in offsets]
            texture = rng.standard_normal((obj.size, obj.size, spec.channels))
            tracks.append(_Track(texture, _footprint(obj), positions, motion))
        return tracks

    def _cells(self, spec: SceneSpec, track: _Track, frame: int) -> tuple[np.ndarray, np.ndarray]:
        """Grid rows/cols covered by ``track`` in ``frame``."""
        x0, y0 = track.positions[frame]
        ys, xs = np.nonzero(track.footprint)
        rows, cols = ys + y0, xs + x0
        if spec.wrap:
            rows, cols = rows % spec.height, cols % spec.width
        return rows, cols

    def _steps(self, spec: SceneSpec, track: _Track, i: int, j: int) -> np.ndarray:
        """
        Per-cell (dx, dy) taking each covered cell of frame ``i`` to its cell in frame ``j``.

        Under wrap a cell crossing the seam gets the in-grid displacement to
        its wrapped position, e.g. -(W - 1) for a one-cell step right off the last column.
        """
        rows_i, cols_i = self._cells(spec, track, i)
        rows_j, cols_j = self._cells(spec, track, j)
        return np.stack([cols_j - cols_i, rows_j - rows_i], axis=-1)

    @service_method
    def gen_scene(self, spec: SceneSpec, seed: int) -> tuple[LatentVideo, PoseSequence, FlowSet]:
        """
        Video, object-center keypoints and exact integer flows.

        Flows are zero on the background and equal to the object's step on
        its cells; backward flows carry the negated step on the next frame's
        cells. Wrapping objects get the displacement to their wrapped cell.
        Non-adjacent pairs are stored as direct flows when
        ``spec.direct_pairs`` is set.
        """
        tracks = self._tracks(spec, seed)
        background = spec.background_amplitude * make_rng(spec.texture_seed, STREAM_TEXTURE).standard_normal(
            (spec.height, spec.width, spec.channels)
        )
        video = np.broadcast_to(background, (spec.frames, spec.height, spec.width, spec.channels)).copy()
        forward = np.zeros((max(spec.frames - 1, 0), spec.height, spec.width, 2))
        backward = np.zeros_like(forward)
        keypoints = np.zeros((spec.frames, len(tracks), 2))
        center = np.array([(t.footprint.shape[1] - 1) / 2.0 for t in tracks])
        for j, track in enumerate(tracks):
            ys, xs = np.nonzero(track.footprint)
            for k in range(spec.frames):
                rows, cols = self._cells(spec, track, k)
                video[k, rows, cols] = track.texture[ys, xs]
                x0, y0 = track.positions[k]
                keypoints[k, j] = (x0 + center[j], y0 + center[j])
                if k < spec.frames - 1:
                    forward[k, rows, cols] = self._steps(spec, track, k, k + 1)
                if k > 0:
                    backward[k - 1, rows, cols] = self._steps(spec, track, k, k - 1)
        if spec.wrap:
            keypoints[..., 0] %= spec.width
            keypoints[..., 1] %= spec.height
        # wrapped centers may land in the last fractional column
        visible = (keypoints[..., 0] <= spec.width - 1) & (keypoints[..., 1] <= spec.height - 1)
        flows = FlowSet(
            spec.frames, spec.height, spec.width,
            tuple(FlowField(k, k + 1, forward[k]) for k in range(spec.frames - 1)),
            tuple(FlowField(k + 1, k, backward[k]) for k in range(spec.frames - 1)),
            self._direct_pairs(spec, tracks) if spec.direct_pairs else {},
        )
        poses = PoseSequence(keypoints, visible, spec.width, spec.height)
        logger.debug(f"Generated scene {spec.frames}x{spec.height}x{spec.width} with {len(tracks)} objects")
        return LatentVideo(video), poses, flows

    def _direct_pairs(self, spec: SceneSpec, tracks: list[_Track]) -> dict[tuple[int, int], FlowField]:
        """
        Exact flows for frame pairs more than one step apart.

        Chaining adjacent flows drags disoccluded background cells along with
        the object, so long-range pairs are emitted directly.
        """
        direct = {}
        for i in range(spec.frames):
            for j in range(spec.frames):
                if abs(i - j) < 2:
                    continue
                disp = np.zeros((spec.height, spec.width, 2))
                for track in tracks:
                    rows, cols = self._cells(spec, track, i)
                    disp[rows, cols] = self._steps(spec, track, i, j)
                direct[(i, j)] = FlowField(i, j, disp)
        return direct

    def object_mask(self, spec: SceneSpec, seed: int) -> np.ndarray:
        """[F, H, W] boolean mask of cells covered by any object."""
        mask = np.zeros((spec.frames, spec.height, spec.width), dtype=bool)
        for track in self._tracks(spec, seed):
            for k in range(spec.frames):
                rows, cols = self._cells(spec, track, k)
                mask[k, rows, cols] = True
        return mask
