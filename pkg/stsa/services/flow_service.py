"""Flow lookup, nearest-cell rounding, composition, downsampling and synthesis."""
import logging

import numpy as np
from scipy.special import softmax

from stsa.core.errors import DimensionError, FlowError, NumericalError
from stsa.core.service_decorator import service_method
from stsa.models.flow import FlowField, FlowSet
from stsa.models.latent import PoseSequence

logger = logging.getLogger(__name__)


def nearest(v: float) -> int:
    """Round to the nearest integer, ties away from zero."""
    if not np.isfinite(v):
        raise NumericalError(f"cannot round non-finite value {v}")
    return int(np.sign(v) * np.floor(abs(v) + 0.5))


def nearest_array(values: np.ndarray) -> np.ndarray:
    """Elementwise ``nearest`` returning int64."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise NumericalError("cannot round non-finite values")
    return (np.sign(values) * np.floor(np.abs(values) + 0.5)).astype(np.int64)


def warp_indices(disp: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Rounded, clamped target cells (ty, tx) of every cell under ``disp``.

    Both arrays have shape [H, W].
    """
    height, width = disp.shape[:2]
    ys, xs = np.mgrid[0:height, 0:width]
    tx = np.clip(nearest_array(xs + disp[..., 0]), 0, width - 1)
    ty = np.clip(nearest_array(ys + disp[..., 1]), 0, height - 1)
    return ty, tx


class FlowService:
    """
    Service layer for dense motion flows.
    Arbitrary-pair flows come from direct pairs when present, else from
    composing the adjacent chain.
    """

    def flow_lookup(self, field: FlowField, x: int, y: int) -> tuple[float, float]:
        """Position (x + F_x(x, y), y + F_y(x, y)) of cell (x, y) in the target frame."""
        if not (0 <= x < field.width and 0 <= y < field.height):
            raise DimensionError(f"cell ({x}, {y}) outside {field.width}x{field.height} flow")
        dx, dy = field.disp[y, x]
        return (x + float(dx), y + float(dy))

    @service_method
    def compose(self, f_ij: FlowField, f_jk: FlowField) -> FlowField:
        """
        Chain i->j with j->k.

        The second field is sampled at the nearest, clamped warped cell.
        """
        if f_ij.target != f_jk.source:
            raise FlowError(f"cannot compose {f_ij.pair} with {f_jk.pair}")
        if f_ij.resolution != f_jk.resolution:
            raise FlowError(f"resolution mismatch {f_ij.resolution} vs {f_jk.resolution}")
        ty, tx = warp_indices(f_ij.disp)
        return FlowField(f_ij.source, f_jk.target, f_ij.disp + f_jk.disp[ty, tx])

    @service_method
    def downsample(self, field: FlowField, k: int) -> FlowField:
        """Block-mean over k x k cells, re-expressed in coarse-grid cells."""
        if k < 1 or field.height % k or field.width % k:
            raise DimensionError(f"factor {k} does not divide flow resolution {field.resolution}")
        h, w = field.height // k, field.width // k
        coarse = field.disp.reshape(h, k, w, k, 2).mean(axis=(1, 3)) / k
        return FlowField(field.source, field.target, coarse)

    def downsample_set(self, flows: FlowSet, k: int) -> FlowSet:
        if flows.is_shifted:
            raise FlowError("downsample the unshifted flows, then shift")
        forward = tuple(self.downsample(f, k) for f in flows.forward)
        backward = tuple(self.downsample(f, k) for f in flows.backward)
        direct = {pair: self.downsample(f, k) for pair, f in flows.direct.items()}
        return FlowSet(flows.frames, flows.height // k, flows.width // k, forward, backward, direct)

    @service_method
    def flow_between(self, flows: FlowSet, i: int, j: int) -> FlowField:
        """
        Flow F^{i->j} as seen by the (possibly shifted) view of ``flows``.

        Shifted frame indices are mapped to stored frames, the stored chain
        is composed there and the resulting field is rolled onto the shifted
        grid.
        """
        if not (0 <= i < flows.frames and 0 <= j < flows.frames):
            raise FlowError(f"pair {(i, j)} outside {flows.frames} frames")
        t, dy, dx = flows.offset
        si, sj = (i - t) % flows.frames, (j - t) % flows.frames
        if si == sj:
            field = FlowField.zeros(si, sj, flows.height, flows.width)
        elif (si, sj) in flows.direct:
            field = flows.direct[(si, sj)]
        elif si < sj:
            field = flows.forward[si]
            for step in flows.forward[si + 1:sj]:
                field = self.compose(field, step)
        else:
            field = flows.backward[si - 1]
            for k in range(si - 2, sj - 1, -1):
                field = self.compose(field, flows.backward[k])
        disp = field.disp
        if dy or dx:
            disp = np.roll(disp, (dy, dx), axis=(0, 1))
        return FlowField(i, j, disp)

    @service_method
    def synth_flow_from_poses(self, poses: PoseSequence, height: int, width: int, sigma: float) -> FlowSet:
        """
        Dense flows from keypoint tracks.

        Each cell takes the softmax-weighted average (Gaussian kernel of
        bandwidth ``sigma`` in grid cells) of the displacements of keypoints
        visible in both frames, anchored at their source-frame positions.
        """
        if sigma <= 0:
            raise FlowError(f"sigma must be positive, got {sigma}")
        if height < 1 or width < 1:
            raise DimensionError(f"flow grid must be positive, got {height}x{width}")
        scale = np.array([width / poses.width, height / poses.height])
        points = poses.keypoints * scale
        ys, xs = np.mgrid[0:height, 0:width]
        cells = np.stack([xs, ys], axis=-1).astype(np.float64)

        def field(source: int, target: int, anchors: np.ndarray, motion: np.ndarray) -> FlowField:
            sq = ((cells[:, :, None, :] - anchors[None, None, :, :]) ** 2).sum(axis=-1)
            weights = softmax(-sq / (2.0 * sigma ** 2), axis=-1)
            return FlowField(source, target, weights @ motion)

        forward, backward = [], []
        for k in range(poses.frames - 1):
            both = poses.visible[k] & poses.visible[k + 1]
            if not both.any():
                raise FlowError(f"no keypoint visible in both frames {k} and {k + 1}")
            motion = points[k + 1, both] - points[k, both]
            forward.append(field(k, k + 1, points[k, both], motion))
            backward.append(field(k + 1, k, points[k + 1, both], -motion))
        logger.debug(f"Synthesized {len(forward)} flow pairs at {height}x{width}, sigma={sigma}")
        return FlowSet(poses.frames, height, width, tuple(forward), tuple(backward))

    def fit_to_grid(self, flows: FlowSet, height: int, width: int) -> FlowSet:
        """Downsample ``flows`` onto an H x W latent grid by their integer resolution ratio."""
        if flows.resolution == (height, width):
            return flows
        k = flows.height // height
        if k < 1 or flows.height != k * height or flows.width != k * width:
            raise FlowError(f"flow resolution {flows.resolution} is not a multiple of grid {(height, width)}")
        logger.info(f"Downsampling flows by {k} to {height}x{width}")
        return self.downsample_set(flows, k)
