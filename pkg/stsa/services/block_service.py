"""The assembled STSA block: align, shift, split, attend, merge, unshift, restore."""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from stsa.core.config import Settings, settings as default_settings
from stsa.core.errors import ConfigurationError, DimensionError
from stsa.core.service_decorator import service_method
from stsa.core.timing import timed
from stsa.models.alignment import AlignmentMap, maps_checksum
from stsa.models.attention import AttentionGrads, AttentionParams, MacCounter
from stsa.models.flow import FlowSet
from stsa.models.latent import LatentVideo
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.align_service import AlignService
from stsa.services.attention_service import AttentionService
from stsa.services.noise_service import NoiseService
from stsa.services.subspace_service import SubspaceService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockPlan:
    """
    Everything a block needs besides the tensor and the projections.

    ``maps`` is None for an unaligned (plain windowed) block. Plans depend
    only on flows and grid, so training reuses one plan across steps.
    """
    spec: SubspaceSpec
    shifted: bool
    grid: tuple[int, int, int]
    maps: tuple[AlignmentMap, ...] | None

    @property
    def aligned(self) -> bool:
        return self.maps is not None

    @property
    def checksum(self) -> str | None:
        return maps_checksum(self.maps) if self.maps is not None else None


class BlockService:
    """
    Service layer for STSA blocks and stacks of them.
    Alignment runs once over the whole space before the split.
    """

    def __init__(
        self,
        subspace_service: SubspaceService = None,
        align_service: AlignService = None,
        attention_service: AttentionService = None,
        noise_service: NoiseService = None,
        settings: Settings = None,
    ):
        self.settings = settings or default_settings
        self.subspace_service = subspace_service or SubspaceService(self.settings)
        self.align_service = align_service or AlignService(settings=self.settings)
        self.attention_service = attention_service or AttentionService(self.subspace_service, self.settings)
        self.noise_service = noise_service or NoiseService(self.settings)

    def plan(
        self, grid: tuple[int, int, int], flows: FlowSet, spec: SubspaceSpec,
        shifted: bool = False, aligned: bool = True,
    ) -> BlockPlan:
        """Compute the alignment maps of a block, on shifted flows when ``shifted``."""
        maps = None
        if aligned:
            view = self.align_service.shift_flows(flows, spec) if shifted else flows
            maps = tuple(self.align_service.compute_alignment(view, tuple(grid), spec.s_f))
        return BlockPlan(spec, shifted, tuple(grid), maps)

    def _enter(self, x: LatentVideo, plan: BlockPlan) -> LatentVideo:
        """shift then align: the permutation applied before the split."""
        if x.grid != plan.grid:
            raise DimensionError(f"plan was made for grid {plan.grid}, tensor has {x.grid}")
        h = self.subspace_service.shift(x, plan.spec) if plan.shifted else x
        return self.align_service.align(h, plan.maps) if plan.aligned else h

    def _leave(self, y: LatentVideo, plan: BlockPlan, checksum: str | None) -> LatentVideo:
        """restore then unshift: inverse of ``_enter``."""
        h = self.align_service.restore(y, plan.maps, checksum) if plan.aligned else y
        return self.subspace_service.unshift(h, plan.spec) if plan.shifted else h

    @service_method
    def forward(
        self, x: LatentVideo, plan: BlockPlan, params: AttentionParams,
        residual: bool | None = None, counter: MacCounter | None = None,
    ) -> LatentVideo:
        residual = self.settings.residual if residual is None else residual
        entered = self._enter(x, plan)
        blocks, partition = self.subspace_service.split(entered, plan.spec)
        attended = self.attention_service.attend_blocks(blocks.tokens, params, counter).astype(x.dtype)
        if residual:
            attended = attended + blocks.tokens
        merged = self.subspace_service.merge(blocks.map(lambda _: attended), partition)
        return self._leave(merged, plan, entered.provenance)

    @timed("block", log_performance=False)
    def stsa_block(
        self, x: LatentVideo, flows: FlowSet, spec: SubspaceSpec, params: AttentionParams,
        shifted: bool = False, residual: bool | None = None, aligned: bool = True,
        counter: MacCounter | None = None,
    ) -> LatentVideo:
        """
        [shift x and flows] -> compute_alignment -> align -> split -> attention
        (+ residual) -> merge -> restore -> [unshift].
        """
        plan = self.plan(x.grid, flows, spec, shifted, aligned)
        return self.forward(x, plan, params, residual, counter)

    @service_method
    def backward(
        self, x: LatentVideo, plan: BlockPlan, params: AttentionParams, upstream: LatentVideo,
    ) -> AttentionGrads:
        """
        Gradient of a block's loss w.r.t. the projections.

        The upstream gradient is carried through the adjoints of
        unshift/restore/merge, which are the permutations shift/align/split.
        """
        if upstream.shape != x.shape:
            raise DimensionError(f"upstream gradient {upstream.shape} does not match input {x.shape}")
        entered = self._enter(x, plan)
        blocks, partition = self.subspace_service.split(entered, plan.spec)
        if partition.padded:
            raise ConfigurationError("block gradients are not defined for padded partitions")
        grad_entered = self._enter(upstream, plan)
        grad_blocks, _ = self.subspace_service.split(grad_entered, plan.spec)
        _, grads = self.attention_service.attention_backward(blocks.tokens, params, grad_blocks.tokens)
        return grads

    @timed("stack")
    def stsa_stack(
        self, x: LatentVideo, flows: FlowSet, spec: SubspaceSpec,
        params: Sequence[AttentionParams], residual: bool | None = None,
    ) -> LatentVideo:
        """
        Frame embedding added once, then blocks alternating unshifted (even
        depth) and shifted (odd depth).
        """
        if not params:
            raise ConfigurationError("a stack needs at least one block")
        embedding = self.noise_service.frame_positional_embedding(x.frames, x.channels)
        h = self.noise_service.add_embedding(x, embedding)
        for depth, block_params in enumerate(params):
            h = self.stsa_block(h, flows, spec, block_params, shifted=depth % 2 == 1, residual=residual)
        logger.debug(f"Applied {len(params)} STSA blocks with subspace {spec.label()}")
        return h


def mse_loss(y: LatentVideo, target: LatentVideo) -> tuple[float, LatentVideo]:
    """Mean squared error and its gradient w.r.t. ``y``."""
    if y.shape != target.shape:
        raise DimensionError(f"prediction {y.shape} does not match target {target.shape}")
    diff = y.data.astype(np.float64) - target.data.astype(np.float64)
    return float(np.mean(diff ** 2)), LatentVideo(2.0 * diff / diff.size)
