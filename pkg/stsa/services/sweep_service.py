"""Subspace-size sweep: cost and consistency per window size."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from stsa.core.config import Settings, settings as default_settings
from stsa.core.errors import DimensionError
from stsa.core.rng import STREAM_PARAMS, make_rng
from stsa.core.timing import timed
from stsa.models.attention import AttentionParams
from stsa.models.flow import FlowSet
from stsa.schemas.report import SweepRow
from stsa.schemas.scene import SceneSpec
from stsa.schemas.sweep import default_sizes
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.block_service import BlockService
from stsa.services.cost_service import CostService
from stsa.services.metrics_service import MetricsService
from stsa.services.scene_service import SceneService

logger = logging.getLogger(__name__)

DEFAULT_SIZES = tuple(default_sizes())


class SweepService:
    """
    Service layer for subspace-size sweeps.
    Sizes that do not divide the scene are skipped with a warning; rows
    come back in the order the sizes were given.
    """

    def __init__(
        self,
        block_service: BlockService = None,
        cost_service: CostService = None,
        metrics_service: MetricsService = None,
        scene_service: SceneService = None,
        settings: Settings = None,
    ):
        self.settings = settings or default_settings
        self.block_service = block_service or BlockService(settings=self.settings)
        self.cost_service = cost_service or CostService()
        self.metrics_service = metrics_service or MetricsService(cost_service=self.cost_service)
        self.scene_service = scene_service or SceneService()

    @timed("sweep")
    def sweep_subspace_sizes(
        self, sizes: Sequence[SubspaceSpec], scene: SceneSpec, seed: int,
        dim: int | None = None, workers: int | None = None,
    ) -> list[SweepRow]:
        video, _, flows = self.scene_service.gen_scene(scene, seed)
        video = video.astype(self.settings.dtype)
        dim = dim or scene.channels
        params = AttentionParams.random(
            scene.channels, dim, make_rng(seed, STREAM_PARAMS), self.settings.heads, dtype=self.settings.dtype,
        )
        zero = FlowSet.zeros(scene.frames, scene.height, scene.width)
        grid = (scene.frames, scene.height, scene.width)

        accepted = []
        for spec in sizes:
            if spec.divides(*grid):
                accepted.append(spec)
            else:
                logger.warning(f"Skipping subspace {spec.label()}: does not divide scene {grid}")

        def run(spec: SubspaceSpec) -> SweepRow:
            cost = self.cost_service.cost_model(
                "subspace", *grid, scene.channels, dim, spec, self.settings.heads,
            )
            out = self.block_service.stsa_block(video, flows, spec, params)
            return SweepRow(
                subspace=spec.label(), s_f=spec.s_f, s_h=spec.s_h, s_w=spec.s_w,
                window_volume=spec.volume, num_subspaces=video.frames * video.height * video.width // spec.volume,
                projection_macs=cost.projection_macs, score_macs=cost.score_macs,
                value_macs=cost.value_macs, total_macs=cost.total_macs,
                peak_token_buffer=cost.peak_token_buffer,
                along_flow_variation=self.metrics_service.along_flow_variation(out, flows),
                naive_variation=self.metrics_service.along_flow_variation(out, zero),
            )

        workers = workers or self.settings.sweep_workers
        if workers > 1 and len(accepted) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(run, accepted))
        else:
            rows = [run(spec) for spec in accepted]
        if not rows and sizes:
            raise DimensionError(f"no subspace size divides scene {grid}")
        return rows
