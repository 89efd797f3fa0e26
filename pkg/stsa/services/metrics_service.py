"""Consistency metrics: along-flow variation and the consistency report."""
import numpy as np

from stsa import __version__
from stsa.core.errors import DimensionError, FlowError
from stsa.core.service_decorator import service_method
from stsa.models.flow import FlowSet
from stsa.models.latent import LatentVideo
from stsa.schemas.cost import AttentionMode
from stsa.schemas.report import ConsistencyReport, RunMetadata
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.cost_service import CostService
from stsa.services.flow_service import FlowService, warp_indices

REPORT_MODES: tuple[AttentionMode, ...] = (
    "subspace", "temporal", "crossframe-first", "crossframe-middle",
    "crossframe-previous", "crossframe-all", "full",
)


class MetricsService:
    def __init__(self, flow_service: FlowService = None, cost_service: CostService = None):
        self.flow_service = flow_service or FlowService()
        self.cost_service = cost_service or CostService()

    @service_method
    def along_flow_variation(self, x: LatentVideo, flows: FlowSet, mask: np.ndarray | None = None) -> float:
        """
        Mean over frame pairs and cells of ||x[k+1, psi(cell + F^{k->k+1})] - x[k, cell]||^2.

        ``mask`` optionally restricts the cells of frame k that are counted
        (an [F, H, W] boolean array indexed by the source frame).
        """
        if flows.frames != x.frames or flows.resolution != (x.height, x.width):
            raise FlowError(f"flows {(flows.frames, *flows.resolution)} do not cover tensor grid {x.grid}")
        if mask is not None and mask.shape != x.grid:
            raise DimensionError(f"mask shape {mask.shape} does not match grid {x.grid}")
        if x.frames < 2:
            return 0.0
        data = x.data.astype(np.float64)
        total, count = 0.0, 0
        for k in range(x.frames - 1):
            field = self.flow_service.flow_between(flows, k, k + 1)
            ty, tx = warp_indices(field.disp)
            sq = ((data[k + 1, ty, tx] - data[k]) ** 2).sum(axis=-1)
            keep = np.ones(sq.shape, dtype=bool) if mask is None else mask[k]
            total += float(sq[keep].sum())
            count += int(keep.sum())
        return total / count if count else 0.0

    def consistency_report(
        self, x: LatentVideo, flows: FlowSet, spec: SubspaceSpec, dim: int, metadata: RunMetadata,
    ) -> ConsistencyReport:
        """Along-flow and fixed-cell variation plus total MACs of every attention mode."""
        zero = FlowSet.zeros(x.frames, x.height, x.width)
        costs = {
            mode: self.cost_service.cost_model(
                mode, x.frames, x.height, x.width, x.channels, dim, spec if mode == "subspace" else None,
            ).total_macs
            for mode in REPORT_MODES
        }
        return ConsistencyReport(
            along_flow_variation=self.along_flow_variation(x, flows),
            naive_temporal_variation=self.along_flow_variation(x, zero),
            costs=costs,
            metadata=metadata,
        )

    @staticmethod
    def metadata(command: str, seed: int, precision: str, grid: tuple[int, int, int, int],
                 subspace: SubspaceSpec | None = None) -> RunMetadata:
        f, h, w, c = grid
        return RunMetadata(
            command=command, seed=seed, precision=precision, frames=f, height=h, width=w,
            channels=c, subspace=subspace.label() if subspace else None, version=__version__,
        )
