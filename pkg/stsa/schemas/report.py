"""Result schemas emitted by the harness."""
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from stsa.schemas.block import BlockConfig
from stsa.schemas.cost import CostReport

REPORT_SCHEMA_VERSION = 1


class RunMetadata(BaseModel):
    """Deterministic run description (no timestamps, no hostnames)."""
    command: str
    seed: int
    precision: Literal["single", "double"]
    frames: int
    height: int
    width: int
    channels: int
    subspace: str | None = None
    version: str


class SweepRow(BaseModel):
    """One subspace size of a sweep."""
    subspace: str
    s_f: int
    s_h: int
    s_w: int
    window_volume: int
    num_subspaces: int
    projection_macs: int
    score_macs: int
    value_macs: int
    total_macs: int
    peak_token_buffer: int
    along_flow_variation: float = Field(..., ge=0.0)
    naive_variation: float = Field(..., ge=0.0)


class ConsistencyReport(BaseModel):
    """Desk-scale consistency proxy plus attention cost per mode."""
    along_flow_variation: float = Field(..., ge=0.0, description="Mean squared change along the flow")
    naive_temporal_variation: float = Field(..., ge=0.0, description="Mean squared change at fixed cells")
    costs: dict[str, int] = Field(default_factory=dict, description="Total MACs per attention mode")
    metadata: RunMetadata


class TrainSummary(BaseModel):
    """Outcome of a toy training run."""
    config: BlockConfig
    steps: int
    lr: float
    seed: int
    losses: list[float]
    initial_loss: float
    final_loss: float


class AlignmentComparison(BaseModel):
    """Paired aligned/unaligned toy runs over several seeds."""
    seeds: list[int]
    aligned_final_losses: list[float]
    unaligned_final_losses: list[float]
    aligned_wins: int


class RunRecord(BaseModel):
    """Flat row of the aggregated report; optional metrics are null when not measured."""
    run: str
    kind: Literal["sweep", "train", "consistency", "benchmark"]
    seed: int | None = None
    precision: str | None = None
    subspace: str | None = None
    total_macs: int | None = None
    along_flow_variation: float | None = None
    naive_variation: float | None = None
    initial_loss: float | None = None
    final_loss: float | None = None


class ReportBundle(BaseModel):
    """Top-level JSON document written by the report step."""
    schema_version: int = REPORT_SCHEMA_VERSION
    runs: list[RunRecord] = Field(default_factory=list)


class RunResult(BaseModel):
    """Result file of one CLI run; exactly the section matching ``kind`` is set."""
    schema_version: int = REPORT_SCHEMA_VERSION
    kind: Literal["sweep", "train", "consistency", "benchmark"]
    run: str
    metadata: RunMetadata
    sweep: list[SweepRow] | None = None
    train: TrainSummary | None = None
    comparison: AlignmentComparison | None = None
    consistency: ConsistencyReport | None = None
    benchmark: CostReport | None = None

    @model_validator(mode="after")
    def _check_section(self):
        section = {"sweep": self.sweep, "train": self.train,
                   "consistency": self.consistency, "benchmark": self.benchmark}[self.kind]
        if section is None:
            raise ValueError(f"{self.kind} result needs its '{self.kind}' section")
        return self
