"""Aggregation of run results into the flat report."""
import logging
from pathlib import Path
from typing import Iterable, Sequence

from stsa.core.errors import FormatError, ReportError
from stsa.repositories.report_repository import ReportRepository, ResultRepository
from stsa.schemas.report import ReportBundle, RunRecord, RunResult

logger = logging.getLogger(__name__)


class ReportService:
    """
    Service layer for reports.
    Records keep the order of the inputs, and sweep rows keep their sweep
    order, so repeated reports diff cleanly.
    """

    def __init__(self, result_repository: ResultRepository = None, report_repository: ReportRepository = None):
        self.result_repository = result_repository or ResultRepository()
        self.report_repository = report_repository or ReportRepository(self.result_repository)

    def collect(self, paths: Iterable[str | Path]) -> list[RunResult]:
        """
        Load result files; directories contribute their ``*.json`` files in
        name order. Files that are not run results are skipped with a warning.
        """
        files = []
        for path in map(Path, paths):
            if path.is_dir():
                files.extend(sorted(p for p in path.glob("*.json") if not p.name.startswith("report")))
            elif path.exists():
                files.append(path)
            else:
                raise ReportError(f"{path} does not exist")
        results = []
        for file in files:
            try:
                results.append(self.result_repository.load(file))
            except FormatError as e:
                logger.warning(f"Skipping {file}: {e.detail}")
        return results

    def records(self, result: RunResult) -> list[RunRecord]:
        meta = result.metadata
        base = {"run": result.run, "kind": result.kind, "seed": meta.seed, "precision": meta.precision}
        if result.kind == "sweep":
            return [
                RunRecord(
                    **{**base, "run": f"{result.run}:{row.subspace}"},
                    subspace=row.subspace, total_macs=row.total_macs,
                    along_flow_variation=row.along_flow_variation, naive_variation=row.naive_variation,
                )
                for row in result.sweep
            ]
        if result.kind == "train":
            train = result.train
            return [RunRecord(
                **base, subspace=train.config.subspace.label(),
                initial_loss=train.initial_loss, final_loss=train.final_loss,
            )]
        if result.kind == "consistency":
            report = result.consistency
            return [RunRecord(
                **base, subspace=meta.subspace, total_macs=report.costs.get("subspace"),
                along_flow_variation=report.along_flow_variation,
                naive_variation=report.naive_temporal_variation,
            )]
        cost = result.benchmark
        return [RunRecord(**base, subspace=cost.subspace, total_macs=cost.total_macs)]

    def report(self, results: Sequence[RunResult], directory: str | Path) -> ReportBundle:
        """Write report.json, report.csv and report.schema.json for ``results``."""
        bundle = ReportBundle(runs=[record for result in results for record in self.records(result)])
        self.report_repository.save_report(bundle, directory)
        logger.info(f"Wrote report with {len(bundle.runs)} runs to {directory}")
        return bundle
