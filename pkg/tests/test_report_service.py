"""
Unit tests for ReportService and the result repositories.
"""
import json

import pandas as pd
import pytest

from stsa.core.errors import FormatError, ReportError
from stsa.repositories.report_repository import ResultRepository, TableRepository
from stsa.schemas.block import BlockConfig
from stsa.schemas.report import ReportBundle, RunRecord, RunResult, SweepRow, TrainSummary
from stsa.services.cost_service import CostService
from stsa.services.metrics_service import MetricsService
from stsa.services.report_service import ReportService


def metadata(command="benchmark", seed=0):
    return MetricsService.metadata(command, seed, "double", (4, 4, 4, 2))


def benchmark_result(run="benchmark-full"):
    cost = CostService().cost_model("full", 4, 4, 4, 2, 2)
    return RunResult(kind="benchmark", run=run, metadata=metadata(), benchmark=cost)


def sweep_row(label, total):
    f, h, w = (int(v) for v in label.split(","))
    return SweepRow(
        subspace=label, s_f=f, s_h=h, s_w=w, window_volume=f * h * w, num_subspaces=64 // (f * h * w),
        projection_macs=1, score_macs=total, value_macs=total, total_macs=2 * total + 1,
        peak_token_buffer=f * h * w, along_flow_variation=0.1, naive_variation=0.2,
    )


class TestRecords:
    """Test cases for flattening run results"""

    def test_sweep_rows_become_records_in_order(self):
        """Should emit one record per sweep row in sweep order"""
        result = RunResult(
            kind="sweep", run="sweep", metadata=metadata("sweep"),
            sweep=[sweep_row("4,4,4", 10), sweep_row("2,2,2", 5)],
        )
        records = ReportService().records(result)
        assert [r.run for r in records] == ["sweep:4,4,4", "sweep:2,2,2"]
        assert records[0].total_macs == 21
        assert records[1].naive_variation == 0.2

    def test_train_record(self):
        """Should carry initial and final loss of a training run"""
        summary = TrainSummary(
            config=BlockConfig(), steps=1, lr=0.1, seed=2, losses=[2.0, 1.0], initial_loss=2.0, final_loss=1.0,
        )
        result = RunResult(kind="train", run="train", metadata=metadata("train-toy", 2), train=summary)
        (record,) = ReportService().records(result)
        assert (record.subspace, record.initial_loss, record.final_loss, record.seed) == ("4,4,4", 2.0, 1.0, 2)
        assert record.total_macs is None

    def test_benchmark_record(self):
        """Should carry the total MACs of a benchmark"""
        (record,) = ReportService().records(benchmark_result())
        assert record.kind == "benchmark"
        assert record.total_macs == CostService().cost_model("full", 4, 4, 4, 2, 2).total_macs

    def test_result_needs_its_section(self):
        """Should reject a result without the section its kind names"""
        with pytest.raises(ValueError):
            RunResult(kind="sweep", run="x", metadata=metadata())


class TestReport:
    """Test cases for collecting and writing reports"""

    def test_collect_and_report(self, tmp_path):
        """Should collect result files by name and write json, csv and schema"""
        # Arrange
        repo = ResultRepository()
        repo.save(benchmark_result("b"), tmp_path / "runs" / "b.json")
        repo.save(benchmark_result("a"), tmp_path / "runs" / "a.json")
        (tmp_path / "runs" / "notes.json").write_text("{}")
        service = ReportService()

        # Act
        results = service.collect([tmp_path / "runs"])
        bundle = service.report(results, tmp_path / "report")

        # Assert
        assert [r.run for r in bundle.runs] == ["a", "b"]
        doc = json.loads((tmp_path / "report" / "report.json").read_text())
        assert doc["schema_version"] == 1
        table = pd.read_csv(tmp_path / "report" / "report.csv")
        assert list(table.columns) == list(RunRecord.model_fields)
        assert "properties" in json.loads((tmp_path / "report" / "report.schema.json").read_text())

    def test_report_parses_against_published_schema(self, tmp_path):
        """Should emit json that parses back to the bundle and matches the written schema"""
        # Arrange
        sweep = RunResult(
            kind="sweep", run="sweep", metadata=metadata("sweep"),
            sweep=[sweep_row("4,4,4", 10), sweep_row("2,2,2", 5)],
        )

        # Act
        bundle = ReportService().report([sweep, benchmark_result()], tmp_path)

        # Assert
        text = (tmp_path / "report.json").read_text()
        assert ReportBundle.model_validate_json(text) == bundle
        doc = json.loads(text)
        schema = json.loads((tmp_path / "report.schema.json").read_text())
        assert set(doc) == set(schema["properties"])
        record_keys = set(schema["$defs"]["RunRecord"]["properties"])
        assert all(set(run) == record_keys for run in doc["runs"])
        assert len(bundle.runs) == 3
        assert len(pd.read_csv(tmp_path / "report.csv")) == len(bundle.runs)

    def test_empty_report_keeps_columns(self, tmp_path):
        """Should write a header-only csv when there are no runs"""
        bundle = ReportService().report([], tmp_path)
        assert bundle.runs == []
        header = (tmp_path / "report.csv").read_text().strip()
        assert header.split(",") == list(RunRecord.model_fields)

    def test_report_is_deterministic(self, tmp_path):
        """Should write byte-identical reports for identical inputs"""
        service = ReportService()
        service.report([benchmark_result()], tmp_path / "one")
        service.report([benchmark_result()], tmp_path / "two")
        for name in ("report.json", "report.csv", "report.schema.json"):
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()

    def test_missing_input_raises(self, tmp_path):
        """Should raise ReportError for a path that does not exist"""
        with pytest.raises(ReportError):
            ReportService().collect([tmp_path / "nothing.json"])

    def test_report_target_must_be_directory(self, tmp_path):
        """Should raise ReportError when the report target is a file"""
        target = tmp_path / "file"
        target.write_text("x")
        with pytest.raises(ReportError):
            ReportService().report([], target)

    def test_invalid_result_file(self, tmp_path):
        """Should raise FormatError when loading a malformed result directly"""
        path = tmp_path / "bad.json"
        path.write_text('{"kind": "sweep"}')
        with pytest.raises(FormatError):
            ResultRepository().load(path)

    def test_tables_are_write_only(self):
        """Should not parse tables back"""
        with pytest.raises(NotImplementedError):
            TableRepository().loads(b"a,b\n")
