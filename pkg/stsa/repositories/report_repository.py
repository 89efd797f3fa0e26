"""JSON/CSV result files and the aggregated report."""
import json
from pathlib import Path
from typing import Sequence

import pandas as pd
from pydantic import BaseModel, ValidationError

from stsa.core.errors import FormatError, ReportError
from stsa.repositories.base_repository import BaseRepository
from stsa.schemas.report import ReportBundle, RunRecord, RunResult, SweepRow


class ResultRepository(BaseRepository[RunResult]):
    """One run's result document."""

    write_error = ReportError

    def dumps(self, item: RunResult) -> bytes:
        return (item.model_dump_json(indent=2) + "\n").encode()

    def loads(self, data: bytes) -> RunResult:
        try:
            return RunResult.model_validate_json(data)
        except ValidationError as e:
            raise FormatError(f"invalid result file: {e.errors()[0]['msg']}") from e


class TableRepository(BaseRepository[pd.DataFrame]):
    """CSV tables with a fixed column order."""

    write_error = ReportError

    def dumps(self, item: pd.DataFrame) -> bytes:
        return item.to_csv(index=False, lineterminator="\n").encode()

    def loads(self, data: bytes) -> pd.DataFrame:
        raise NotImplementedError("tables are write-only")

    @staticmethod
    def frame(rows: Sequence[BaseModel], model: type[BaseModel]) -> pd.DataFrame:
        """DataFrame of ``rows`` with the model's field order, also for no rows."""
        columns = list(model.model_fields)
        return pd.DataFrame([r.model_dump() for r in rows], columns=columns)

    def save_rows(self, rows: Sequence[BaseModel], model: type[BaseModel], path: str | Path) -> Path:
        return self.save(self.frame(rows, model), path)

    def save_sweep(self, rows: Sequence[SweepRow], path: str | Path) -> Path:
        return self.save_rows(rows, SweepRow, path)


class ReportRepository:
    """report.json, report.csv and report.schema.json in one directory."""

    def __init__(self, results: ResultRepository = None, tables: TableRepository = None):
        self.results = results or ResultRepository()
        self.tables = tables or TableRepository()

    def save_report(self, bundle: ReportBundle, directory: str | Path) -> list[Path]:
        directory = Path(directory)
        if directory.exists() and not directory.is_dir():
            raise ReportError(f"{directory} is not a directory")
        writer = _TextRepository()
        schema = json.dumps(ReportBundle.model_json_schema(), indent=2, sort_keys=True) + "\n"
        return [
            writer.save(bundle.model_dump_json(indent=2) + "\n", directory / "report.json"),
            self.tables.save_rows(bundle.runs, RunRecord, directory / "report.csv"),
            writer.save(schema, directory / "report.schema.json"),
        ]


class _TextRepository(BaseRepository[str]):
    write_error = ReportError

    def dumps(self, item: str) -> bytes:
        return item.encode()

    def loads(self, data: bytes) -> str:
        return data.decode()
