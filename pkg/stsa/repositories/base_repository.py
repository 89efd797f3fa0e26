"""
Base repository pattern for file-backed artifacts.
"""
import logging
import os
import tempfile
from pathlib import Path
from typing import Generic, TypeVar

from stsa.core.errors import FormatError, StsaError

T = TypeVar("T")

logger = logging.getLogger(__name__)


class BaseRepository(Generic[T]):
    """
    Generic repository turning artifacts into bytes and back.
    Subclasses implement ``dumps``/``loads``; files are written atomically
    and parsed completely before anything is returned.
    """

    write_error: type[StsaError] = FormatError

    def dumps(self, item: T) -> bytes:
        raise NotImplementedError

    def loads(self, data: bytes) -> T:
        raise NotImplementedError

    def save(self, item: T, path: str | Path) -> Path:
        """Write ``item`` to ``path`` through a temporary file in the same directory."""
        path = Path(path)
        payload = self.dumps(item)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
            with os.fdopen(fd, "wb") as handle:
                handle.write(payload)
            os.replace(tmp, path)
        except OSError as e:
            raise self.write_error(f"cannot write {path}: {e}") from e
        logger.debug(f"Wrote {len(payload)} bytes to {path}")
        return path

    def load(self, path: str | Path) -> T:
        path = Path(path)
        try:
            data = path.read_bytes()
        except OSError as e:
            raise FormatError(f"cannot read {path}: {e}") from e
        return self.loads(data)
