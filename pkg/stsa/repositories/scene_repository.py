"""Scene description files written next to generated clips."""
from pydantic import ValidationError

from stsa.core.errors import FormatError
from stsa.repositories.base_repository import BaseRepository
from stsa.schemas.scene import SceneSpec


class SceneRepository(BaseRepository[SceneSpec]):
    def dumps(self, item: SceneSpec) -> bytes:
        return (item.model_dump_json(indent=2) + "\n").encode()

    def loads(self, data: bytes) -> SceneSpec:
        try:
            return SceneSpec.model_validate_json(data)
        except ValidationError as e:
            raise FormatError(f"invalid scene file: {e.errors()[0]['msg']}") from e
