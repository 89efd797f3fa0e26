"""Debug dumps of alignment maps."""
from typing import Sequence

from stsa.models.alignment import AlignmentMap
from stsa.repositories.base_repository import BaseRepository
from stsa.schemas.alignment import AlignmentDump, FrameMapDump, WindowMapDump


class AlignmentRepository(BaseRepository[Sequence[AlignmentMap]]):
    """Write-only JSON view of realized maps (frame, src, tgt)."""

    def to_dump(self, maps: Sequence[AlignmentMap]) -> AlignmentDump:
        return AlignmentDump(
            maps=[
                WindowMapDump(
                    window=amap.window, reference=amap.reference,
                    height=amap.height, width=amap.width, checksum=amap.checksum,
                    frames=[
                        FrameMapDump(frame=p.frame, pairs=list(zip(p.sources.tolist(), p.targets.tolist())))
                        for p in amap.frames
                    ],
                )
                for amap in maps
            ]
        )

    def dumps(self, item: Sequence[AlignmentMap]) -> bytes:
        return self.to_dump(item).model_dump_json(indent=2).encode()
