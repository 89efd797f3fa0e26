"""Subspace window schema."""
from pydantic import BaseModel, Field

from stsa.core.errors import ConfigurationError


class SubspaceSpec(BaseModel):
    """Window extent s = [s_f, s_h, s_w] in frames, rows and cols."""
    s_f: int = Field(4, ge=1, description="Window extent in frames")
    s_h: int = Field(4, ge=1, description="Window extent in rows")
    s_w: int = Field(4, ge=1, description="Window extent in cols")

    model_config = {
        "frozen": True,
        "json_schema_extra": {"examples": [{"s_f": 4, "s_h": 4, "s_w": 4}]},
    }

    @property
    def window(self) -> tuple[int, int, int]:
        return (self.s_f, self.s_h, self.s_w)

    @property
    def volume(self) -> int:
        return self.s_f * self.s_h * self.s_w

    @property
    def shift(self) -> tuple[int, int, int]:
        """Half-window roll; odd sizes round down."""
        return (self.s_f // 2, self.s_h // 2, self.s_w // 2)

    def divides(self, frames: int, height: int, width: int) -> bool:
        return frames % self.s_f == 0 and height % self.s_h == 0 and width % self.s_w == 0

    def label(self) -> str:
        return f"{self.s_f},{self.s_h},{self.s_w}"

    @classmethod
    def parse(cls, text: str) -> "SubspaceSpec":
        """Parse the CLI form ``f,h,w`` (e.g. ``4,4,4``)."""
        parts = [p.strip() for p in text.split(",")]
        try:
            s_f, s_h, s_w = (int(p) for p in parts)
        except ValueError as e:
            raise ConfigurationError(f"Subspace must be 'f,h,w' integers, got {text!r}") from e
        if min(s_f, s_h, s_w) < 1:
            raise ConfigurationError(f"Subspace sizes must be >= 1, got {text!r}")
        return cls(s_f=s_f, s_h=s_h, s_w=s_w)
