"""Dense displacement fields between frames."""
from dataclasses import dataclass, field

import numpy as np

from stsa.core.errors import DimensionError, FlowError, NumericalError


@dataclass(frozen=True, eq=False)
class FlowField:
    """
    Displacement field F^{source -> target} on an H x W grid.

    disp[y, x] = (dx, dy) in grid cells, so cell (x, y) of the source frame
    corresponds to (x + dx, y + dy) in the target frame.
    """
    source: int
    target: int
    disp: np.ndarray

    def __post_init__(self):
        disp = np.asarray(self.disp)
        if disp.ndim != 3 or disp.shape[2] != 2:
            raise DimensionError(f"flow displacement must be [H, W, 2], got {disp.shape}")
        if disp.shape[0] < 1 or disp.shape[1] < 1:
            raise DimensionError("flow resolution must be positive")
        if not np.issubdtype(disp.dtype, np.floating):
            disp = disp.astype(np.float64)
        if not np.all(np.isfinite(disp)):
            raise NumericalError(f"flow {self.source}->{self.target} has non-finite entries")
        disp = np.array(disp, copy=True, order="C")
        disp.flags.writeable = False
        object.__setattr__(self, "disp", disp)

    @property
    def height(self) -> int:
        return self.disp.shape[0]

    @property
    def width(self) -> int:
        return self.disp.shape[1]

    @property
    def resolution(self) -> tuple[int, int]:
        return self.disp.shape[:2]

    @property
    def pair(self) -> tuple[int, int]:
        return (self.source, self.target)

    @classmethod
    def zeros(cls, source: int, target: int, height: int, width: int, dtype=np.float64) -> "FlowField":
        return cls(source, target, np.zeros((height, width, 2), dtype=dtype))

    @classmethod
    def constant(cls, source: int, target: int, height: int, width: int, dx: float, dy: float) -> "FlowField":
        disp = np.empty((height, width, 2), dtype=np.float64)
        disp[..., 0] = dx
        disp[..., 1] = dy
        return cls(source, target, disp)


@dataclass(frozen=True, eq=False)
class FlowSet:
    """
    Adjacent-frame flows for a clip of ``frames`` frames.

    forward[k] is F^{k -> k+1} and backward[k] is F^{k+1 -> k}. ``direct``
    holds optional flows for arbitrary pairs. ``offset`` is the cyclic roll
    (frames, rows, cols) of a shifted view; stored fields always stay in the
    unshifted frame order and grid.
    """
    frames: int
    height: int
    width: int
    forward: tuple[FlowField, ...]
    backward: tuple[FlowField, ...]
    direct: dict[tuple[int, int], FlowField] = field(default_factory=dict)
    offset: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        if self.frames < 1:
            raise DimensionError("FlowSet needs at least one frame")
        forward = tuple(self.forward)
        backward = tuple(self.backward)
        if len(forward) != self.frames - 1 or len(backward) != self.frames - 1:
            raise FlowError(
                f"expected {self.frames - 1} forward and backward flows, "
                f"got {len(forward)} and {len(backward)}"
            )
        for k, (fwd, bwd) in enumerate(zip(forward, backward)):
            if fwd.pair != (k, k + 1):
                raise FlowError(f"forward flow {k} has pair {fwd.pair}, expected {(k, k + 1)}")
            if bwd.pair != (k + 1, k):
                raise FlowError(f"backward flow {k} has pair {bwd.pair}, expected {(k + 1, k)}")
        for (i, j), flow in self.direct.items():
            if flow.pair != (i, j):
                raise FlowError(f"direct flow keyed {(i, j)} has pair {flow.pair}")
            if not (0 <= i < self.frames and 0 <= j < self.frames):
                raise FlowError(f"direct flow {(i, j)} outside {self.frames} frames")
        for flow in (*forward, *backward, *self.direct.values()):
            if flow.resolution != (self.height, self.width):
                raise FlowError(
                    f"flow {flow.pair} has resolution {flow.resolution}, "
                    f"expected {(self.height, self.width)}"
                )
        object.__setattr__(self, "forward", forward)
        object.__setattr__(self, "backward", backward)
        object.__setattr__(self, "direct", dict(self.direct))
        object.__setattr__(self, "offset", tuple(int(o) for o in self.offset))

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def is_shifted(self) -> bool:
        return any(self.offset)

    @classmethod
    def zeros(cls, frames: int, height: int, width: int) -> "FlowSet":
        forward = tuple(FlowField.zeros(k, k + 1, height, width) for k in range(frames - 1))
        backward = tuple(FlowField.zeros(k + 1, k, height, width) for k in range(frames - 1))
        return cls(frames, height, width, forward, backward)

    @classmethod
    def constant(cls, frames: int, height: int, width: int, dx: float, dy: float) -> "FlowSet":
        """Uniform motion (dx, dy) per frame; backward flows are the negation."""
        forward = tuple(FlowField.constant(k, k + 1, height, width, dx, dy) for k in range(frames - 1))
        backward = tuple(FlowField.constant(k + 1, k, height, width, -dx, -dy) for k in range(frames - 1))
        return cls(frames, height, width, forward, backward)
