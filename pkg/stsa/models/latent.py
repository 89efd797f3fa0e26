"""Dense latent tensors, noise schedules and pose sequences."""
from dataclasses import dataclass, replace

import numpy as np

from stsa.core.errors import ConfigurationError, DimensionError, NumericalError

FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))


def _frozen_copy(array: np.ndarray, dtype=None) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class LatentVideo:
    """
    Real tensor of shape [F, H, W, C] (frames, rows, cols, channels).

    The array is copied on construction and made read-only. ``provenance``
    is an optional tag (the checksum of the alignment maps that produced
    this tensor) checked by Subspace Restore.
    """
    data: np.ndarray
    provenance: str | None = None

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 4:
            raise DimensionError(f"LatentVideo must be rank 4 [F, H, W, C], got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise DimensionError(f"LatentVideo dims must be >= 1, got {arr.shape}")
        if arr.dtype not in FLOAT_DTYPES:
            raise ConfigurationError(f"LatentVideo dtype must be float32 or float64, got {arr.dtype}")
        if not np.all(np.isfinite(arr)):
            raise NumericalError("LatentVideo entries must be finite")
        object.__setattr__(self, "data", _frozen_copy(arr))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.data.shape

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def channels(self) -> int:
        return self.data.shape[3]

    @property
    def grid(self) -> tuple[int, int, int]:
        return self.data.shape[:3]

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def with_data(self, data: np.ndarray) -> "LatentVideo":
        """New tensor with the given data and no provenance."""
        return LatentVideo(np.asarray(data, dtype=self.dtype))

    def with_provenance(self, provenance: str | None) -> "LatentVideo":
        return replace(self, provenance=provenance)

    def astype(self, dtype) -> "LatentVideo":
        return LatentVideo(self.data.astype(dtype), self.provenance)

    @classmethod
    def zeros(cls, frames: int, height: int, width: int, channels: int, dtype=np.float64) -> "LatentVideo":
        return cls(np.zeros((frames, height, width, channels), dtype=dtype))


@dataclass(frozen=True)
class NoiseSchedule:
    """Variance schedule beta_1..beta_T of the forward noising process."""
    betas: tuple[float, ...]

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if not betas:
            raise ConfigurationError("NoiseSchedule needs at least one step")
        if not all(0.0 < b < 1.0 for b in betas):
            raise ConfigurationError("NoiseSchedule betas must satisfy 0 < beta < 1")
        object.__setattr__(self, "betas", betas)

    def __len__(self) -> int:
        return len(self.betas)

    @classmethod
    def constant(cls, beta: float, steps: int) -> "NoiseSchedule":
        return cls(tuple([beta] * steps))

    @classmethod
    def linear(cls, start: float, end: float, steps: int) -> "NoiseSchedule":
        return cls(tuple(np.linspace(start, end, steps).tolist()))

    def alpha_bar(self, t: int) -> float:
        """Cumulative product of (1 - beta) over the first t steps."""
        if not 0 <= t <= len(self.betas):
            raise DimensionError(f"step {t} outside schedule of length {len(self.betas)}")
        return float(np.prod([1.0 - b for b in self.betas[:t]]))


@dataclass(frozen=True, eq=False)
class PoseSequence:
    """
    Keypoint tracks for F frames and K keypoints.

    keypoints: [F, K, 2] pixel coordinates (x, y)
    visible: [F, K] booleans
    width, height: frame bounds the visible coordinates must respect
    """
    keypoints: np.ndarray
    visible: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        kp = np.asarray(self.keypoints, dtype=np.float64)
        vis = np.asarray(self.visible, dtype=bool)
        if kp.ndim != 3 or kp.shape[2] != 2:
            raise DimensionError(f"keypoints must be [F, K, 2], got {kp.shape}")
        if vis.shape != kp.shape[:2]:
            raise DimensionError(f"visibility shape {vis.shape} does not match keypoints {kp.shape[:2]}")
        if kp.shape[0] < 1:
            raise DimensionError("PoseSequence needs at least one frame")
        if self.width < 1 or self.height < 1:
            raise DimensionError("frame bounds must be positive")
        shown = kp[vis]
        if not np.all(np.isfinite(shown)):
            raise NumericalError("visible keypoints must be finite")
        if shown.size and (
            shown[:, 0].min() < 0 or shown[:, 0].max() > self.width - 1
            or shown[:, 1].min() < 0 or shown[:, 1].max() > self.height - 1
        ):
            raise DimensionError(f"visible keypoints must lie within {self.width}x{self.height}")
        object.__setattr__(self, "keypoints", _frozen_copy(kp))
        object.__setattr__(self, "visible", _frozen_copy(vis))

    @property
    def frames(self) -> int:
        return self.keypoints.shape[0]

    @property
    def num_keypoints(self) -> int:
        return self.keypoints.shape[1]
