"""Attention parameters, gradients and MAC instrumentation."""
from dataclasses import dataclass, fields

import numpy as np

from stsa.core.errors import ConfigurationError, DimensionError, NumericalError


@dataclass(frozen=True, eq=False)
class AttentionParams:
    """
    Projections for per-subspace attention.

    w_q, w_k, w_v: [C, d]; w_o: [d, C]; d must be divisible by ``heads``.
    """
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray
    heads: int = 1

    def __post_init__(self):
        mats = {}
        for name in ("w_q", "w_k", "w_v", "w_o"):
            mat = np.asarray(getattr(self, name))
            if mat.ndim != 2:
                raise DimensionError(f"{name} must be a matrix, got shape {mat.shape}")
            if not np.issubdtype(mat.dtype, np.floating):
                mat = mat.astype(np.float64)
            if not np.all(np.isfinite(mat)):
                raise NumericalError(f"{name} has non-finite entries")
            mat = np.array(mat, copy=True)
            mat.flags.writeable = False
            mats[name] = mat
        c, d = mats["w_q"].shape
        if mats["w_k"].shape != (c, d) or mats["w_v"].shape != (c, d):
            raise DimensionError(f"w_q, w_k, w_v must share shape {(c, d)}")
        if mats["w_o"].shape != (d, c):
            raise DimensionError(f"w_o must be {(d, c)}, got {mats['w_o'].shape}")
        if self.heads < 1 or d % self.heads:
            raise ConfigurationError(f"width {d} is not divisible by {self.heads} heads")
        for name, mat in mats.items():
            object.__setattr__(self, name, mat)

    @property
    def channels(self) -> int:
        return self.w_q.shape[0]

    @property
    def width(self) -> int:
        return self.w_q.shape[1]

    @property
    def head_dim(self) -> int:
        return self.width // self.heads

    @property
    def dtype(self) -> np.dtype:
        return self.w_q.dtype

    def astype(self, dtype) -> "AttentionParams":
        return AttentionParams(
            self.w_q.astype(dtype), self.w_k.astype(dtype),
            self.w_v.astype(dtype), self.w_o.astype(dtype), self.heads,
        )

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.w_q, self.w_k, self.w_v, self.w_o)

    def step(self, grads: "AttentionGrads", lr: float) -> "AttentionParams":
        """Plain gradient descent update."""
        return AttentionParams(
            self.w_q - lr * grads.w_q,
            self.w_k - lr * grads.w_k,
            self.w_v - lr * grads.w_v,
            self.w_o - lr * grads.w_o,
            self.heads,
        )

    @classmethod
    def identity_like(cls, channels: int, dtype=np.float64) -> "AttentionParams":
        """W_q = W_k = 0 and W_v = W_o = I: uniform weights, values passed through."""
        zeros = np.zeros((channels, channels), dtype=dtype)
        eye = np.eye(channels, dtype=dtype)
        return cls(zeros, zeros, eye, eye, 1)

    @classmethod
    def random(
        cls, channels: int, width: int, rng: np.random.Generator,
        heads: int = 1, scale: float | None = None, dtype=np.float64,
    ) -> "AttentionParams":
        scale = scale if scale is not None else 1.0 / np.sqrt(channels)

        def draw(shape):
            return (rng.standard_normal(shape) * scale).astype(dtype)

        return cls(
            draw((channels, width)), draw((channels, width)),
            draw((channels, width)), draw((width, channels)), heads,
        )


@dataclass(frozen=True, eq=False)
class AttentionGrads:
    """Gradients of a scalar loss with respect to the projections."""
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray

    def __add__(self, other: "AttentionGrads") -> "AttentionGrads":
        return AttentionGrads(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.w_q, self.w_k, self.w_v, self.w_o)

    @classmethod
    def zeros_like(cls, params: AttentionParams) -> "AttentionGrads":
        return cls(*(np.zeros_like(m) for m in params.matrices()))


@dataclass
class MacCounter:
    """
    Multiply-accumulate counter filled in by the attention kernels.

    projection: token projections (Q, K, V and the output projection)
    score: Q K^T products; value: softmax(.) V products
    peak_token_buffer: largest key/value span any query attended over
    """
    projection: int = 0
    score: int = 0
    value: int = 0
    peak_token_buffer: int = 0

    @property
    def attention(self) -> int:
        return self.score + self.value

    @property
    def total(self) -> int:
        return self.projection + self.score + self.value

    def add_projection(self, tokens: int, channels: int, width: int) -> None:
        self.projection += tokens * channels * width

    def add_attention(self, batches: int, queries: int, keys: int, width: int) -> None:
        self.score += batches * queries * keys * width
        self.value += batches * queries * keys * width
        self.peak_token_buffer = max(self.peak_token_buffer, keys)
