"""Scaled dot-product attention kernels, baselines and analytic gradients."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import softmax

from stsa.core.config import Settings, settings as default_settings
from stsa.core.errors import ConfigurationError, DimensionError, MemoryGuardError, NumericalError, PrecisionError
from stsa.core.service_decorator import service_method
from stsa.models.attention import AttentionGrads, AttentionParams, MacCounter
from stsa.models.latent import LatentVideo
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.subspace_service import SubspaceService

logger = logging.getLogger(__name__)

CROSSFRAME_MODES = ("first", "middle", "previous", "all")


@dataclass
class _ForwardCache:
    """Intermediates of a batched forward pass, kept for the backward pass."""
    x: np.ndarray        # [B, n, C]
    q: np.ndarray        # [B, h, n, dh]
    k: np.ndarray
    v: np.ndarray
    probs: np.ndarray    # [B, h, n, n]
    merged: np.ndarray   # [B, n, d]


def _split_heads(a: np.ndarray, heads: int) -> np.ndarray:
    b, n, d = a.shape
    return a.reshape(b, n, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(a: np.ndarray) -> np.ndarray:
    b, h, n, dh = a.shape
    return a.transpose(0, 2, 1, 3).reshape(b, n, h * dh)


class AttentionService:
    """
    Service layer for scaled dot-product attention over token sets.

    Every variant projects each token once (Q, K, V and the output
    projection) and then attends over a variant-specific key span, so the
    MAC counter sees the same projection cost for every mode.
    """

    def __init__(self, subspace_service: SubspaceService = None, settings: Settings = None):
        self.settings = settings or default_settings
        self.subspace_service = subspace_service or SubspaceService(self.settings)

    def _check_tokens(self, tokens: np.ndarray, params: AttentionParams) -> None:
        if tokens.shape[-1] != params.channels:
            raise DimensionError(f"tokens have {tokens.shape[-1]} channels, params expect {params.channels}")
        if tokens.shape[-2] < 1:
            raise DimensionError("attention needs at least one token")
        if not np.all(np.isfinite(tokens)):
            raise NumericalError("attention input has non-finite entries")

    def _project(self, tokens: np.ndarray, params: AttentionParams, counter: MacCounter | None):
        """Q, K, V of ``tokens`` [B, n, C], each [B, n, d]."""
        w_q, w_k, w_v, _ = params.astype(tokens.dtype).matrices()
        if counter is not None:
            count = tokens.shape[0] * tokens.shape[1]
            for _ in range(3):
                counter.add_projection(count, params.channels, params.width)
        return tokens @ w_q, tokens @ w_k, tokens @ w_v

    def _output(self, merged: np.ndarray, params: AttentionParams, counter: MacCounter | None) -> np.ndarray:
        if counter is not None:
            counter.add_projection(merged.shape[0] * merged.shape[1], params.width, params.channels)
        return merged @ params.w_o.astype(merged.dtype)

    def _attend(
        self, q: np.ndarray, k: np.ndarray, v: np.ndarray, heads: int,
        mask: np.ndarray | None = None, counter: MacCounter | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Softmax(Q K^T / sqrt(d_head)) V per head.

        q: [B, nq, d]; k, v: [B, nk, d]; mask: optional boolean [nq, nk] of
        allowed keys. Returns the merged heads [B, nq, d] and the
        probabilities [B, h, nq, nk].
        """
        qh, kh, vh = (_split_heads(a, heads) for a in (q, k, v))
        scale = 1.0 / np.sqrt(qh.shape[-1])
        scores = (qh @ kh.transpose(0, 1, 3, 2)) * scale
        if mask is not None:
            if not mask.any(axis=-1).all():
                raise ConfigurationError("every query must be allowed at least one key")
            scores = np.where(mask, scores, -np.inf)
        probs = softmax(scores, axis=-1)
        if counter is not None:
            counter.add_attention(q.shape[0], q.shape[1], k.shape[1], q.shape[2])
        return _merge_heads(probs @ vh), probs

    def _self_attention(
        self, tokens: np.ndarray, params: AttentionParams,
        mask: np.ndarray | None = None, counter: MacCounter | None = None,
    ) -> tuple[np.ndarray, _ForwardCache]:
        q, k, v = self._project(tokens, params, counter)
        merged, probs = self._attend(q, k, v, params.heads, mask, counter)
        out = self._output(merged, params, counter)
        cache = _ForwardCache(
            tokens, *(_split_heads(a, params.heads) for a in (q, k, v)), probs, merged,
        )
        return out, cache

    @service_method
    def attend_blocks(
        self, blocks: np.ndarray, params: AttentionParams, counter: MacCounter | None = None,
    ) -> np.ndarray:
        """Independent self-attention inside each of the [N, n, C] blocks."""
        blocks = np.asarray(blocks)
        if blocks.ndim != 3:
            raise DimensionError(f"blocks must be [N, n, C], got {blocks.shape}")
        self._check_tokens(blocks, params)
        out, _ = self._self_attention(blocks, params, counter=counter)
        return out

    def subspace_attention(
        self, tokens: np.ndarray, params: AttentionParams, counter: MacCounter | None = None,
    ) -> np.ndarray:
        """Attention over the [n, C] tokens of one subspace."""
        tokens = np.asarray(tokens)
        if tokens.ndim != 2:
            raise DimensionError(f"tokens must be [n, C], got {tokens.shape}")
        return self.attend_blocks(tokens[None], params, counter)[0]

    @service_method
    def windowed_attention(
        self, x: LatentVideo, spec: SubspaceSpec, params: AttentionParams,
        counter: MacCounter | None = None,
    ) -> LatentVideo:
        """split -> per-subspace attention -> merge, without alignment."""
        blocks, partition = self.subspace_service.split(x, spec)
        attended = blocks.map(lambda tokens: self.attend_blocks(tokens, params, counter))
        return self.subspace_service.merge(attended, partition)

    @service_method
    def full_attention(
        self, x: LatentVideo, params: AttentionParams,
        mask: np.ndarray | None = None, counter: MacCounter | None = None,
    ) -> LatentVideo:
        """
        Attention over all F*H*W tokens jointly, row-major (f, h, w) order.

        ``mask`` is an optional boolean [T, T] array of allowed query/key pairs.
        """
        total = x.frames * x.height * x.width
        if total > self.settings.token_cap:
            raise MemoryGuardError(f"{total} tokens exceed the full-attention cap of {self.settings.token_cap}")
        if mask is not None and mask.shape != (total, total):
            raise DimensionError(f"mask must be {(total, total)}, got {mask.shape}")
        tokens = x.data.reshape(1, total, x.channels)
        self._check_tokens(tokens, params)
        out, _ = self._self_attention(tokens, params, mask, counter)
        return x.with_data(out.reshape(x.grid + (params.channels,)))

    @service_method
    def temporal_attention(
        self, x: LatentVideo, params: AttentionParams, counter: MacCounter | None = None,
    ) -> LatentVideo:
        """Attention over the F tokens at each spatial location."""
        f, h, w, c = x.shape
        tokens = x.data.transpose(1, 2, 0, 3).reshape(h * w, f, c)
        self._check_tokens(tokens, params)
        out, _ = self._self_attention(tokens, params, counter=counter)
        return x.with_data(out.reshape(h, w, f, c).transpose(2, 0, 1, 3))

    def key_frames(self, frames: int, mode: str) -> list[int] | None:
        """Key frame of every query frame, or None when every frame is a key."""
        if mode == "first":
            return [0] * frames
        if mode == "middle":
            return [frames // 2] * frames
        if mode == "previous":
            return [max(k - 1, 0) for k in range(frames)]
        if mode == "all":
            return None
        raise ConfigurationError(f"unknown crossframe mode {mode!r}; expected one of {CROSSFRAME_MODES}")

    @service_method
    def crossframe_attention(
        self, x: LatentVideo, mode: str, params: AttentionParams, counter: MacCounter | None = None,
    ) -> LatentVideo:
        """Each frame's tokens attend to the tokens of the designated key frame(s)."""
        f, h, w, c = x.shape
        sources = self.key_frames(f, mode)
        if sources is None and f * h * w > self.settings.token_cap:
            raise MemoryGuardError(
                f"{f * h * w} tokens exceed the all-frame crossframe cap of {self.settings.token_cap}"
            )
        tokens = x.data.reshape(f, h * w, c)
        self._check_tokens(tokens, params)
        q, k, v = self._project(tokens, params, counter)
        if sources is None:
            k = np.broadcast_to(k.reshape(1, f * h * w, -1), (f, f * h * w, k.shape[-1]))
            v = np.broadcast_to(v.reshape(1, f * h * w, -1), (f, f * h * w, v.shape[-1]))
        else:
            k, v = k[sources], v[sources]
        merged, _ = self._attend(q, k, v, params.heads, counter=counter)
        out = self._output(merged, params, counter)
        return x.with_data(out.reshape(f, h, w, c))

    @service_method
    def attention_backward(
        self, tokens: np.ndarray, params: AttentionParams, upstream_grad: np.ndarray,
    ) -> tuple[np.ndarray, AttentionGrads]:
        """
        Analytic gradients of subspace attention.

        ``tokens`` is [n, C] or a batch [B, n, C] of independent blocks;
        parameter gradients are summed over the batch in block order.
        Only double precision is accepted.
        """
        tokens = np.asarray(tokens)
        upstream_grad = np.asarray(upstream_grad)
        if tokens.dtype != np.float64 or params.dtype != np.float64 or upstream_grad.dtype != np.float64:
            raise PrecisionError("attention gradients require double precision")
        if upstream_grad.shape != tokens.shape:
            raise DimensionError(f"upstream gradient {upstream_grad.shape} does not match tokens {tokens.shape}")
        single = tokens.ndim == 2
        x = tokens[None] if single else tokens
        dy = upstream_grad[None] if single else upstream_grad
        if x.ndim != 3:
            raise DimensionError(f"tokens must be [n, C] or [B, n, C], got {tokens.shape}")
        self._check_tokens(x, params)
        _, cache = self._self_attention(x, params)
        w_q, w_k, w_v, w_o = params.matrices()
        scale = 1.0 / np.sqrt(params.head_dim)

        grad_w_o = np.einsum("bnd,bnc->dc", cache.merged, dy)
        d_merged = _split_heads(dy @ w_o.T, params.heads)
        d_probs = d_merged @ cache.v.transpose(0, 1, 3, 2)
        d_v = cache.probs.transpose(0, 1, 3, 2) @ d_merged
        d_scores = cache.probs * (d_probs - (d_probs * cache.probs).sum(axis=-1, keepdims=True))
        d_q = (d_scores @ cache.k) * scale
        d_k = (d_scores.transpose(0, 1, 3, 2) @ cache.q) * scale
        d_q, d_k, d_v = (_merge_heads(a) for a in (d_q, d_k, d_v))

        grads = AttentionGrads(
            np.einsum("bnc,bnd->cd", x, d_q),
            np.einsum("bnc,bnd->cd", x, d_k),
            np.einsum("bnc,bnd->cd", x, d_v),
            grad_w_o,
        )
        d_x = d_q @ w_q.T + d_k @ w_k.T + d_v @ w_v.T
        return (d_x[0] if single else d_x), grads

    def run_mode(
        self, mode: str, x: LatentVideo, params: AttentionParams,
        spec: SubspaceSpec | None = None, counter: MacCounter | None = None,
    ) -> LatentVideo:
        """Dispatch a cost-model mode name to its kernel."""
        if mode == "subspace":
            if spec is None:
                raise ConfigurationError("subspace mode needs a subspace size")
            return self.windowed_attention(x, spec, params, counter)
        if mode == "full":
            return self.full_attention(x, params, counter=counter)
        if mode == "temporal":
            return self.temporal_attention(x, params, counter)
        if mode.startswith("crossframe-"):
            return self.crossframe_attention(x, mode.removeprefix("crossframe-"), params, counter)
        raise ConfigurationError(f"unknown attention mode {mode!r}")
