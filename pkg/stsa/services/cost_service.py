"""Closed-form attention cost model."""
from stsa.core.errors import ConfigurationError, DimensionError
from stsa.schemas.cost import AttentionMode, CostReport
from stsa.schemas.subspace import SubspaceSpec


class CostService:
    """
    Multiply-accumulate counts per attention variant.

    Every token is projected once for Q, K, V and the output projection, so
    the projection term is 4*T*C*d for every mode; the score and value terms
    are each (queries x key span x d) summed over attention calls.
    """

    def cost_model(
        self, mode: AttentionMode, frames: int, height: int, width: int,
        channels: int, dim: int, spec: SubspaceSpec | None = None, heads: int = 1,
    ) -> CostReport:
        if min(frames, height, width, channels, dim, heads) < 1:
            raise DimensionError("all dims must be positive")
        if dim % heads:
            raise ConfigurationError(f"width {dim} is not divisible by {heads} heads")
        tokens = frames * height * width
        spatial = height * width
        label = None
        if mode == "subspace":
            if spec is None:
                raise ConfigurationError("subspace mode needs a subspace size")
            if not spec.divides(frames, height, width):
                raise DimensionError(f"subspace {spec.window} does not divide {(frames, height, width)}")
            n = spec.volume
            term, peak, label = (tokens // n) * n * n * dim, n, spec.label()
        elif mode in ("full", "crossframe-all"):
            term, peak = tokens * tokens * dim, tokens
        elif mode == "temporal":
            term, peak = spatial * frames * frames * dim, frames
        elif mode in ("crossframe-first", "crossframe-middle", "crossframe-previous"):
            term, peak = frames * spatial * spatial * dim, spatial
        else:
            raise ConfigurationError(f"unknown attention mode {mode!r}")
        projection = 4 * tokens * channels * dim
        return CostReport(
            mode=mode, frames=frames, height=height, width=width,
            channels=channels, dim=dim, heads=heads, subspace=label,
            projection_macs=projection, score_macs=term, value_macs=term,
            attention_macs=2 * term, total_macs=projection + 2 * term,
            peak_token_buffer=peak,
        )
