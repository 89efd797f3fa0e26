"""Forward noising, shared-noise initialization and frame embeddings."""
import numpy as np

from stsa.core.config import Settings, settings as default_settings
from stsa.core.errors import ConfigurationError, DimensionError
from stsa.core.rng import STREAM_NOISE, make_rng
from stsa.core.service_decorator import service_method
from stsa.models.latent import LatentVideo, NoiseSchedule


class NoiseService:
    """
    Service layer for the latent-tensor utilities every block relies on.
    Output precision follows the injected settings.
    """

    def __init__(self, settings: Settings = None):
        self.settings = settings or default_settings

    @service_method
    def forward_noise_step(self, z_prev: LatentVideo, beta_t: float, noise: LatentVideo) -> LatentVideo:
        """
        One forward diffusion step: sqrt(1 - beta) * z_prev + sqrt(beta) * noise.

        The endpoints beta = 0 and beta = 1 are accepted and return z_prev and
        noise exactly.
        """
        if z_prev.shape != noise.shape:
            raise DimensionError(f"noise shape {noise.shape} does not match latent shape {z_prev.shape}")
        if not 0.0 <= beta_t <= 1.0:
            raise ConfigurationError(f"beta_t must lie in [0, 1], got {beta_t}")
        if beta_t == 0.0:
            return LatentVideo(z_prev.data)
        if beta_t == 1.0:
            return LatentVideo(noise.data.astype(z_prev.dtype))
        keep = np.sqrt(1.0 - beta_t)
        mix = np.sqrt(beta_t)
        return z_prev.with_data(keep * z_prev.data + mix * noise.data)

    @service_method
    def noise_to_step(self, z0: LatentVideo, schedule: NoiseSchedule, t: int, seed: int) -> LatentVideo:
        """Apply the first ``t`` schedule steps with fresh standard-normal noise."""
        if not 0 <= t <= len(schedule):
            raise DimensionError(f"step {t} outside schedule of length {len(schedule)}")
        rng = make_rng(seed, STREAM_NOISE)
        z = z0
        for beta in schedule.betas[:t]:
            eps = z.with_data(rng.standard_normal(z.shape))
            z = self.forward_noise_step(z, beta, eps)
        return z

    @service_method
    def shared_noise_init(self, frames: int, height: int, width: int, channels: int, seed: int) -> LatentVideo:
        """One standard-normal frame, repeated bit-identically across all frames."""
        if min(frames, height, width, channels) < 1:
            raise DimensionError(f"dims must be positive, got {(frames, height, width, channels)}")
        rng = make_rng(seed, STREAM_NOISE)
        frame = rng.standard_normal((height, width, channels)).astype(self.settings.dtype)
        return LatentVideo(np.broadcast_to(frame, (frames, height, width, channels)))

    @service_method
    def frame_positional_embedding(self, frames: int, channels: int) -> np.ndarray:
        """
        Sinusoidal [F, C] embedding.

        Entry (f, 2i) is sin(f / 10000^(2i/C)) and (f, 2i+1) is cos of the same angle.
        """
        if channels < 2 or channels % 2:
            raise ConfigurationError(f"embedding width must be even, got {channels}")
        if frames < 1:
            raise DimensionError("need at least one frame")
        positions = np.arange(frames, dtype=np.float64)[:, None]
        rates = 10000.0 ** (np.arange(0, channels, 2, dtype=np.float64) / channels)
        angles = positions / rates[None, :]
        emb = np.empty((frames, channels), dtype=np.float64)
        emb[:, 0::2] = np.sin(angles)
        emb[:, 1::2] = np.cos(angles)
        return emb.astype(self.settings.dtype)

    @service_method
    def add_embedding(self, x: LatentVideo, embedding: np.ndarray) -> LatentVideo:
        """Broadcast an [F, C] embedding over rows and cols."""
        if embedding.shape != (x.frames, x.channels):
            raise DimensionError(f"embedding {embedding.shape} does not match {(x.frames, x.channels)}")
        return x.with_data(x.data + embedding[:, None, None, :].astype(x.dtype))
