"""Toy denoising training of a single STSA block."""
import logging
from typing import Sequence

import numpy as np

from stsa.core.config import Settings, settings as default_settings
from stsa.core.errors import ConfigurationError, NumericalError, PrecisionError
from stsa.core.rng import STREAM_NOISE, STREAM_PARAMS, make_rng
from stsa.core.timing import timed
from stsa.models.attention import AttentionParams
from stsa.models.latent import LatentVideo
from stsa.schemas.block import BlockConfig
from stsa.schemas.report import AlignmentComparison, TrainSummary
from stsa.schemas.scene import SceneSpec
from stsa.services.block_service import BlockService, mse_loss
from stsa.services.noise_service import NoiseService
from stsa.services.scene_service import SceneService

logger = logging.getLogger(__name__)


class TrainingService:
    """
    Service layer for the toy training loop.

    One fixed noised sample of a synthetic scene is mapped back to the
    clean scene through one block; projections are updated by plain
    gradient descent with a fixed learning rate.
    """

    def __init__(
        self,
        block_service: BlockService = None,
        scene_service: SceneService = None,
        noise_service: NoiseService = None,
        settings: Settings = None,
    ):
        self.settings = settings or default_settings
        self.block_service = block_service or BlockService(settings=self.settings)
        self.scene_service = scene_service or SceneService()
        self.noise_service = noise_service or NoiseService(self.settings)

    def initial_params(self, channels: int, config: BlockConfig, seed: int) -> AttentionParams:
        """
        Small random W_q, W_k with W_v and W_o at the identity (truncated
        when d differs from C), so training starts from near-uniform
        window averaging.
        """
        dim = config.dim or channels
        if dim % config.heads:
            raise ConfigurationError(f"width {dim} is not divisible by {config.heads} heads")
        rng = make_rng(seed, STREAM_PARAMS)
        w_q = config.init_scale * rng.standard_normal((channels, dim))
        w_k = config.init_scale * rng.standard_normal((channels, dim))
        return AttentionParams(w_q, w_k, np.eye(channels, dim), np.eye(dim, channels), config.heads)

    @timed("train")
    def toy_train(
        self, scene: SceneSpec, config: BlockConfig, steps: int, lr: float, seed: int,
    ) -> tuple[TrainSummary, AttentionParams]:
        """
        Minimize MSE(block(noised), clean) for ``steps`` updates.

        The returned loss curve has ``steps + 1`` entries: the loss before
        every update and after the last one.
        """
        if self.settings.precision != "double":
            raise PrecisionError("toy training requires double precision")
        if steps < 0 or lr < 0:
            raise ConfigurationError("steps and lr must be non-negative")
        video, _, flows = self.scene_service.gen_scene(scene, seed)
        clean = video.astype(np.float64)
        noised = noised_input(self.noise_service, clean, config.beta, seed)
        plan = self.block_service.plan(clean.grid, flows, config.subspace, config.shifted, config.aligned)
        params = self.initial_params(clean.channels, config, seed)

        losses = []
        for step in range(steps + 1):
            y = self.block_service.forward(noised, plan, params, residual=config.residual)
            loss, grad = mse_loss(y, clean)
            if not np.isfinite(loss):
                raise NumericalError(f"loss diverged at step {step} (lr={lr}, last finite={losses[-1:]})")
            losses.append(loss)
            if step == steps:
                break
            grads = self.block_service.backward(noised, plan, params, grad)
            params = params.step(grads, lr)
        logger.info(
            f"Trained {'aligned' if config.aligned else 'unaligned'} block for {steps} steps: "
            f"loss {losses[0]:.6f} -> {losses[-1]:.6f}"
        )
        summary = TrainSummary(
            config=config, steps=steps, lr=lr, seed=seed, losses=losses,
            initial_loss=losses[0], final_loss=losses[-1],
        )
        return summary, params

    def compare_alignment(
        self, scene: SceneSpec, config: BlockConfig, seeds: Sequence[int], steps: int, lr: float,
    ) -> AlignmentComparison:
        """Paired aligned/unaligned runs with identical seeds and step counts."""
        aligned, unaligned = [], []
        for seed in seeds:
            on, _ = self.toy_train(scene, config.model_copy(update={"aligned": True}), steps, lr, seed)
            off, _ = self.toy_train(scene, config.model_copy(update={"aligned": False}), steps, lr, seed)
            aligned.append(on.final_loss)
            unaligned.append(off.final_loss)
        wins = sum(a <= u for a, u in zip(aligned, unaligned))
        return AlignmentComparison(
            seeds=list(seeds), aligned_final_losses=aligned,
            unaligned_final_losses=unaligned, aligned_wins=wins,
        )


def noised_input(noise_service: NoiseService, clean: LatentVideo, beta: float, seed: int) -> LatentVideo:
    """The fixed noised training sample for ``seed``."""
    eps = clean.with_data(make_rng(seed, STREAM_NOISE).standard_normal(clean.shape))
    return noise_service.forward_noise_step(clean, beta, eps)
