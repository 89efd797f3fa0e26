"""
Unit tests for TrainingService.
"""
from unittest.mock import patch

import numpy as np
import pytest

from stsa.core.errors import ConfigurationError, PrecisionError
from stsa.schemas.block import BlockConfig
from stsa.schemas.report import TrainSummary
from stsa.schemas.scene import SceneObject, SceneSpec
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.noise_service import NoiseService
from stsa.services.scene_service import SceneService
from stsa.services.subspace_service import SubspaceService
from stsa.services.training_service import TrainingService, noised_input

SMALL = SubspaceSpec(s_f=2, s_h=2, s_w=2)


def small_scene(scene_spec_factory):
    return scene_spec_factory(frames=4, height=4, width=4, channels=2, velocity=(1, 0))


class TestToyTrain:
    """Test cases for the toy denoising loop"""

    def test_zero_learning_rate_keeps_loss(self, scene_spec_factory):
        """Should report a flat loss curve for lr=0"""
        summary, _ = TrainingService().toy_train(small_scene(scene_spec_factory), BlockConfig(subspace=SMALL), 3, 0.0, 0)
        assert len(summary.losses) == 4
        assert len(set(summary.losses)) == 1

    def test_zero_steps(self, scene_spec_factory):
        """Should return only the initial loss for zero steps"""
        summary, _ = TrainingService().toy_train(small_scene(scene_spec_factory), BlockConfig(subspace=SMALL), 0, 0.1, 0)
        assert summary.losses == [summary.initial_loss]
        assert summary.final_loss == summary.initial_loss

    def test_initial_loss_is_window_mean_error(self, scene_spec_factory):
        """Should start from plain window averaging with zero query/key init"""
        # Arrange
        scene = small_scene(scene_spec_factory)
        config = BlockConfig(subspace=SMALL, aligned=False, init_scale=0.0)
        clean, _, _ = SceneService().gen_scene(scene, seed=1)
        noised = noised_input(NoiseService(), clean, config.beta, seed=1)
        subspaces = SubspaceService()
        blocks, partition = subspaces.split(noised, SMALL)
        means = np.broadcast_to(blocks.tokens.mean(axis=1, keepdims=True), blocks.tokens.shape)
        expected = float(np.mean((subspaces.merge(means, partition).data - clean.data) ** 2))

        # Act
        summary, _ = TrainingService().toy_train(scene, config, 0, 0.0, seed=1)

        # Assert
        assert summary.initial_loss == pytest.approx(expected, rel=1e-12)

    @pytest.mark.slow
    def test_loss_decreases(self, scene_spec_factory):
        """Should lower the reconstruction loss over 200 steps"""
        summary, params = TrainingService().toy_train(
            small_scene(scene_spec_factory), BlockConfig(subspace=SMALL), 200, 0.05, 0,
        )
        assert summary.final_loss < summary.initial_loss
        assert np.all(np.isfinite(summary.losses))
        assert params.channels == 2

    def test_single_precision_refused(self, scene_spec_factory, settings_factory):
        """Should raise PrecisionError under single precision"""
        service = TrainingService(settings=settings_factory(precision="single"))
        with pytest.raises(PrecisionError):
            service.toy_train(small_scene(scene_spec_factory), BlockConfig(subspace=SMALL), 1, 0.1, 0)

    def test_negative_learning_rate_refused(self, scene_spec_factory):
        """Should raise ConfigurationError for a negative learning rate"""
        with pytest.raises(ConfigurationError):
            TrainingService().toy_train(small_scene(scene_spec_factory), BlockConfig(subspace=SMALL), 1, -0.1, 0)


class TestInitialParams:
    """Test cases for projection initialization"""

    def test_value_and_output_start_at_identity(self):
        """Should truncate the identity when d differs from C"""
        params = TrainingService().initial_params(4, BlockConfig(dim=6), seed=0)
        np.testing.assert_array_equal(params.w_v, np.eye(4, 6))
        np.testing.assert_array_equal(params.w_o, np.eye(6, 4))

    def test_seeded(self):
        """Should draw identical projections for identical seeds"""
        service = TrainingService()
        first = service.initial_params(3, BlockConfig(), seed=5)
        second = service.initial_params(3, BlockConfig(), seed=5)
        assert np.array_equal(first.w_q, second.w_q)

    def test_heads_must_divide_width(self):
        """Should raise ConfigurationError when heads do not divide d"""
        with pytest.raises(ConfigurationError):
            TrainingService().initial_params(3, BlockConfig(heads=2), seed=0)


class TestCompareAlignment:
    """Test cases for paired aligned/unaligned runs"""

    def test_pairs_runs_per_seed(self, scene_spec_factory):
        """Should train both variants per seed and count aligned wins"""
        # Arrange
        service = TrainingService()
        config = BlockConfig(subspace=SMALL)

        def fake_train(scene, cfg, steps, lr, seed):
            final = 1.0 if cfg.aligned else 2.0 - seed
            return TrainSummary(
                config=cfg, steps=steps, lr=lr, seed=seed, losses=[final], initial_loss=final, final_loss=final,
            ), None

        # Act
        with patch.object(service, "toy_train", side_effect=fake_train) as train:
            result = service.compare_alignment(small_scene(scene_spec_factory), config, [0, 1, 2], 5, 0.1)

        # Assert
        assert train.call_count == 6
        assert [c.args[1].aligned for c in train.call_args_list] == [True, False] * 3
        assert result.unaligned_final_losses == [2.0, 1.0, 0.0]
        assert result.aligned_wins == 2

    @pytest.mark.slow
    def test_alignment_helps_on_fast_motion(self):
        """Should reach a lower loss with alignment in at least 8 of 10 seeds when objects move a full window per frame"""
        scene = SceneSpec(
            frames=8, height=16, width=16, channels=4,
            objects=[SceneObject(size=4, velocity=(4, 0), pattern="alternate")],
        )
        config = BlockConfig(subspace=SubspaceSpec(s_f=4, s_h=4, s_w=4))
        result = TrainingService().compare_alignment(scene, config, list(range(10)), 50, 0.05)
        assert result.aligned_wins >= 8
