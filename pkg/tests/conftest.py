"""
Shared fixtures for unit tests.

- Factory fixtures for tensors, flows, params, scenes and settings
- Seeded numpy generators so every randomized test is reproducible
"""
import numpy as np
import pytest

from stsa.core.config import Settings
from stsa.models.attention import AttentionParams
from stsa.models.flow import FlowField, FlowSet
from stsa.models.latent import LatentVideo
from stsa.schemas.scene import SceneObject, SceneSpec


# ==================== Factory Fixtures ====================

@pytest.fixture
def settings_factory():
    """
    Factory fixture for Settings with overrides.
    Usage: cfg = settings_factory(pad_mode="replicate")
    """
    def _create(**overrides):
        defaults = {
            "precision": "double",
            "seed": 0,
            "subspace": "4,4,4",
            "pad_mode": "error",
            "heads": 1,
            "residual": True,
            "token_cap": 4096,
            "out_dir": "runs",
            "log_level": "INFO",
            "sweep_workers": 1,
        }
        defaults.update(overrides)
        return Settings(**defaults)
    return _create


@pytest.fixture
def video_factory():
    """
    Factory fixture for random LatentVideo tensors.
    Usage: x = video_factory(8, 8, 8, 4, seed=3)
    """
    def _create(frames=4, height=4, width=4, channels=3, seed=0, dtype=np.float64):
        rng = np.random.default_rng(seed)
        return LatentVideo(rng.standard_normal((frames, height, width, channels)).astype(dtype))
    return _create


@pytest.fixture
def flowset_factory():
    """
    Factory fixture for FlowSets.
    Usage: flows = flowset_factory(8, 8, 8, dx=1.0) for constant motion,
    flows = flowset_factory(8, 8, 8, random=True, seed=1) for random integer flows.
    """
    def _create(frames=4, height=4, width=4, dx=0.0, dy=0.0, random=False, seed=0, span=2):
        if not random:
            return FlowSet.constant(frames, height, width, dx, dy)
        rng = np.random.default_rng(seed)

        def draw():
            return rng.integers(-span, span + 1, size=(height, width, 2)).astype(np.float64)

        forward = tuple(FlowField(k, k + 1, draw()) for k in range(frames - 1))
        backward = tuple(FlowField(k + 1, k, draw()) for k in range(frames - 1))
        return FlowSet(frames, height, width, forward, backward)
    return _create


@pytest.fixture
def params_factory():
    """
    Factory fixture for random AttentionParams.
    Usage: params = params_factory(channels=8, width=8, heads=2)
    """
    def _create(channels=3, width=None, heads=1, seed=0, scale=0.5, dtype=np.float64):
        rng = np.random.default_rng(seed)
        width = width or channels
        return AttentionParams.random(channels, width, rng, heads, scale=scale, dtype=dtype)
    return _create


@pytest.fixture
def scene_spec_factory():
    """
    Factory fixture for SceneSpec.
    Usage: scene = scene_spec_factory(velocity=(4, 0), pattern="alternate")
    """
    def _create(frames=8, height=8, width=8, channels=4, objects=None, **object_overrides):
        if objects is None:
            obj = {"shape": "square", "size": 2, "velocity": (1, 0), "pattern": "alternate"}
            obj.update(object_overrides)
            objects = [SceneObject(**obj)]
        return SceneSpec(frames=frames, height=height, width=width, channels=channels, objects=objects)
    return _create


@pytest.fixture
def rng():
    """Seeded generator for property loops."""
    return np.random.default_rng(12345)
