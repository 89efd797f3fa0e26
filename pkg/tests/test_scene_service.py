"""
Unit tests for SceneService.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from stsa.core.errors import SceneError
from stsa.schemas.scene import SceneObject, SceneSpec
from stsa.services.metrics_service import MetricsService
from stsa.services.scene_service import SceneService


def two_object_scene(**overrides):
    return SceneSpec(
        frames=3, height=8, width=8, channels=2,
        objects=[
            SceneObject(size=2, velocity=(1, 0), pattern="linear", start=(0, 0)),
            SceneObject(size=2, velocity=(0, 1), pattern="linear", start=(5, 3)),
        ],
        **overrides,
    )


class TestGenScene:
    """Test cases for synthetic scenes"""

    def test_static_object_gives_static_video(self, scene_spec_factory):
        """Should repeat frame 0 and emit zero flows for zero velocity"""
        # Arrange
        spec = scene_spec_factory(frames=4, velocity=(0, 0))

        # Act
        video, _, flows = SceneService().gen_scene(spec, seed=0)

        # Assert
        for k in range(1, 4):
            assert np.array_equal(video.data[k], video.data[0])
        assert all(not f.disp.any() for f in (*flows.forward, *flows.backward, *flows.direct.values()))

    def test_flow_on_object_cells_only(self):
        """Should carry the object step on its cells and zero elsewhere"""
        # Arrange
        spec = SceneSpec(
            frames=2, height=6, width=6, channels=1,
            objects=[SceneObject(size=2, velocity=(1, 0), pattern="linear", start=(1, 1))],
        )

        # Act
        _, _, flows = SceneService().gen_scene(spec, seed=0)

        # Assert
        expected = np.zeros((6, 6, 2))
        expected[1:3, 1:3] = (1, 0)
        np.testing.assert_array_equal(flows.forward[0].disp, expected)
        backward = np.zeros((6, 6, 2))
        backward[1:3, 2:4] = (-1, 0)
        np.testing.assert_array_equal(flows.backward[0].disp, backward)

    def test_forward_flows_carry_object_texture(self):
        """Should find every moved object cell at its flow target in the next frame"""
        # Arrange
        video, _, flows = SceneService().gen_scene(two_object_scene(), seed=0)

        # Act & Assert
        for k, field in enumerate(flows.forward):
            ys, xs = np.nonzero(np.any(field.disp != 0, axis=-1))
            assert ys.size == 8
            dx, dy = field.disp[ys, xs, 0].astype(int), field.disp[ys, xs, 1].astype(int)
            np.testing.assert_array_equal(video.data[k + 1, ys + dy, xs + dx], video.data[k, ys, xs])

    def test_direct_pairs_span_several_steps(self):
        """Should emit the accumulated object motion for non-adjacent pairs"""
        _, _, flows = SceneService().gen_scene(two_object_scene(), seed=0)
        assert set(flows.direct) == {(0, 2), (2, 0)}
        assert np.array_equal(flows.direct[(0, 2)].disp[0, 0], [2, 0])
        assert np.array_equal(flows.direct[(2, 0)].disp[5, 5], [0, -2])
        assert not flows.direct[(0, 2)].disp[7, 7].any()

    def test_direct_pairs_can_be_disabled(self):
        """Should leave direct flows empty when switched off"""
        _, _, flows = SceneService().gen_scene(two_object_scene(direct_pairs=False), seed=0)
        assert flows.direct == {}

    def test_keypoints_track_object_centers(self):
        """Should place each keypoint at its object's center"""
        _, poses, _ = SceneService().gen_scene(two_object_scene(), seed=0)
        np.testing.assert_allclose(poses.keypoints[2, 0], [2.5, 0.5])
        np.testing.assert_allclose(poses.keypoints[2, 1], [5.5, 5.5])
        assert poses.visible.all()

    def test_alternating_motion_returns(self, scene_spec_factory):
        """Should bring an alternating object back every second frame"""
        spec = scene_spec_factory(frames=5, velocity=(2, 1))
        video, _, _ = SceneService().gen_scene(spec, seed=3)
        assert np.array_equal(video.data[2], video.data[0])
        assert np.array_equal(video.data[4], video.data[0])
        assert not np.array_equal(video.data[1], video.data[0])

    def test_deterministic(self, scene_spec_factory):
        """Should produce identical scenes for identical seeds"""
        spec = scene_spec_factory()
        first, _, _ = SceneService().gen_scene(spec, seed=9)
        second, _, _ = SceneService().gen_scene(spec, seed=9)
        assert np.array_equal(first.data, second.data)

    def test_out_of_bounds_start_raises(self):
        """Should raise SceneError when an explicit start leaves the grid"""
        spec = SceneSpec(
            frames=4, height=4, width=4, channels=1,
            objects=[SceneObject(size=2, velocity=(1, 0), pattern="linear", start=(1, 0))],
        )
        with pytest.raises(SceneError):
            SceneService().gen_scene(spec, seed=0)

    def test_impossible_motion_raises(self):
        """Should raise SceneError when no start keeps the object in bounds"""
        spec = SceneSpec(
            frames=4, height=4, width=4, channels=1,
            objects=[SceneObject(size=2, velocity=(2, 0), pattern="linear")],
        )
        with pytest.raises(SceneError):
            SceneService().gen_scene(spec, seed=0)

    def test_wrap_keeps_object_size(self):
        """Should wrap the object around the grid instead of clipping it"""
        spec = SceneSpec(
            frames=3, height=4, width=4, channels=1, wrap=True,
            objects=[SceneObject(size=2, velocity=(2, 0), pattern="linear", start=(2, 0))],
        )
        mask = SceneService().object_mask(spec, seed=0)
        assert mask.sum(axis=(1, 2)).tolist() == [4, 4, 4]
        assert mask[1, 0, 0] and mask[1, 0, 1]

    def test_wrapped_flows_land_on_wrapped_cells(self):
        """Should give seam cells the displacement to their wrapped position"""
        # Arrange
        spec = SceneSpec(
            frames=4, height=8, width=8, channels=2, wrap=True,
            objects=[SceneObject(size=2, velocity=(1, 0), pattern="linear", start=(6, 2))],
        )
        service = SceneService()

        # Act
        video, _, flows = service.gen_scene(spec, seed=0)
        mask = service.object_mask(spec, seed=0)

        # Assert
        assert flows.forward[0].disp[2:4, 6, 0].tolist() == [1.0, 1.0]
        assert flows.forward[0].disp[2:4, 7, 0].tolist() == [-7.0, -7.0]
        assert flows.backward[0].disp[2:4, 0, 0].tolist() == [7.0, 7.0]
        assert flows.backward[0].disp[2:4, 7, 0].tolist() == [-1.0, -1.0]
        assert flows.direct[(0, 2)].disp[2:4, 6:8, 0].tolist() == [[-6.0, -6.0], [-6.0, -6.0]]
        assert MetricsService().along_flow_variation(video, flows, mask) == 0.0

    def test_blob_footprint(self):
        """Should cover a disc inside the bounding square"""
        spec = SceneSpec(
            frames=1, height=6, width=6, channels=1,
            objects=[SceneObject(shape="blob", size=5, start=(0, 0))],
        )
        mask = SceneService().object_mask(spec, seed=0)
        assert mask[0, 2, 2] and not mask[0, 0, 0]


class TestSceneSchema:
    """Test cases for scene validation"""

    def test_velocities_length_checked(self):
        """Should reject per-frame velocities of the wrong length"""
        with pytest.raises(ValidationError):
            SceneSpec(frames=4, objects=[SceneObject(velocities=[(1, 0)])])

    def test_oversized_object_rejected(self):
        """Should reject objects larger than the grid"""
        with pytest.raises(ValidationError):
            SceneSpec(height=4, width=4, objects=[SceneObject(size=5)])

    def test_explicit_velocities_override(self):
        """Should use per-frame velocities when given"""
        obj = SceneObject(velocities=[(1, 0), (0, 2)])
        assert obj.motion(3) == [(1, 0), (0, 2)]
