"""
Unit tests for AlignService.

- reference frames and temporal windows
- collision-free permutations
- align / restore round trips and checksum guards
- rigid scenes aligned by their exact flows
"""
import numpy as np
import pytest

from stsa.core.errors import AlignmentMismatchError, DimensionError, FlowError
from stsa.models.flow import FlowField, FlowSet
from stsa.models.latent import LatentVideo
from stsa.schemas.scene import SceneObject, SceneSpec
from stsa.services.align_service import AlignService, realize_permutation
from stsa.services.scene_service import SceneService


def pairs_of(perm):
    return dict(zip(perm.sources.tolist(), perm.targets.tolist()))


class TestReferenceFrame:
    """Test cases for window reference frames"""

    @pytest.mark.parametrize("b,e,expected", [(0, 3, 1), (0, 0, 0), (4, 7, 5)])
    def test_central_frame(self, b, e, expected):
        """Should return floor((b + e) / 2)"""
        assert AlignService().reference_frame(b, e) == expected

    def test_invalid_window_raises(self):
        """Should raise DimensionError when b > e"""
        with pytest.raises(DimensionError):
            AlignService().reference_frame(3, 1)

    def test_windows_require_divisibility(self):
        """Should raise DimensionError when s_f does not divide F"""
        with pytest.raises(DimensionError):
            AlignService().temporal_windows(5, 4)

    def test_padding_truncates_last_window(self, settings_factory):
        """Should end with a short window under replicate padding"""
        service = AlignService(settings=settings_factory(pad_mode="replicate"))
        assert service.temporal_windows(5, 4) == [(0, 3), (4, 4)]


class TestRealizePermutation:
    """Test cases for the collision rule"""

    def test_tie_goes_to_lower_index(self):
        """Should let the row-major first mover win a tied claim and relocate the displaced cell"""
        # Arrange
        disp = np.zeros((1, 3, 2))
        disp[0, 0, 0] = 1.0
        disp[0, 2, 0] = -1.0

        # Act
        perm = realize_permutation(0, disp)

        # Assert
        assert pairs_of(perm) == {0: 1, 1: 0}

    def test_shorter_move_wins(self):
        """Should prefer the smaller squared offset"""
        disp = np.zeros((1, 4, 2))
        disp[0, 0, 0] = 3.0
        disp[0, 2, 0] = 1.0
        perm = realize_permutation(0, disp)
        assert pairs_of(perm)[2] == 3
        assert 0 not in pairs_of(perm)

    def test_claims_ranked_by_flow_magnitude(self):
        """Should let the smaller flow win even when rounding makes the offsets equal"""
        # Arrange
        disp = np.zeros((1, 3, 2))
        disp[0, 0, 0] = 1.4
        disp[0, 2, 0] = -0.6

        # Act
        perm = realize_permutation(0, disp)

        # Assert
        assert pairs_of(perm) == {1: 2, 2: 1}

    def test_clamped_far_mover_loses_to_near_mover(self):
        """Should rank a far mover by its flow, not by its clamped offset"""
        disp = np.zeros((1, 3, 2))
        disp[0, 1, 0] = 5.0
        disp[0, 0, 0] = 1.5
        perm = realize_permutation(0, disp)
        assert pairs_of(perm)[0] == 2

    def test_zero_field_is_identity(self):
        """Should move nothing under zero flow"""
        assert realize_permutation(2, np.zeros((4, 4, 2))).size == 0

    def test_random_fields_give_permutations(self, rng):
        """Should always realize a permutation of the moved cells"""
        for _ in range(200):
            disp = rng.integers(-3, 4, size=(5, 6, 2)).astype(np.float64)
            perm = realize_permutation(0, disp)
            assert np.array_equal(np.sort(perm.sources), np.sort(perm.targets))


class TestComputeAlignment:
    """Test cases for per-window maps"""

    def test_zero_flows_give_identity_maps(self, flowset_factory):
        """Should realize identity maps for zero flows"""
        maps = AlignService().compute_alignment(flowset_factory(8, 4, 4), (8, 4, 4), 4)
        assert len(maps) == 2
        assert all(m.is_identity for m in maps)

    def test_constant_flow_chain(self, flowset_factory):
        """Should move frame 0 by +1, frame 2 by -1 and frame 3 by -2 toward r=1"""
        # Arrange
        flows = flowset_factory(4, 2, 8, dx=1.0)

        # Act
        (amap,) = AlignService().compute_alignment(flows, (4, 2, 8), 4)

        # Assert
        assert amap.reference == 1
        frame0, frame2, frame3 = (pairs_of(amap.for_frame(k)) for k in (0, 2, 3))
        for row in range(2):
            base = row * 8
            assert all(frame0[base + x] == base + x + 1 for x in range(7))
            assert all(frame2[base + x] == base + x - 1 for x in range(1, 8))
            # cells 1 and 2 both clamp onto column 0; columns 3.. move freely
            assert all(frame3[base + x] == base + x - 2 for x in range(3, 8))
        assert amap.for_frame(1).size == 0

    def test_deterministic(self, flowset_factory):
        """Should realize identical maps from identical flows"""
        service = AlignService()
        flows = flowset_factory(4, 5, 5, random=True, seed=3)
        first = service.compute_alignment(flows, (4, 5, 5), 2)
        second = service.compute_alignment(flows, (4, 5, 5), 2)
        assert [m.checksum for m in first] == [m.checksum for m in second]

    def test_flow_grid_mismatch_raises(self, flowset_factory):
        """Should raise FlowError when flows do not cover the grid"""
        with pytest.raises(FlowError):
            AlignService().compute_alignment(flowset_factory(4, 4, 4), (4, 8, 8), 4)


class TestAlignRestore:
    """Test cases for the align / restore pair"""

    def test_identity_maps_leave_tensor_unchanged(self, video_factory, flowset_factory):
        """Should return the input bit-exactly under identity maps"""
        # Arrange
        service = AlignService()
        x = video_factory(4, 4, 4, 2)
        maps = service.compute_alignment(flowset_factory(4, 4, 4), x.grid, 2)

        # Act
        aligned = service.align(x, maps)

        # Assert
        assert np.array_equal(aligned.data, x.data)
        assert np.array_equal(service.restore(aligned, maps).data, x.data)

    def test_reference_frames_untouched(self, video_factory, flowset_factory):
        """Should never modify the reference frame of a window"""
        service = AlignService()
        x = video_factory(8, 5, 5, 2, seed=1)
        maps = service.compute_alignment(flowset_factory(8, 5, 5, random=True, seed=1), x.grid, 4)
        aligned = service.align(x, maps)
        for amap in maps:
            assert np.array_equal(aligned.data[amap.reference], x.data[amap.reference])

    def test_round_trip(self, video_factory, flowset_factory):
        """Should restore the aligned tensor bit-exactly"""
        service = AlignService()
        x = video_factory(4, 6, 6, 3, seed=2)
        maps = service.compute_alignment(flowset_factory(4, 6, 6, random=True, seed=2), x.grid, 4)
        aligned = service.align(x, maps)
        assert not np.array_equal(aligned.data, x.data)
        assert np.array_equal(service.restore(aligned, maps).data, x.data)

    def test_foreign_maps_detected(self, video_factory, flowset_factory):
        """Should raise AlignmentMismatchError when restoring with other maps"""
        # Arrange
        service = AlignService()
        x = video_factory(4, 6, 6, 1)
        maps = service.compute_alignment(flowset_factory(4, 6, 6, random=True, seed=1), x.grid, 4)
        other = service.compute_alignment(flowset_factory(4, 6, 6, random=True, seed=2), x.grid, 4)
        aligned = service.align(x, maps)

        # Act & Assert
        with pytest.raises(AlignmentMismatchError):
            service.restore(aligned, other)

    def test_explicit_checksum_checked(self, video_factory, flowset_factory):
        """Should verify an explicitly passed checksum"""
        service = AlignService()
        x = video_factory(4, 4, 4, 1)
        maps = service.compute_alignment(flowset_factory(4, 4, 4, random=True, seed=4), x.grid, 4)
        with pytest.raises(AlignmentMismatchError):
            service.restore(LatentVideo(x.data), maps, checksum="0" * 16)

    def test_unstamped_tensor_is_trusted(self, video_factory, flowset_factory):
        """Should restore a tensor without provenance"""
        service = AlignService()
        x = video_factory(4, 4, 4, 1)
        maps = service.compute_alignment(flowset_factory(4, 4, 4, random=True, seed=4), x.grid, 4)
        aligned = service.align(x, maps)
        restored = service.restore(LatentVideo(aligned.data), maps)
        assert np.array_equal(restored.data, x.data)

    def test_grid_mismatch_raises(self, video_factory, flowset_factory):
        """Should raise DimensionError when maps do not match the tensor"""
        service = AlignService()
        maps = service.compute_alignment(flowset_factory(4, 4, 4), (4, 4, 4), 4)
        with pytest.raises(DimensionError):
            service.align(video_factory(4, 5, 5, 1), maps)

    @pytest.mark.slow
    def test_round_trip_randomized(self, rng):
        """Should round-trip bit-exactly over 1000 random tensors and flows"""
        service = AlignService()
        for trial in range(1000):
            s_f = int(rng.integers(1, 4))
            frames = s_f * int(rng.integers(1, 3))
            height, width = (int(v) for v in rng.integers(1, 7, size=2))
            forward = rng.uniform(-3, 3, size=(max(frames - 1, 0), height, width, 2))
            backward = rng.uniform(-3, 3, size=forward.shape)
            flows = FlowSet(
                frames, height, width,
                tuple(FlowField(k, k + 1, forward[k]) for k in range(frames - 1)),
                tuple(FlowField(k + 1, k, backward[k]) for k in range(frames - 1)),
            )
            x = LatentVideo(rng.standard_normal((frames, height, width, 2)))
            maps = service.compute_alignment(flows, x.grid, s_f)
            assert np.array_equal(service.restore(service.align(x, maps), maps).data, x.data), trial


class TestRigidScenes:
    """Test cases for alignment with exact scene flows"""

    def scene(self):
        return SceneSpec(
            frames=4, height=8, width=8, channels=3,
            objects=[SceneObject(size=2, velocity=(1, 1), pattern="linear", start=(1, 1))],
        )

    def test_aligned_object_occupies_reference_cells(self):
        """Should move the object onto its reference-frame cells in every frame"""
        # Arrange
        scenes, service = SceneService(), AlignService()
        spec = self.scene()
        video, _, flows = scenes.gen_scene(spec, seed=0)
        mask = scenes.object_mask(spec, seed=0)

        # Act
        (amap,) = service.compute_alignment(flows, video.grid, 4)
        aligned = service.align(video, [amap])

        # Assert
        r = amap.reference
        for k in range(4):
            assert np.array_equal(aligned.data[k][mask[r]], video.data[r][mask[r]])

    def test_window_variation_zero_on_object(self):
        """Should give zero along-window variance on the aligned object cells"""
        # Arrange
        scenes, service = SceneService(), AlignService()
        spec = self.scene()
        video, _, flows = scenes.gen_scene(spec, seed=0)
        object_cells = scenes.object_mask(spec, seed=0)
        maps = service.compute_alignment(flows, video.grid, 4)
        mask = np.broadcast_to(object_cells[maps[0].reference], object_cells.shape)

        # Act
        aligned = service.window_variation(service.align(video, maps), 4, mask)
        raw = service.window_variation(video, 4, mask)

        # Assert
        assert aligned == pytest.approx(0.0, abs=1e-24)
        assert raw > 0.0
