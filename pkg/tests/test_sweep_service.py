"""
Unit tests for SweepService.
"""
import logging
from unittest.mock import Mock

import pytest

from stsa.core.errors import DimensionError
from stsa.schemas.scene import SceneObject, SceneSpec
from stsa.schemas.subspace import SubspaceSpec
from stsa.services.block_service import BlockService
from stsa.services.cost_service import CostService
from stsa.services.sweep_service import DEFAULT_SIZES, SweepService


def sweep_scene():
    return SceneSpec(frames=8, height=8, width=8, channels=2, objects=[SceneObject(size=2)])


class TestSweepSubspaceSizes:
    """Test cases for subspace-size sweeps"""

    def test_rows_follow_given_order(self):
        """Should return one row per size in the order given"""
        # Arrange
        sizes = [SubspaceSpec(s_f=4, s_h=4, s_w=4), SubspaceSpec(s_f=2, s_h=2, s_w=2)]

        # Act
        rows = SweepService().sweep_subspace_sizes(sizes, sweep_scene(), seed=0)

        # Assert
        assert [r.subspace for r in rows] == ["4,4,4", "2,2,2"]
        assert [r.num_subspaces for r in rows] == [8, 64]
        assert all(r.along_flow_variation >= 0 and r.naive_variation >= 0 for r in rows)

    def test_costs_match_cost_model(self):
        """Should report the closed-form MACs of every size"""
        spec = SubspaceSpec(s_f=4, s_h=2, s_w=2)
        (row,) = SweepService().sweep_subspace_sizes([spec], sweep_scene(), seed=0, dim=4)
        cost = CostService().cost_model("subspace", 8, 8, 8, 2, 4, spec)
        assert row.total_macs == cost.total_macs
        assert row.peak_token_buffer == 16

    def test_default_sizes_cost_increases(self):
        """Should grow in total MACs across the default sizes"""
        rows = SweepService().sweep_subspace_sizes(DEFAULT_SIZES, sweep_scene(), seed=0)
        totals = [r.total_macs for r in rows]
        assert totals == sorted(totals)
        assert len(set(totals)) == len(totals)

    def test_non_divisible_sizes_skipped(self, caplog):
        """Should skip sizes that do not divide the scene with a warning"""
        # Arrange
        block = Mock(spec=BlockService)
        block.stsa_block.side_effect = lambda video, flows, spec, params: video
        service = SweepService(block_service=block)
        sizes = [SubspaceSpec(s_f=3, s_h=2, s_w=2), SubspaceSpec(s_f=4, s_h=4, s_w=4)]

        # Act
        with caplog.at_level(logging.WARNING, logger="stsa.services.sweep_service"):
            rows = service.sweep_subspace_sizes(sizes, sweep_scene(), seed=0)

        # Assert
        assert [r.subspace for r in rows] == ["4,4,4"]
        assert block.stsa_block.call_count == 1
        assert "Skipping subspace 3,2,2" in caplog.text

    def test_no_divisible_size_raises(self):
        """Should raise DimensionError when every size is skipped"""
        with pytest.raises(DimensionError):
            SweepService().sweep_subspace_sizes([SubspaceSpec(s_f=3, s_h=3, s_w=3)], sweep_scene(), seed=0)

    def test_workers_do_not_change_rows(self):
        """Should produce identical rows with a thread pool"""
        sizes = [SubspaceSpec(s_f=2, s_h=2, s_w=2), SubspaceSpec(s_f=4, s_h=4, s_w=4)]
        serial = SweepService().sweep_subspace_sizes(sizes, sweep_scene(), seed=1, workers=1)
        pooled = SweepService().sweep_subspace_sizes(sizes, sweep_scene(), seed=1, workers=2)
        assert [r.model_dump() for r in serial] == [r.model_dump() for r in pooled]
