from stsa.models.latent import LatentVideo, NoiseSchedule, PoseSequence
from stsa.models.flow import FlowField, FlowSet
from stsa.models.partition import SubspaceBlocks, SubspacePartition
from stsa.models.alignment import AlignmentMap, FramePermutation, maps_checksum
from stsa.models.attention import AttentionGrads, AttentionParams, MacCounter

__all__ = [
    "LatentVideo", "NoiseSchedule", "PoseSequence",
    "FlowField", "FlowSet",
    "SubspaceBlocks", "SubspacePartition",
    "AlignmentMap", "FramePermutation", "maps_checksum",
    "AttentionGrads", "AttentionParams", "MacCounter",
]
