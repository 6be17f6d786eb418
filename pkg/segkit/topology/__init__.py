"""Assembly of the U-Net variants from declarative specs."""

from segkit.topology.builder import TopologyBuilder, build, resolve_topology, validate_shapes
from segkit.topology.network import UNetVariant
from segkit.topology.plan import plan_levels
from segkit.topology.presets import NAMED_TOPOLOGIES
from segkit.topology.schemas import ForwardTrace, LevelShape, ShapeReport, TopologyPreset, TopologySpec

__all__ = [
    "NAMED_TOPOLOGIES",
    "ForwardTrace",
    "LevelShape",
    "ShapeReport",
    "TopologyBuilder",
    "TopologyPreset",
    "TopologySpec",
    "UNetVariant",
    "build",
    "plan_levels",
    "resolve_topology",
    "validate_shapes",
]
