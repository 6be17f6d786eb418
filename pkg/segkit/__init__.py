"""Composable U-Net variants, ensembles and IoU evaluation for lumbar-spine MRI segmentation."""

from pathlib import Path

from segkit.exceptions import SegkitError
from segkit.topology import TopologySpec, build, resolve_topology

from segkit.ensembles import EnsembleSpec, resolve_ensemble  # isort: skip

__version__ = Path(__file__).parent.joinpath("VERSION").read_text().strip()

__all__ = [
    "EnsembleSpec",
    "SegkitError",
    "TopologySpec",
    "build",
    "resolve_ensemble",
    "resolve_topology",
]
