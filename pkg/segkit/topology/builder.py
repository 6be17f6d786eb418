from __future__ import annotations

import logging
from typing import Any, Union

import numpy as np

from segkit.exceptions import InternalInconsistency
from segkit.storages import topologies_storage
from segkit.tensor import Tensor, no_grad
from segkit.topology.network import UNetVariant
from segkit.topology.plan import plan_levels
from segkit.topology.schemas import ShapeCheck, ShapeReport, TopologySpec, check_block_combination
from segkit.utils.seeding import Stream, make_rng

log = logging.getLogger(__name__)


def resolve_topology(topology: Union[str, TopologySpec], **overrides: Any) -> TopologySpec:
    """
    Named preset or explicit spec, with field overrides (``m``, ``num_classes``...) applied and re-validated.
    """
    spec = topologies_storage.get_topology(topology).spec if isinstance(topology, str) else topology
    if not overrides:
        return spec

    return TopologySpec.model_validate({**spec.model_dump(), **overrides})


class TopologyBuilder:
    def __init__(self, spec: TopologySpec, dtype: type = np.float32):
        self._spec = check_block_combination(spec)
        self._dtype = dtype

    def build(self, seed: int = 0) -> UNetVariant:
        network = UNetVariant(self._spec, make_rng(seed, Stream.INIT))
        network.astype(self._dtype)
        log.debug(
            "Built %s (%s) with %s parameters",
            self._spec.id,
            self._spec.configuration,
            network.parameter_count(),
        )
        return network


def build(spec: TopologySpec, seed: int = 0, dtype: type = np.float32) -> UNetVariant:
    return TopologyBuilder(spec, dtype=dtype).build(seed)


def validate_shapes(
    spec: TopologySpec,
    height: int = 64,
    width: int = 64,
    seed: int = 0,
    strict: bool = True,
) -> ShapeReport:
    """
    Build the network, run one forward pass and compare every traced tensor with ``plan_levels``.

    :param strict: raise ``InternalInconsistency`` on the first mismatch instead of reporting it
    """
    plan = plan_levels(spec, height, width)
    network = build(spec, seed=seed).eval()
    rng = make_rng(seed, Stream.CHECK)
    x = Tensor(rng.standard_normal((height, width, spec.in_channels)).astype(np.float32))
    with no_grad():
        traced = network(x).named_tensors()

    checks = []
    for expected in plan:
        actual = traced.get(expected.name)
        check = ShapeCheck(
            name=expected.name,
            expected=expected.shape,
            actual=actual.shape if actual is not None else (0, 0, 0),
        )
        if strict and not check.ok:
            raise InternalInconsistency(
                detail=f"Topology {spec.id!r}: {check.name} has shape {check.actual}, plan says {check.expected}.",
            )
        checks.append(check)

    if set(traced) - {item.name for item in plan}:
        unexpected = sorted(set(traced) - {item.name for item in plan})
        raise InternalInconsistency(detail=f"Topology {spec.id!r}: unplanned trace entries {unexpected}.")

    score_sums = traced["scores"].data.astype(np.float64).sum(axis=-1)
    report = ShapeReport(
        topology_id=spec.id,
        height=height,
        width=width,
        parameter_count=network.parameter_count(),
        checks=checks,
        max_score_sum_error=float(np.abs(score_sums - 1).max()),
    )
    log.info(
        "Shapes of %s at %sx%s: %s (%s parameters)",
        spec.id,
        height,
        width,
        "ok" if report.passed else "FAILED",
        report.parameter_count,
    )
    return report
