"""
Verification suites run by the ``gradcheck`` and ``shapes`` commands.

Gradient cases are tiny float64 instances of every block type; the loss is a fixed random projection of the
block output (or cross-entropy for blocks ending in a softmax).
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel

from segkit.ensembles.schemas import MergeMode, StackingConfig, StackingInput
from segkit.ensembles.stacking import StackingModel
from segkit.exceptions import UnknownIdentifier
from segkit.nn.attention import AttentionGate
from segkit.nn.blocks import ConvBlockU, ConvBlockV, DenseBlockQ, MultiKernelInput
from segkit.nn.deep_supervision import DeepSupervisionV1, DeepSupervisionV2, DeepSupervisionV3
from segkit.nn.enums import Activation, BlockKind
from segkit.nn.head import ClassificationHead
from segkit.nn.module import Module
from segkit.storages import topologies_storage
from segkit.tensor import Tensor, cross_entropy, multiply, softmax_channelwise, sum_all
from segkit.tensor.gradcheck import GradientCheckReport, gradient_check
from segkit.topology.builder import validate_shapes
from segkit.topology.schemas import ShapeReport
from segkit.utils.seeding import Stream, make_rng

log = logging.getLogger(__name__)

GRADCHECK_STEP = 1e-3
GRADCHECK_TOLERANCE = 1e-4
SHAPE_SUITE_SIZE = 64

CaseFactory = Callable[[np.random.Generator], tuple[Module, Callable[[], Tensor]]]


def _random(rng: np.random.Generator, *shape: int) -> Tensor:
    return Tensor(rng.standard_normal(shape))


def _projection_loss(rng: np.random.Generator, outputs: Callable[[], Sequence[Tensor]]) -> Callable[[], Tensor]:
    """``sum(out * w)`` over every output, with fixed random ``w`` per output."""
    weights = [Tensor(rng.standard_normal(out.shape)) for out in outputs()]

    def loss_fn() -> Tensor:
        total = None
        for out, weight in zip(outputs(), weights):
            term = sum_all(multiply(out, weight))
            total = term if total is None else total + term
        return total

    return loss_fn


def _one_hot(rng: np.random.Generator, height: int, width: int, num_classes: int) -> np.ndarray:
    return np.eye(num_classes)[rng.integers(0, num_classes, size=(height, width))]


def _u_case(rng):
    block = ConvBlockU(2, 3, rng)
    x = _random(rng, 6, 6, 2)
    return block, _projection_loss(rng, lambda: [block(x)])


def _v_case(rng):
    block = ConvBlockV(2, 3, 2, rng, activation=Activation.PRELU)
    x = _random(rng, 6, 6, 2)
    return block, _projection_loss(rng, lambda: [block(x)])


def _q_case(rng):
    block = DenseBlockQ(2, rng, width=3)
    x = _random(rng, 6, 6, 2)
    return block, _projection_loss(rng, lambda: [block(x)])


def _m_case(rng):
    block = MultiKernelInput(2, 4, rng)
    x = _random(rng, 8, 8, 2)
    return block, _projection_loss(rng, lambda: [block(x)])


def _ag_case(rng):
    gate = AttentionGate(3, 4, rng)
    encoder, decoder = _random(rng, 4, 4, 3), _random(rng, 2, 2, 4)
    return gate, _projection_loss(rng, lambda: [gate(encoder, decoder)])


def _ds_v1_case(rng):
    block = DeepSupervisionV1([2, 3, 4, 5, 6], 3, rng)
    feats = [_random(rng, 16 >> level, 16 >> level, channels) for level, channels in enumerate([2, 3, 4, 5, 6])]
    return block, _projection_loss(rng, lambda: block(feats))


def _ds_v2_case(rng):
    block = DeepSupervisionV2([2, 3, 4, 5], 3, rng)
    feats = [_random(rng, 8 >> level, 8 >> level, channels) for level, channels in enumerate([2, 3, 4, 5])]
    return block, _projection_loss(rng, lambda: block(feats))


def _ds_v3_case(rng):
    block = DeepSupervisionV3([2, 3, 4, 5, 6], rng, width=3)
    decoder = [_random(rng, 16 >> level, 16 >> level, channels) for level, channels in enumerate([2, 3, 4, 5])]
    bottleneck = _random(rng, 1, 1, 6)
    return block, _projection_loss(rng, lambda: block(decoder, bottleneck))


def _head_case(rng):
    head = ClassificationHead(3, 4, rng)
    x, target = _random(rng, 4, 4, 3), _one_hot(rng, 4, 4, 4)
    return head, lambda: cross_entropy(head(x), target)


def _stacking_case(rng):
    config = StackingConfig(input=StackingInput.NORMALIZED, merge=MergeMode.AVERAGE, hidden_width=5)
    model = StackingModel(config, [4, 4, 4], 4, rng)
    members = [softmax_channelwise(_random(rng, 4, 4, 4)).detach() for _ in range(3)]
    target = _one_hot(rng, 4, 4, 4)
    return model, lambda: cross_entropy(model(members), target)


GRADIENT_CASES: dict[str, CaseFactory] = {
    BlockKind.U.value: _u_case,
    BlockKind.V.value: _v_case,
    BlockKind.Q.value: _q_case,
    BlockKind.M.value: _m_case,
    BlockKind.AG.value: _ag_case,
    BlockKind.DS_V1.value: _ds_v1_case,
    BlockKind.DS_V2.value: _ds_v2_case,
    BlockKind.DS_V3.value: _ds_v3_case,
    BlockKind.HEAD.value: _head_case,
    "stacking": _stacking_case,
}


class GradientSuiteReport(BaseModel):
    cases: dict[str, GradientCheckReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.cases.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, report in self.cases.items() if not report.passed]


class ShapeSuiteReport(BaseModel):
    reports: list[ShapeReport]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def failures(self) -> list[str]:
        return [report.topology_id for report in self.reports if not report.passed]


def run_gradient_case(name: str, seed: int = 0) -> GradientCheckReport:
    if name not in GRADIENT_CASES:
        raise UnknownIdentifier(
            detail=f"Unknown gradient case {name!r}; known: {', '.join(GRADIENT_CASES)}.",
            parameter="case",
        )

    rng = make_rng(seed, Stream.CHECK, list(GRADIENT_CASES).index(name))
    module, loss_fn = GRADIENT_CASES[name](rng)
    module.astype(np.float64)
    module.train()
    report = gradient_check(
        loss_fn,
        dict(module.named_parameters()),
        step=GRADCHECK_STEP,
        tolerance=GRADCHECK_TOLERANCE,
        seed=seed,
    )
    log.info(
        "Gradient check %s: %s (max rel error %.3e)",
        name,
        "ok" if report.passed else "FAILED",
        report.max_rel_error,
    )
    return report


def run_gradient_suite(names: Sequence[str] = (), seed: int = 0) -> GradientSuiteReport:
    return GradientSuiteReport(cases={name: run_gradient_case(name, seed) for name in names or GRADIENT_CASES})


def run_shape_suite(
    topology_ids: Sequence[str] = (),
    size: int = SHAPE_SUITE_SIZE,
    seed: int = 0,
) -> ShapeSuiteReport:
    ids = list(topology_ids) or topologies_storage.topology_ids()
    return ShapeSuiteReport(
        reports=[
            validate_shapes(topologies_storage.get_topology(topology_id).spec, size, size, seed=seed, strict=False)
            for topology_id in ids
        ],
    )
