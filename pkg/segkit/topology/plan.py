from __future__ import annotations

from segkit.exceptions import InvalidDimension
from segkit.nn.deep_supervision import DS_V3_WIDTH
from segkit.topology.schemas import DEPTH, LevelShape, TopologySpec

SPATIAL_DIVISOR = 2**DEPTH


def check_input_size(height: int, width: int):
    if height <= 0 or width <= 0 or height % SPATIAL_DIVISOR or width % SPATIAL_DIVISOR:
        raise InvalidDimension(
            detail=f"Input {height}x{width} must be positive and divisible by {SPATIAL_DIVISOR}.",
        )


def plan_levels(spec: TopologySpec, height: int, width: int) -> list[LevelShape]:
    """
    Expected shape of every tensor the forward trace records, keyed like ``ForwardTrace.named_tensors``.

    Pure: nothing is built or evaluated.
    """
    check_input_size(height, width)
    channels = spec.level_channels()
    skips = spec.skip_channels()
    sizes = [(height >> level, width >> level) for level in range(DEPTH + 1)]

    plan: list[LevelShape] = []
    if spec.multi_kernel:
        plan.append(LevelShape(name="M", height=height, width=width, channels=spec.m))

    plan.extend(
        LevelShape(name=f"C{level + 1}", height=h, width=w, channels=channels[level])
        for level, (h, w) in enumerate(sizes)
    )

    fusion_levels = DEPTH + 1 if spec.ds_v1 else DEPTH
    plan.extend(
        LevelShape(
            name=f"S{level + 1}",
            height=sizes[level][0],
            width=sizes[level][1],
            channels=skips[0] if spec.ds_v1 and level == DEPTH else skips[level],
        )
        for level in range(fusion_levels)
    )

    if spec.attention:
        plan.extend(
            LevelShape(name=f"A{level + 1}", height=sizes[level][0], width=sizes[level][1], channels=1)
            for level in range(DEPTH)
        )

    plan.extend(
        LevelShape(
            name=f"D{level + 1}",
            height=sizes[level][0],
            width=sizes[level][1],
            channels=skips[level] + channels[level],
        )
        for level in range(DEPTH)
    )
    plan.extend(
        LevelShape(name=f"T{level + 1}", height=sizes[level][0], width=sizes[level][1], channels=channels[level])
        for level in range(DEPTH)
    )

    if spec.ds_v3:
        plan.extend(
            LevelShape(name=f"Z{level + 1}", height=h, width=w, channels=DS_V3_WIDTH)
            for level, (h, w) in enumerate(sizes)
        )

    head_channels = DS_V3_WIDTH if spec.ds_v3 else channels[0]
    plan.append(LevelShape(name="head_input", height=height, width=width, channels=head_channels))
    plan.append(LevelShape(name="scores", height=height, width=width, channels=spec.num_classes))
    return plan
