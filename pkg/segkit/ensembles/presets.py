"""
Named ensemble rosters E4..E13 and the two best stacking configurations.

``FCN`` members are external: they need a registered score provider.
"""

from __future__ import annotations

from segkit.ensembles.schemas import (
    AveragingMode,
    EnsembleRoster,
    EnsembleSpec,
    MergeMode,
    StackingConfig,
    StackingInput,
)
from segkit.exceptions import UnknownIdentifier
from segkit.nn.enums import OptimizerKind
from segkit.storages import ensembles_storage

EXTERNAL_FCN = "FCN"

_E7 = ["UD", "UAD", "UMD", "UAMD", "UVMD", "UQD", "UDD2"]
_E9 = ["UD", "UAD", "UMD", "UAMD", "UVMD", "UVDD", "UQD", "UDD", "UMDD"]
_E10 = [*_E9, "UDD2"]
_E11 = ["UA", *_E10]
_E12 = ["U1", *_E11]

NAMED_ROSTERS = {
    "E4": ["UAD", "UMD", "UQD", "UDD"],
    "E5": ["UD", "UAD", "UMD", "UAMD", "UDD2"],
    "E6": ["UD", "UAD", "UMD", "UAMD", "UVMD", "UVDD"],
    "E7": _E7,
    "E8": [EXTERNAL_FCN, *_E7],
    "E9": _E9,
    "E10": _E10,
    "E11": _E11,
    "E12": _E12,
    "E13": [EXTERNAL_FCN, *_E12],
}

NAMED_STACKING = (
    StackingConfig(
        id="NAD",
        input=StackingInput.NORMALIZED,
        merge=MergeMode.AVERAGE,
        optimizer=OptimizerKind.ADAM,
        learning_rate=0.00033,
    ),
    StackingConfig(
        id="TCD",
        input=StackingInput.TENSOR,
        merge=MergeMode.CONCAT,
        optimizer=OptimizerKind.ADAM,
        learning_rate=0.00033,
    ),
)

STACKING_PREFIX = "stacking-"


def register_named_ensembles():
    for ensemble_id, member_ids in NAMED_ROSTERS.items():
        ensembles_storage.add_roster(EnsembleRoster(id=ensemble_id, member_ids=member_ids))

    for config in NAMED_STACKING:
        ensembles_storage.add_stacking(config)


def resolve_ensemble(roster: str, mode: str) -> EnsembleSpec:
    """
    Spec from a roster id (or comma-separated topology ids) and a mode:
    ``arith``, ``geo`` or ``stacking-<config id>``.
    """
    if "," in roster:
        ensemble_id, member_ids = "custom", [item.strip() for item in roster.split(",") if item.strip()]
    else:
        ensemble_id, member_ids = roster, ensembles_storage.get_roster(roster).member_ids

    if mode.startswith(STACKING_PREFIX):
        stacking = ensembles_storage.get_stacking(mode[len(STACKING_PREFIX) :])
        return EnsembleSpec(id=ensemble_id, member_ids=member_ids, stacking=stacking)

    try:
        averaging = AveragingMode(mode)
    except ValueError:
        raise UnknownIdentifier(
            detail=f"Unknown ensemble mode {mode!r}; use arith, geo or {STACKING_PREFIX}<id>.",
            parameter="mode",
        )

    return EnsembleSpec(id=ensemble_id, member_ids=member_ids, averaging=averaging)


register_named_ensembles()
