"""Model averaging and stacking over the named ensemble rosters."""

from .averaging import average, average_arith, average_geo, geometric_mean
from .ensemble import Ensemble, build_fold_ensembles, evaluate_ensemble, fold_members, train_stacking
from .members import DirectoryScoreProvider, NetworkMember, ProviderMember
from .presets import NAMED_ROSTERS, NAMED_STACKING, resolve_ensemble
from .schemas import (
    AveragingMode,
    EnsembleRoster,
    EnsembleSpec,
    MergeMode,
    StackingConfig,
    StackingInput,
)
from .stacking import StackingModel, merged_width

__all__ = [
    "NAMED_ROSTERS",
    "NAMED_STACKING",
    "AveragingMode",
    "DirectoryScoreProvider",
    "Ensemble",
    "EnsembleRoster",
    "EnsembleSpec",
    "MergeMode",
    "NetworkMember",
    "ProviderMember",
    "StackingConfig",
    "StackingInput",
    "StackingModel",
    "average",
    "average_arith",
    "average_geo",
    "build_fold_ensembles",
    "evaluate_ensemble",
    "fold_members",
    "geometric_mean",
    "merged_width",
    "resolve_ensemble",
    "train_stacking",
]
