from __future__ import annotations

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from segkit.data.schemas import PatchConfig
from segkit.exceptions import InvalidConfig
from segkit.nn.enums import OptimizerKind
from segkit.storages import topologies_storage
from segkit.topology.schemas import TopologySpec

DEFAULT_EPOCHS = 300
DEFAULT_BATCH_SIZE = 4
FOLD_COUNT = 3


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    optimizer: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = Field(default=0.00033, gt=0)
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=0)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=1)
    seed: int = 0
    augmentation: bool = True
    patch: PatchConfig = PatchConfig()

    @classmethod
    def for_topology(cls, topology_id: str, **overrides: Any) -> TrainConfig:
        """Optimiser and learning rate the named topology is trained with, plus ``overrides``."""
        preset = topologies_storage.get_topology(topology_id)
        return cls.model_validate(
            {"optimizer": preset.optimizer, "learning_rate": preset.learning_rate, **overrides},
        )


class FoldPlan(BaseModel):
    """Patient ids per role in one fold; the test patients are shared by all folds."""

    model_config = ConfigDict(frozen=True)

    fold: int
    train_patients: list[str]
    validation_patients: list[str]
    test_patients: list[str]

    @model_validator(mode="after")
    def validate_disjoint(self) -> FoldPlan:
        roles = (self.train_patients, self.validation_patients, self.test_patients)
        seen: set[str] = set()
        for patients in roles:
            overlap = seen & set(patients)
            if overlap:
                msg = f"Fold {self.fold}: patients {sorted(overlap)} appear in more than one role."
                raise InvalidConfig(detail=msg, pointer="/folds")
            seen |= set(patients)
        return self

    @property
    def patients(self) -> set[str]:
        return {*self.train_patients, *self.validation_patients, *self.test_patients}


class FoldSet(BaseModel):
    seed: int
    folds: list[FoldPlan]


class RunConfig(BaseModel):
    """Everything needed to repeat a cross-validated training run."""

    model_config = ConfigDict(extra="forbid")

    topology: TopologySpec
    train: TrainConfig
    manifest: Optional[str] = None


class EpochRecord(BaseModel):
    epoch: int
    train_loss: float
    train_accuracy: float
    validation_loss: float
    validation_accuracy: float


class TrainResult(BaseModel):
    """
    Per-epoch history and the weights of the best validation-accuracy epoch.

    ``best_epoch`` is ``None`` when no epoch ran; ``state`` then holds the initial weights.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    history: list[EpochRecord]
    best_epoch: Optional[int] = None
    best_validation_accuracy: Optional[float] = None
    state: dict[str, np.ndarray]
