from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from segkit.exceptions import InvalidEnsemble
from segkit.nn.enums import OptimizerKind

MIN_MEMBERS = 2
MAX_MEMBERS = 13
DEFAULT_HIDDEN_WIDTH = 64
STACKING_EPOCHS = 50


class AveragingMode(str, Enum):
    ARITH = "arith"
    GEO = "geo"


class StackingInput(str, Enum):
    """Member output fed to the stack: softmax scores or the tensor entering each member's head."""

    NORMALIZED = "normalized"
    TENSOR = "tensor"


class MergeMode(str, Enum):
    CONCAT = "concat"
    AVERAGE = "average"
    ADD = "add"


class StackingConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = "custom"
    input: StackingInput = StackingInput.NORMALIZED
    merge: MergeMode = MergeMode.AVERAGE
    hidden_width: int = Field(default=DEFAULT_HIDDEN_WIDTH, ge=1)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = Field(default=0.00033, gt=0)
    epochs: int = Field(default=STACKING_EPOCHS, ge=0)


class EnsembleRoster(BaseModel):
    """Named list of member topology ids."""

    model_config = ConfigDict(frozen=True)

    id: str
    member_ids: list[str]


class EnsembleSpec(BaseModel):
    """Members and how their outputs are combined: exactly one of ``averaging`` or ``stacking``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = "custom"
    member_ids: list[str]
    averaging: Optional[AveragingMode] = None
    stacking: Optional[StackingConfig] = None

    @model_validator(mode="after")
    def validate_members(self) -> EnsembleSpec:
        if not MIN_MEMBERS <= len(self.member_ids) <= MAX_MEMBERS:
            msg = f"Ensemble {self.id!r} has {len(self.member_ids)} members, expected {MIN_MEMBERS}..{MAX_MEMBERS}."
            raise InvalidEnsemble(detail=msg, pointer="/member_ids")

        if len(set(self.member_ids)) != len(self.member_ids):
            msg = f"Ensemble {self.id!r} lists a member twice."
            raise InvalidEnsemble(detail=msg, pointer="/member_ids")

        if (self.averaging is None) == (self.stacking is None):
            msg = f"Ensemble {self.id!r} needs exactly one of averaging or stacking."
            raise InvalidEnsemble(detail=msg, pointer="/averaging")

        return self

    @property
    def mode_name(self) -> str:
        return self.averaging.value if self.averaging is not None else f"stacking-{self.stacking.id}"
