from __future__ import annotations

from typing import TYPE_CHECKING

from segkit.exceptions import UnknownIdentifier

if TYPE_CHECKING:
    from segkit.ensembles.schemas import EnsembleRoster, StackingConfig


class EnsemblesStorage:
    def __init__(self):
        self._rosters: dict[str, EnsembleRoster] = {}
        self._stacking: dict[str, StackingConfig] = {}

    def add_roster(self, roster: EnsembleRoster):
        self._rosters[roster.id] = roster

    def get_roster(self, ensemble_id: str) -> EnsembleRoster:
        try:
            return self._rosters[ensemble_id]
        except KeyError:
            raise UnknownIdentifier(
                detail=f"Not found ensemble roster {ensemble_id!r}.",
                parameter="spec",
            )

    def roster_ids(self) -> list[str]:
        return list(self._rosters)

    def add_stacking(self, config: StackingConfig):
        self._stacking[config.id] = config

    def get_stacking(self, config_id: str) -> StackingConfig:
        try:
            return self._stacking[config_id]
        except KeyError:
            raise UnknownIdentifier(
                detail=f"Not found stacking configuration {config_id!r}.",
                parameter="mode",
            )

    def stacking_ids(self) -> list[str]:
        return list(self._stacking)


ensembles_storage = EnsemblesStorage()
