from __future__ import annotations

import logging
from typing import Protocol

import numpy as np

from segkit.exceptions import UnknownIdentifier

log = logging.getLogger(__name__)


class ScoreProvider(Protocol):
    """Source of full-image score maps computed outside the package (for example an FCN8 model)."""

    def scores(self, sample_id: str) -> np.ndarray: ...


class ScoreProvidersStorage:
    def __init__(self):
        self._providers: dict[str, ScoreProvider] = {}

    def add_provider(self, member_id: str, provider: ScoreProvider):
        log.info("Registered external score provider %r", member_id)
        self._providers[member_id] = provider

    def get_provider(self, member_id: str) -> ScoreProvider:
        try:
            return self._providers[member_id]
        except KeyError:
            raise UnknownIdentifier(
                detail=f"Member {member_id!r} needs an external score provider; none is registered.",
                parameter="member_ids",
            )

    def has_provider(self, member_id: str) -> bool:
        return member_id in self._providers

    def remove_provider(self, member_id: str):
        self._providers.pop(member_id, None)


score_providers_storage = ScoreProvidersStorage()
