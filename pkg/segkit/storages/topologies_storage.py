from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from segkit.exceptions import UnknownIdentifier

if TYPE_CHECKING:
    from segkit.topology.schemas import TopologyPreset

log = logging.getLogger(__name__)


class TopologiesStorage:
    def __init__(self):
        self._presets: dict[str, TopologyPreset] = {}

    def add_topology(self, preset: TopologyPreset):
        if preset.spec.id in self._presets:
            log.warning("Topology %r is registered twice, keeping the last one", preset.spec.id)
        self._presets[preset.spec.id] = preset

    def get_topology(self, topology_id: str) -> TopologyPreset:
        try:
            return self._presets[topology_id]
        except KeyError:
            raise UnknownIdentifier(
                detail=f"Not found topology {topology_id!r}. Known ids: {', '.join(self.topology_ids())}.",
                parameter="topology",
            )

    def has_topology(self, topology_id: str) -> bool:
        return topology_id in self._presets

    def topology_ids(self) -> list[str]:
        return list(self._presets)


topologies_storage = TopologiesStorage()
