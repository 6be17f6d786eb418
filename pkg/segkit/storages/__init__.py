from segkit.storages.ensembles_storage import ensembles_storage
from segkit.storages.score_providers_storage import score_providers_storage
from segkit.storages.topologies_storage import topologies_storage

__all__ = [
    "ensembles_storage",
    "score_providers_storage",
    "topologies_storage",
]
