"""File formats: TSR1 tensors, PGM label maps, JSON documents, manifests and weights."""

from .config import read_model, write_model
from .manifest import Manifest, ManifestRecord, load_manifest, load_samples, write_dataset
from .pgm import read_pgm, write_pgm
from .tsr import load_tensor, read_tsr, write_tsr
from .weights import WeightsIndex, load_weights, read_state, save_weights

__all__ = [
    "Manifest",
    "ManifestRecord",
    "WeightsIndex",
    "load_manifest",
    "load_samples",
    "load_tensor",
    "load_weights",
    "read_model",
    "read_pgm",
    "read_state",
    "read_tsr",
    "save_weights",
    "write_dataset",
    "write_model",
    "write_pgm",
    "write_tsr",
]
