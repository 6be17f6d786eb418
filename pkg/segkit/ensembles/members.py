"""Ensemble members: trained networks of this package or externally supplied score maps."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from segkit.data.schemas import PatchConfig, Sample
from segkit.ensembles.schemas import StackingInput
from segkit.exceptions import InvalidEnsemble, ShapeMismatch
from segkit.formats.tsr import read_tsr
from segkit.storages.score_providers_storage import ScoreProvider
from segkit.tensor import Tensor, no_grad
from segkit.topology.network import UNetVariant
from segkit.training.inference import infer_scores

log = logging.getLogger(__name__)


class NetworkMember:
    """A frozen network; outputs are computed in evaluation mode without recording gradients."""

    def __init__(self, member_id: str, network: UNetVariant):
        self.id = member_id
        self.network = network.freeze().eval()

    def width(self, kind: StackingInput) -> int:
        if kind == StackingInput.NORMALIZED:
            return self.network.spec.num_classes
        return self.network.head.conv.in_channels

    def output(self, x: Tensor, kind: StackingInput = StackingInput.NORMALIZED) -> Tensor:
        with no_grad():
            if kind == StackingInput.NORMALIZED:
                return self.network.scores(x)
            return self.network.features(x)

    def score_map(
        self,
        sample: Sample,
        patch: PatchConfig,
        kind: StackingInput = StackingInput.NORMALIZED,
    ) -> np.ndarray:
        return infer_scores(lambda x: self.output(x, kind), sample.image, patch)


class ProviderMember:
    """Full-image score maps looked up by sample id; only usable with normalised scores."""

    def __init__(self, member_id: str, provider: ScoreProvider):
        self.id = member_id
        self.provider = provider

    def score_map(
        self,
        sample: Sample,
        patch: PatchConfig,
        kind: StackingInput = StackingInput.NORMALIZED,
    ) -> np.ndarray:
        if kind != StackingInput.NORMALIZED:
            msg = f"External member {self.id!r} only supplies normalised scores."
            raise InvalidEnsemble(detail=msg, parameter="input")

        scores = np.asarray(self.provider.scores(sample.id))
        if scores.shape[:2] != sample.labels.shape:
            raise ShapeMismatch(detail=f"Member {self.id!r}: score map {scores.shape} does not fit {sample.id!r}.")
        return scores


class DirectoryScoreProvider:
    """Score maps stored as ``<directory>/<sample id>.tsr``."""

    def __init__(self, directory: Path):
        self.directory = directory

    def scores(self, sample_id: str) -> np.ndarray:
        return read_tsr(self.directory / f"{sample_id}.tsr")
