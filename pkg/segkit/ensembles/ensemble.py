from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Optional, Union

import numpy as np

from segkit.data.schemas import PatchConfig, Sample
from segkit.ensembles.averaging import average
from segkit.ensembles.members import NetworkMember, ProviderMember
from segkit.ensembles.schemas import EnsembleSpec, StackingConfig, StackingInput
from segkit.ensembles.stacking import StackingModel
from segkit.exceptions import InvalidEnsemble, UnknownIdentifier
from segkit.formats.config import write_model
from segkit.formats.weights import save_weights
from segkit.metrics.schemas import ClassThresholds, EvaluationReport, LabellingCriterion
from segkit.metrics.thresholds import tune_thresholds
from segkit.storages import score_providers_storage
from segkit.tensor import Tensor, no_grad
from segkit.training.datasets import PatchSet
from segkit.training.folds import select_patients
from segkit.training.pipeline import THRESHOLDS_FILE, LoadedRun, evaluate_scores, fold_dir
from segkit.training.schemas import DEFAULT_BATCH_SIZE, TrainConfig, TrainResult
from segkit.training.trainer import Trainer

log = logging.getLogger(__name__)

Member = Union[NetworkMember, ProviderMember]

SPEC_FILE = "ensemble.json"
STACKING_WEIGHTS_FILE = "stacking.tsr"


class Ensemble:
    """Members combined on whole-image score maps by averaging or by a trained stacking model."""

    def __init__(
        self,
        spec: EnsembleSpec,
        members: Sequence[Member],
        stacking_model: Optional[StackingModel] = None,
    ):
        if spec.stacking is not None and stacking_model is None:
            msg = f"Ensemble {spec.id!r} uses stacking but no stacking model was given."
            raise InvalidEnsemble(detail=msg)

        self.spec = spec
        self.members = list(members)
        self.stacking_model = stacking_model

    @property
    def input_kind(self) -> StackingInput:
        return self.spec.stacking.input if self.spec.stacking is not None else StackingInput.NORMALIZED

    def combine(self, member_maps: Sequence[np.ndarray]) -> np.ndarray:
        if self.stacking_model is None:
            return average(member_maps, self.spec.averaging)

        self.stacking_model.eval()
        with no_grad():
            return self.stacking_model([Tensor(np.asarray(item, dtype=np.float32)) for item in member_maps]).data

    def score_sample(self, sample: Sample, patch: PatchConfig) -> np.ndarray:
        return self.combine([member.score_map(sample, patch, self.input_kind) for member in self.members])


def train_stacking(
    config: StackingConfig,
    members: Sequence[Member],
    train: Sequence[Sample],
    validation: Sequence[Sample],
    num_classes: int,
    patch: PatchConfig,
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    augmentation: bool = True,
) -> tuple[StackingModel, TrainResult]:
    """Train only the stacking model; members stay frozen and their outputs are recomputed per batch."""
    if any(not isinstance(member, NetworkMember) for member in members):
        msg = "Stacking models are trained on network members only."
        raise InvalidEnsemble(detail=msg, parameter="member_ids")

    model = StackingModel.create(config, [member.width(config.input) for member in members], num_classes, seed=seed)
    train_config = TrainConfig(
        optimizer=config.optimizer,
        learning_rate=config.learning_rate,
        epochs=config.epochs,
        batch_size=batch_size,
        seed=seed,
        augmentation=augmentation,
        patch=patch,
    )

    def scores_fn(x: Tensor) -> Tensor:
        return model([member.output(x, config.input) for member in members])

    log.info("Training stacking model %s over %s members for %s epochs", config.id, len(members), config.epochs)
    result = Trainer(model, train_config, scores_fn=scores_fn).fit(
        PatchSet.from_samples(train, patch, num_classes),
        PatchSet.from_samples(validation, patch, num_classes),
    )
    return model, result


def _check_runs(runs: Sequence[LoadedRun]) -> dict[str, LoadedRun]:
    if not runs:
        msg = "An ensemble needs at least one trained run."
        raise InvalidEnsemble(detail=msg, parameter="runs")

    reference = runs[0]
    for run in runs[1:]:
        if run.folds.folds != reference.folds.folds:
            msg = f"Runs {str(reference.run_dir)!r} and {str(run.run_dir)!r} were trained on different folds."
            raise InvalidEnsemble(detail=msg, parameter="runs")
        if run.num_classes != reference.num_classes or run.patch != reference.patch:
            msg = f"Runs {str(reference.run_dir)!r} and {str(run.run_dir)!r} differ in classes or patch size."
            raise InvalidEnsemble(detail=msg, parameter="runs")

    return {run.config.topology.id: run for run in runs}


def fold_members(spec: EnsembleSpec, runs: dict[str, LoadedRun], fold: int) -> list[Member]:
    members: list[Member] = []
    for member_id in spec.member_ids:
        if member_id in runs:
            members.append(NetworkMember(member_id, runs[member_id].networks[fold]))
        elif score_providers_storage.has_provider(member_id):
            members.append(ProviderMember(member_id, score_providers_storage.get_provider(member_id)))
        else:
            raise UnknownIdentifier(
                detail=f"Ensemble member {member_id!r} has neither a trained run nor a score provider.",
                parameter="member_ids",
            )
    return members


def build_fold_ensembles(
    spec: EnsembleSpec,
    runs: Sequence[LoadedRun],
    samples: Sequence[Sample],
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    out_dir: Optional[Path] = None,
) -> list[Ensemble]:
    """One ensemble per fold; stacking models are trained on that fold's training and validation patients."""
    by_id = _check_runs(runs)
    reference = runs[0]
    if out_dir is not None:
        write_model(spec, out_dir / SPEC_FILE)

    ensembles = []
    for plan in reference.folds.folds:
        members = fold_members(spec, by_id, plan.fold)
        stacking_model = None
        if spec.stacking is not None:
            stacking_model, _ = train_stacking(
                spec.stacking,
                members,
                select_patients(samples, plan.train_patients),
                select_patients(samples, plan.validation_patients),
                reference.num_classes,
                reference.patch,
                seed=seed,
                batch_size=batch_size,
            )
            if out_dir is not None:
                save_weights(stacking_model, fold_dir(out_dir, plan.fold) / STACKING_WEIGHTS_FILE)
        ensembles.append(Ensemble(spec, members, stacking_model))

    return ensembles


def evaluate_ensemble(
    spec: EnsembleSpec,
    runs: Sequence[LoadedRun],
    samples: Sequence[Sample],
    criterion: LabellingCriterion = LabellingCriterion.MAP,
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    out_dir: Optional[Path] = None,
) -> EvaluationReport:
    """
    Fold-wise evaluation on the shared test patients, averaged across folds, exactly like a single run.

    Threshold labelling tunes the ensemble's own thresholds on each fold's validation patients.
    """
    ensembles = build_fold_ensembles(spec, runs, samples, seed=seed, batch_size=batch_size, out_dir=out_dir)
    reference = runs[0]
    patch = reference.patch

    def fold_scores(fold: int, test: Sequence[Sample]) -> list[np.ndarray]:
        return [ensembles[fold].score_sample(sample, patch) for sample in test]

    def fold_thresholds(fold: int) -> ClassThresholds:
        validation = select_patients(samples, reference.folds.folds[fold].validation_patients)
        scores = fold_scores(fold, validation)
        thresholds = tune_thresholds(scores, [sample.labels for sample in validation])
        if out_dir is not None:
            write_model(thresholds, fold_dir(out_dir, fold) / THRESHOLDS_FILE)
        return thresholds

    log.info("Evaluating ensemble %s (%s) with %s members", spec.id, spec.mode_name, len(spec.member_ids))
    return evaluate_scores(fold_scores, reference.folds, samples, reference.num_classes, criterion, fold_thresholds)
