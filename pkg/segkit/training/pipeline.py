"""
Cross-validated runs on disk.

A run directory holds ``run.json``, ``folds.json`` and per fold ``fold_<k>/weights.tsr`` (with its
``weights.json`` index), ``history.csv`` and ``thresholds.json``.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Optional

import numpy as np

from segkit.data.schemas import PatchConfig, Sample
from segkit.exceptions import EmptyDataset, MissingArtifact
from segkit.formats.config import read_model, write_model
from segkit.formats.weights import load_weights, save_weights
from segkit.metrics.iou import average_folds, fold_metrics
from segkit.metrics.labelling import label_scores
from segkit.metrics.schemas import ClassThresholds, EvaluationReport, LabellingCriterion
from segkit.metrics.thresholds import tune_thresholds
from segkit.tensor import Tensor
from segkit.topology.builder import build
from segkit.topology.network import UNetVariant
from segkit.training.datasets import PatchSet
from segkit.training.folds import make_folds, select_patients, split_samples
from segkit.training.history import write_history_csv
from segkit.training.inference import infer_scores
from segkit.training.schemas import FoldSet, RunConfig, TrainResult
from segkit.training.trainer import Trainer

log = logging.getLogger(__name__)

RUN_FILE = "run.json"
FOLDS_FILE = "folds.json"
WEIGHTS_FILE = "weights.tsr"
HISTORY_FILE = "history.csv"
THRESHOLDS_FILE = "thresholds.json"

ScoresFn = Callable[[Tensor], Tensor]


def fold_dir(run_dir: Path, fold: int) -> Path:
    return run_dir / f"fold_{fold}"


def score_samples(
    scores_fn: ScoresFn,
    samples: Sequence[Sample],
    patch: PatchConfig,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Whole-image score maps and the matching label maps."""
    return [infer_scores(scores_fn, sample.image, patch) for sample in samples], [sample.labels for sample in samples]


def tune_fold_thresholds(scores_fn: ScoresFn, samples: Sequence[Sample], patch: PatchConfig) -> ClassThresholds:
    if not samples:
        msg = "Threshold tuning needs validation samples."
        raise EmptyDataset(detail=msg)

    return tune_thresholds(*score_samples(scores_fn, samples, patch))


def train_fold(config: RunConfig, folds: FoldSet, fold: int, samples: Sequence[Sample], out_dir: Path) -> TrainResult:
    spec, train_config = config.topology, config.train
    train, validation, _ = split_samples(samples, folds.folds[fold])
    log.info("Fold %s: training %s on %s images, validating on %s", fold, spec.id, len(train), len(validation))

    network = build(spec, seed=train_config.seed)
    result = Trainer(network, train_config).fit(
        PatchSet.from_samples(train, train_config.patch, spec.num_classes),
        PatchSet.from_samples(validation, train_config.patch, spec.num_classes),
    )
    save_weights(network, out_dir / WEIGHTS_FILE)
    write_history_csv(result.history, out_dir / HISTORY_FILE)
    write_model(tune_fold_thresholds(network.scores, validation, train_config.patch), out_dir / THRESHOLDS_FILE)
    return result


def train_run(samples: Sequence[Sample], config: RunConfig, run_dir: Path) -> list[TrainResult]:
    folds = make_folds((sample.patient_id for sample in samples), seed=config.train.seed)
    write_model(config, run_dir / RUN_FILE)
    write_model(folds, run_dir / FOLDS_FILE)
    results = [
        train_fold(config, folds, plan.fold, samples, fold_dir(run_dir, plan.fold)) for plan in folds.folds
    ]
    log.info("Finished run %s in %s", config.topology.id, run_dir)
    return results


class LoadedRun:
    """A trained run: its config, fold plan, one network per fold and the tuned thresholds."""

    def __init__(
        self,
        run_dir: Path,
        config: RunConfig,
        folds: FoldSet,
        networks: list[UNetVariant],
        thresholds: list[Optional[ClassThresholds]],
    ):
        self.run_dir = run_dir
        self.config = config
        self.folds = folds
        self.networks = networks
        self.thresholds = thresholds

    @property
    def num_classes(self) -> int:
        return self.config.topology.num_classes

    @property
    def patch(self) -> PatchConfig:
        return self.config.train.patch

    def fold_thresholds(self, fold: int) -> ClassThresholds:
        thresholds = self.thresholds[fold]
        if thresholds is None:
            msg = f"Run {str(self.run_dir)!r} has no tuned thresholds for fold {fold}."
            raise MissingArtifact(detail=msg)
        return thresholds

    def mean_thresholds(self) -> ClassThresholds:
        values = np.mean([self.fold_thresholds(fold).values for fold in range(len(self.networks))], axis=0)
        return ClassThresholds(num_classes=self.num_classes, values=values.tolist())


def load_run(run_dir: Path) -> LoadedRun:
    if not (run_dir / RUN_FILE).is_file():
        msg = f"{str(run_dir)!r} is not a run directory (no {RUN_FILE})."
        raise MissingArtifact(detail=msg, parameter="run")

    config = read_model(run_dir / RUN_FILE, RunConfig)
    folds = read_model(run_dir / FOLDS_FILE, FoldSet)
    networks, thresholds = [], []
    for plan in folds.folds:
        directory = fold_dir(run_dir, plan.fold)
        if not (directory / WEIGHTS_FILE).is_file():
            msg = f"Missing weights of fold {plan.fold} in {str(run_dir)!r}."
            raise MissingArtifact(detail=msg, parameter="run")

        networks.append(load_weights(build(config.topology, seed=config.train.seed), directory / WEIGHTS_FILE).eval())
        threshold_path = directory / THRESHOLDS_FILE
        thresholds.append(read_model(threshold_path, ClassThresholds) if threshold_path.is_file() else None)

    log.info("Loaded run %s (%s folds) from %s", config.topology.id, len(networks), run_dir)
    return LoadedRun(run_dir, config, folds, networks, thresholds)


def retune_thresholds(run: LoadedRun, samples: Sequence[Sample]) -> list[ClassThresholds]:
    tuned = []
    for plan, network in zip(run.folds.folds, run.networks):
        thresholds = tune_fold_thresholds(
            network.scores,
            select_patients(samples, plan.validation_patients),
            run.patch,
        )
        write_model(thresholds, fold_dir(run.run_dir, plan.fold) / THRESHOLDS_FILE)
        tuned.append(thresholds)

    run.thresholds = list(tuned)
    return tuned


def evaluate_scores(
    fold_scores: Callable[[int, Sequence[Sample]], list[np.ndarray]],
    folds: FoldSet,
    samples: Sequence[Sample],
    num_classes: int,
    criterion: LabellingCriterion,
    thresholds: Callable[[int], Optional[ClassThresholds]],
) -> EvaluationReport:
    """
    Label every fold's score maps of the shared test patients and average the fold metrics.

    ``fold_scores(fold, samples)`` returns one score map per sample.
    """
    metrics = []
    for plan in folds.folds:
        test = select_patients(samples, plan.test_patients)
        if not test:
            msg = f"No test images for fold {plan.fold}."
            raise EmptyDataset(detail=msg)

        fold_thresholds = thresholds(plan.fold) if criterion == LabellingCriterion.TH else None
        predictions = [label_scores(scores, criterion, fold_thresholds) for scores in fold_scores(plan.fold, test)]
        metrics.append(
            fold_metrics(
                f"fold_{plan.fold}",
                [sample.id for sample in test],
                predictions,
                [sample.labels for sample in test],
                num_classes,
            ),
        )

    report = average_folds(metrics, criterion)
    log.info(
        "Mean IoU (%s): %.4f without background, %.4f with background",
        criterion.value,
        report.mean_without_background,
        report.mean_with_background,
    )
    return report


def evaluate_run(
    run: LoadedRun,
    samples: Sequence[Sample],
    criterion: LabellingCriterion = LabellingCriterion.MAP,
) -> EvaluationReport:
    def fold_scores(fold: int, test: Sequence[Sample]) -> list[np.ndarray]:
        return score_samples(run.networks[fold].scores, test, run.patch)[0]

    return evaluate_scores(fold_scores, run.folds, samples, run.num_classes, criterion, run.fold_thresholds)


def predict_image(
    run: LoadedRun,
    image: np.ndarray,
    criterion: LabellingCriterion = LabellingCriterion.MAP,
) -> tuple[np.ndarray, np.ndarray]:
    """Labels and score map of one image; fold score maps and fold thresholds are averaged."""
    scores = np.mean([infer_scores(network.scores, image, run.patch) for network in run.networks], axis=0)
    thresholds = run.mean_thresholds() if criterion == LabellingCriterion.TH else None
    return label_scores(scores, criterion, thresholds), scores
