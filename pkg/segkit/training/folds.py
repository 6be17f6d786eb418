"""Patient-disjoint three-fold cross-validation with a shared test set."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence

import numpy as np

from segkit.data.schemas import Sample
from segkit.exceptions import InsufficientSamples
from segkit.training.schemas import FOLD_COUNT, FoldPlan, FoldSet
from segkit.utils.seeding import Stream, make_rng

log = logging.getLogger(__name__)

MIN_PATIENTS = 5
TEST_FRACTION = 0.2


def make_folds(patient_ids: Iterable[str], seed: int = 0) -> FoldSet:
    """
    Hold out 20% of the patients (rounded, at least one) as test set and split the rest in three groups.

    Fold ``k`` validates on group ``k`` and trains on the two others.
    """
    patients = sorted(set(patient_ids))
    if len(patients) < MIN_PATIENTS:
        msg = f"Cross-validation needs at least {MIN_PATIENTS} patients, got {len(patients)}."
        raise InsufficientSamples(detail=msg)

    shuffled = [patients[index] for index in make_rng(seed, Stream.FOLDS).permutation(len(patients))]
    test_count = max(1, int(np.floor(TEST_FRACTION * len(patients) + 0.5)))
    test = sorted(shuffled[:test_count])
    groups = [sorted(group.tolist()) for group in np.array_split(np.array(shuffled[test_count:]), FOLD_COUNT)]

    folds = []
    for fold in range(FOLD_COUNT):
        train = sorted(patient for index, group in enumerate(groups) if index != fold for patient in group)
        folds.append(
            FoldPlan(fold=fold, train_patients=train, validation_patients=groups[fold], test_patients=test),
        )
        log.debug("Fold %s: %s train, %s validation patients", fold, len(train), len(groups[fold]))

    log.info("Planned %s folds over %s patients, %s held out for testing", FOLD_COUNT, len(patients), len(test))

    return FoldSet(seed=seed, folds=folds)


def select_patients(samples: Sequence[Sample], patients: Iterable[str]) -> list[Sample]:
    wanted = set(patients)
    return [sample for sample in samples if sample.patient_id in wanted]


def split_samples(samples: Sequence[Sample], plan: FoldPlan) -> tuple[list[Sample], list[Sample], list[Sample]]:
    """Training, validation and test samples of one fold."""
    return (
        select_patients(samples, plan.train_patients),
        select_patients(samples, plan.validation_patients),
        select_patients(samples, plan.test_patients),
    )
