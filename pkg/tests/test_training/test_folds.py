import pytest

from segkit.exceptions import InsufficientSamples, InvalidConfig
from segkit.training import FoldPlan, make_folds, select_patients, split_samples
from tests.misc.utils import fake_patient_ids


@pytest.fixture
def patients() -> list[str]:
    return fake_patient_ids(10)


def test_roles_are_disjoint_and_complete(patients):
    folds = make_folds(patients, seed=1)

    assert len(folds.folds) == 3
    for plan in folds.folds:
        assert plan.patients == set(patients)
        assert not set(plan.train_patients) & set(plan.validation_patients)


def test_shared_test_set(patients):
    folds = make_folds(patients)

    assert len(folds.folds[0].test_patients) == 2
    assert all(plan.test_patients == folds.folds[0].test_patients for plan in folds.folds)


def test_every_patient_validates_once(patients):
    folds = make_folds(patients)
    test = set(folds.folds[0].test_patients)

    validated = [patient for plan in folds.folds for patient in plan.validation_patients]

    assert sorted(validated) == sorted(set(patients) - test)
    assert sorted(len(plan.validation_patients) for plan in folds.folds) == [2, 3, 3]


def test_deterministic_and_order_independent(patients):
    assert make_folds(patients, seed=4) == make_folds(list(reversed(patients)), seed=4)
    assert make_folds(patients, seed=4) != make_folds(patients, seed=5)


def test_too_few_patients():
    with pytest.raises(InsufficientSamples):
        make_folds(["P1", "P2", "P3", "P4", "P4", "P4"])


def test_overlapping_roles():
    with pytest.raises(InvalidConfig):
        FoldPlan(fold=0, train_patients=["P1"], validation_patients=["P1"], test_patients=["P2"])


def test_split_samples(synthetic_samples):
    plan = make_folds(sample.patient_id for sample in synthetic_samples).folds[0]

    train, validation, test = split_samples(synthetic_samples, plan)

    assert len(train) + len(validation) + len(test) == len(synthetic_samples)
    assert {sample.patient_id for sample in test} == set(plan.test_patients)
    assert select_patients(synthetic_samples, []) == []
