__all__ = (
    "fake",
    "fake_patient_ids",
    "fake_seed",
)

from faker import Faker

fake = Faker()

Faker.seed("segkit-test-suite")


def fake_patient_ids(count: int) -> list[str]:
    """Distinct anonymised patient ids, sorted."""
    return sorted(fake.unique.bothify("P-####") for _ in range(count))


def fake_seed() -> int:
    return fake.pyint(min_value=1, max_value=1000)
