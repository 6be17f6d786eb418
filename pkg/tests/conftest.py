import logging

import pytest

from segkit.storages import score_providers_storage
from tests.fixtures.datasets import (  # noqa
    dataset_dir,
    manifest_path,
    synthetic_samples,
    tiny_patch,
)
from tests.fixtures.runs import (  # noqa
    second_run,
    second_run_dir,
    tiny_run,
    tiny_run_config,
    tiny_run_dir,
    tiny_topology,
)


def configure_logging():
    logging.getLogger("faker.factory").setLevel(logging.INFO)
    logging.basicConfig(level=logging.DEBUG)


configure_logging()


@pytest.fixture(autouse=True)
def clear_score_providers():
    yield
    for member_id in list(score_providers_storage._providers):
        score_providers_storage.remove_provider(member_id)
