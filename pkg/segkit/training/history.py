import csv
import logging
from collections.abc import Sequence
from pathlib import Path

from segkit.exceptions import MissingArtifact
from segkit.training.schemas import EpochRecord

log = logging.getLogger(__name__)

HISTORY_COLUMNS = tuple(EpochRecord.model_fields)


def write_history_csv(history: Sequence[EpochRecord], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as stream:
        writer = csv.DictWriter(stream, fieldnames=HISTORY_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for record in history:
            writer.writerow(
                {
                    key: value if isinstance(value, int) else f"{value:.8f}"
                    for key, value in record.model_dump().items()
                },
            )
    log.debug("Wrote %s epochs of history to %s", len(history), path)
    return path


def read_history_csv(path: Path) -> list[EpochRecord]:
    if not path.is_file():
        msg = f"History file {str(path)!r} does not exist."
        raise MissingArtifact(detail=msg, parameter="path")

    with path.open(newline="") as stream:
        return [EpochRecord.model_validate(row) for row in csv.DictReader(stream)]
