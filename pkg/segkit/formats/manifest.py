"""
Dataset manifests: one record per slice pointing at a TSR1 image and a PGM mask.

Paths in a manifest are relative to the manifest file.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from segkit.data.schemas import Sample
from segkit.exceptions import ManifestError, MissingArtifact, SegkitError
from segkit.formats.config import read_model, write_model
from segkit.formats.pgm import read_pgm, write_pgm
from segkit.formats.tsr import read_tsr, write_tsr

log = logging.getLogger(__name__)

IMAGES_DIR = "images"
MASKS_DIR = "masks"


class ManifestRecord(BaseModel):
    id: str
    patient_id: str
    image_path: str
    mask_path: str
    split: Optional[str] = None


class Manifest(BaseModel):
    num_classes: int = Field(ge=2)
    records: list[ManifestRecord]

    @model_validator(mode="after")
    def validate_ids(self) -> Manifest:
        ids = [record.id for record in self.records]
        duplicates = sorted({item for item in ids if ids.count(item) > 1})
        if duplicates:
            msg = f"Duplicate sample ids in manifest: {', '.join(duplicates)}."
            raise ManifestError(detail=msg, pointer="/records")
        return self

    @property
    def patient_ids(self) -> list[str]:
        return sorted({record.patient_id for record in self.records})


def load_manifest(path: Path) -> Manifest:
    return read_model(path, Manifest)


def _load_record(record: ManifestRecord, root: Path, num_classes: int) -> Sample:
    try:
        image = read_tsr(root / record.image_path)
        labels = read_pgm(root / record.mask_path)
    except MissingArtifact as ex:
        raise ManifestError(detail=f"Sample {record.id!r}: {ex.detail}") from ex

    if image.shape[:2] != labels.shape:
        msg = f"Sample {record.id!r}: image {image.shape} and mask {labels.shape} differ in size."
        raise ManifestError(detail=msg)

    if labels.size and labels.max() >= num_classes:
        msg = f"Sample {record.id!r}: mask holds class {labels.max()} but the manifest declares {num_classes}."
        raise ManifestError(detail=msg)

    return Sample(id=record.id, patient_id=record.patient_id, image=image, labels=labels, split=record.split)


def load_samples(path: Path) -> tuple[Manifest, list[Sample]]:
    manifest = load_manifest(path)
    samples = [_load_record(record, path.parent, manifest.num_classes) for record in manifest.records]
    log.info("Loaded %s samples of %s patients from %s", len(samples), len(manifest.patient_ids), path)
    return manifest, samples


def write_dataset(samples: list[Sample], num_classes: int, path: Path) -> Manifest:
    """Write images, masks and the manifest describing them next to each other."""
    root = path.parent
    records = []
    for sample in samples:
        image_path = f"{IMAGES_DIR}/{sample.id}.tsr"
        mask_path = f"{MASKS_DIR}/{sample.id}.pgm"
        try:
            write_tsr(sample.image, root / image_path)
            write_pgm(sample.labels, root / mask_path)
        except SegkitError:
            log.exception("Cannot write sample %s", sample.id)
            raise
        records.append(
            ManifestRecord(
                id=sample.id,
                patient_id=sample.patient_id,
                image_path=image_path,
                mask_path=mask_path,
                split=sample.split,
            ),
        )

    manifest = Manifest(num_classes=num_classes, records=records)
    write_model(manifest, path)
    log.info("Wrote %s samples to %s", len(samples), root)
    return manifest
