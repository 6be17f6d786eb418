"""JSON documents backed by pydantic models."""

from __future__ import annotations

import logging
from pathlib import Path

import orjson as json

from segkit.data_typing import TypeSchema
from segkit.exceptions import InvalidConfig, MissingArtifact
from segkit.utils.exceptions import handle_validation_error

log = logging.getLogger(__name__)

JSON_OPTIONS = json.OPT_INDENT_2 | json.OPT_SORT_KEYS | json.OPT_SERIALIZE_NUMPY


def dumps_model(model: TypeSchema) -> bytes:
    return json.dumps(model.model_dump(mode="json"), option=JSON_OPTIONS)


@handle_validation_error
def loads_model(payload: bytes, schema: type[TypeSchema]) -> TypeSchema:
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as ex:
        raise InvalidConfig(detail=f"Malformed JSON: {ex}") from ex

    return schema.model_validate(data)


def write_model(model: TypeSchema, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_model(model))
    log.debug("Wrote %s", path)
    return path


def read_model(path: Path, schema: type[TypeSchema]) -> TypeSchema:
    if not path.is_file():
        msg = f"Document {str(path)!r} does not exist."
        raise MissingArtifact(detail=msg, parameter="path")

    return loads_model(path.read_bytes(), schema)
