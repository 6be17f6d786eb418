"""Collection of error schemas rendered by the command-line interface."""

from typing import Any, Optional

from pydantic import BaseModel, Field


class ErrorSourceSchema(BaseModel):
    """Source error schema."""

    parameter: Optional[str] = None
    pointer: Optional[str] = None


class ErrorSchema(BaseModel):
    """Error schema."""

    exit_code: int
    source: Optional[ErrorSourceSchema] = None
    title: str
    detail: Any = None
    meta: Any = None


class ErrorResponseSchema(BaseModel):
    """Error response schema."""

    errors: list[ErrorSchema]
    segkit: dict[str, str] = Field(default={"format": "1.0"})
