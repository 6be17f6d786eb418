"""Exceptions package. Contains the error hierarchy and error schemas."""

from .base import (
    ErrorResponseSchema,
    ErrorSchema,
    ErrorSourceSchema,
)
from .errors import (
    ChannelMismatch,
    EmptyDataset,
    GraphError,
    InsufficientSamples,
    InternalInconsistency,
    InvalidConfig,
    InvalidDimension,
    InvalidEnsemble,
    InvalidShape,
    InvalidTopology,
    ManifestError,
    MaskFormatError,
    MissingArtifact,
    NumericalError,
    SegkitError,
    ShapeMismatch,
    TensorFormatError,
    UnknownIdentifier,
    VerificationFailed,
)

__all__ = [
    "ChannelMismatch",
    "EmptyDataset",
    "ErrorResponseSchema",
    "ErrorSchema",
    "ErrorSourceSchema",
    "GraphError",
    "InsufficientSamples",
    "InternalInconsistency",
    "InvalidConfig",
    "InvalidDimension",
    "InvalidEnsemble",
    "InvalidShape",
    "InvalidTopology",
    "ManifestError",
    "MaskFormatError",
    "MissingArtifact",
    "NumericalError",
    "SegkitError",
    "ShapeMismatch",
    "TensorFormatError",
    "UnknownIdentifier",
    "VerificationFailed",
]
