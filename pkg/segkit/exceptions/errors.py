"""Segkit exceptions."""

from typing import Any, Optional, Union

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CHECK_FAILED = 4


class SegkitError(Exception):
    """Base exception class of the package."""

    title: str = "Segmentation toolkit error."
    exit_code: int = EXIT_FAILURE
    parameter: str = ""

    def __init__(
        self,
        detail: Union[str, dict, list] = "",
        pointer: str = "",
        parameter: str = "",
        title: Optional[str] = None,
        exit_code: Optional[int] = None,
        errors: Optional[list["SegkitError"]] = None,
        meta: Optional[dict[str, Any]] = None,
    ):
        """
        Init base segkit error.

        :param detail: a human-readable explanation specific to this occurrence of the problem
        :param pointer: a JSON Pointer into the offending document
        :param parameter: name of the argument, option or field that caused the error
        :param title: a short, human-readable summary of the problem
        :param exit_code: process exit code used by the command line
        :param errors: may be passed over other arguments as list of `SegkitError` objects
        :param meta: default meta
        """
        if exit_code is not None:
            self.exit_code = exit_code

        if title is not None:
            self.title = title

        self.source = None
        self.meta = meta
        self.detail = detail

        parameter = parameter or self.parameter
        if not errors:
            if pointer:
                self.source = {"pointer": pointer if pointer.startswith("/") else f"/{pointer}"}
            elif parameter:
                self.source = {"parameter": parameter}

            errors = [self]
        else:
            self.exit_code = errors[0].exit_code
            self.meta = [error.as_dict for error in errors]

        self.errors = errors
        super().__init__(detail if isinstance(detail, str) and detail else self.title)

    @property
    def as_dict(self) -> dict[str, Any]:
        data = {
            "exit_code": self.exit_code,
            "source": self.source,
            "title": self.title,
            "detail": self.detail,
            "meta": self.meta,
        }
        return {key: value for key, value in data.items() if value}


class InvalidShape(SegkitError):
    """Non-positive or otherwise unusable dimensions."""

    title = "Invalid shape."


class ChannelMismatch(InvalidShape):
    """Operand channel counts do not line up."""

    title = "Channel mismatch."


class ShapeMismatch(InvalidShape):
    """Operand shapes differ where they must agree."""

    title = "Shape mismatch."


class InvalidDimension(InvalidShape):
    """Spatial dimension violates an operator precondition (odd size, indivisible size, too small)."""

    title = "Invalid spatial dimension."


class GraphError(SegkitError):
    """Backward requested on something that was not produced by a recorded forward pass."""

    title = "Invalid differentiation request."


class NumericalError(SegkitError):
    """NaN or infinite values where finite values are required."""

    title = "Non-finite value."


class InvalidTopology(SegkitError):
    """
    Topology description violates a block combination rule.

    Raised by the topology builder and by the topology spec validators.
    """

    title = "Invalid topology."
    exit_code = EXIT_USAGE


class InvalidEnsemble(SegkitError):
    title = "Invalid ensemble."
    exit_code = EXIT_USAGE


class UnknownIdentifier(SegkitError):
    """Name is not registered in a storage."""

    title = "Unknown identifier."
    exit_code = EXIT_USAGE


class InvalidConfig(SegkitError):
    title = "Invalid configuration."
    exit_code = EXIT_USAGE


class EmptyDataset(SegkitError):
    title = "Empty dataset."
    exit_code = EXIT_DATA


class InsufficientSamples(SegkitError):
    """Not enough observations for the requested procedure."""

    title = "Insufficient samples."
    exit_code = EXIT_DATA


class TensorFormatError(SegkitError):
    title = "Invalid TSR1 tensor file."
    exit_code = EXIT_DATA


class MaskFormatError(SegkitError):
    title = "Invalid PGM mask file."
    exit_code = EXIT_DATA


class ManifestError(SegkitError):
    title = "Invalid dataset manifest."
    exit_code = EXIT_DATA


class MissingArtifact(SegkitError):
    """Expected file or run artifact does not exist."""

    title = "Missing artifact."
    exit_code = EXIT_DATA


class VerificationFailed(SegkitError):
    title = "Verification check failed."
    exit_code = EXIT_CHECK_FAILED


class InternalInconsistency(SegkitError):
    """
    Cross-check between two independently computed quantities failed
    """

    title = "Internal inconsistency."
