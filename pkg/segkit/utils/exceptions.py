from functools import wraps

from pydantic import ValidationError

from segkit.exceptions import InvalidConfig


def _pointer(errors: list[dict]) -> str:
    if not errors or not errors[0]["loc"]:
        return ""

    return "/".join(str(part) for part in errors[0]["loc"])


def handle_validation_error(func):
    """Re-raise pydantic validation failures as ``InvalidConfig`` pointing at the first offending field."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValidationError as ex:
            errors = ex.errors(include_url=False, include_context=False)
            raise InvalidConfig(detail=errors, pointer=_pointer(errors)) from ex

    return wrapper
