import sys
from typing import Optional, TextIO

import orjson as json

from segkit.exceptions.base import ErrorResponseSchema
from segkit.exceptions.errors import SegkitError


def base_exception_handler(exc: SegkitError, stream: Optional[TextIO] = None) -> int:
    """Write the error document to ``stream`` (standard error by default) and return the exit code."""
    stream = stream or sys.stderr
    response = ErrorResponseSchema(errors=[error.as_dict for error in exc.errors])
    stream.write(json.dumps(response.model_dump(exclude_none=True), option=json.OPT_INDENT_2).decode())
    stream.write("\n")
    return exc.exit_code
