from typing import TypeVar

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel

FloatArray = npt.NDArray[np.floating]
LabelArray = npt.NDArray[np.integer]
TypeSchema = TypeVar("TypeSchema", bound=BaseModel)
