"""Walsh operational-matrix solver for linear stochastic Volterra integral equations."""

from ._wsvie import *  # noqa: F401,F403
from ._wsvie import __doc__  # noqa: F401
