"""Non-linear chirp spread spectrum modem and collision decoder."""

from ._nlchirp import *  # noqa: F401,F403
