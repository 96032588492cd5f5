"""Wildfire susceptibility modeling toolkit."""

from ._firemap import *  # noqa: F401,F403
from ._firemap import __version__  # noqa: F401
