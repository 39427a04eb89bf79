"""Steady hollow-vortex desingularization and continuation.

Thin wrapper over the compiled extension; see the C++ headers for the full API.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
