"""Random-matrix spectral statistics (bindings to the C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, ValidationError, RuntimeFailure  # noqa: F401
