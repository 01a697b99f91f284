"""Ground states and localization diagnostics for the quintic NLSE in a random potential."""

from ._qal import *  # noqa: F401,F403
from ._qal import __doc__ as _native_doc  # noqa: F401

__version__ = "0.1.0"


def reference_grid():
    """The default 1501-node grid on [-30, 30]."""
    return Grid.from_spacing(30.0, 0.04)
