"""Python bindings for the graphtrans C++ library."""

from ._graphtrans import *  # noqa: F401,F403
from ._graphtrans import __version__  # noqa: F401
