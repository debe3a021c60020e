"""Escape sequences of coupled bistable nodes."""

from ._domino import *  # noqa: F401,F403
from ._domino import DominoError, __doc__  # noqa: F401

__version__ = "0.1.0"
