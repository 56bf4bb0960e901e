"""Hyperdimensional classifiers, the reasoning attack on stripped models and HDLock key locking."""

from ._hdlock import *  # noqa: F401,F403
from ._hdlock import HdlockError, __version__

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
