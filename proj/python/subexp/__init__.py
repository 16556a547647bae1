"""Sub-linear expectations over finite ambiguity sets.

Thin re-export of the compiled ``_subexp`` extension.
"""

from ._subexp import *  # noqa: F401,F403
from ._subexp import SubexpError, __doc__  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
