from ._coda import *  # noqa: F401,F403
from ._coda import __version__  # noqa: F401
