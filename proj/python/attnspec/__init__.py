from ._attnspec import *  # noqa: F401,F403
from ._attnspec import __version__  # noqa: F401
