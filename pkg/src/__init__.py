"""LogSpace - F-norms, isometries and isometry decisions for L_log spaces"""

from src.core.config import __version__
