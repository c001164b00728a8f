"""Document schemas, loading and report writing"""

from .operations import DocumentStorage

__all__ = ['DocumentStorage']
