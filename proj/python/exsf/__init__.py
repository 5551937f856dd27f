"""Exterior sound field interpolation with attenuated spherical wave kernels."""

from ._exsf import *  # noqa: F401,F403
from ._exsf import __doc__  # noqa: F401

__version__ = "0.1.0"
