#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#

"""base packet imports"""

from .cascade_sim import CascadeSim
from .constants import __version__
from .model import AmplitudeState, CascadeParams, SubsystemParams

__all__ = [
    "AmplitudeState",
    "CascadeParams",
    "CascadeSim",
    "SubsystemParams",
    "__version__",
]
